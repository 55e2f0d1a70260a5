//! Exact solution of the layer problem on a ball of radius `R` coated with a
//! shell of constant thickness `eps h`.
//!
//! The potential is `u = 1` inside the ball, harmonic in the shell
//! `R < r < rho = R + eps h` with conductivity `eps`, and satisfies
//! `eps u' + beta u = 0` at `rho`. In the shell `u' = c r^(1-n)`.

use serde::{Deserialize, Serialize};

use super::{check_eps_list, ExpansionReport};
use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::numerics::unit_sphere_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub n: usize,
    pub radius: f64,
    pub beta: f64,
    pub eps: f64,
    /// Constant thickness; zero means no layer.
    pub h: f64,
}

impl RadialProblem {
    pub fn new(n: usize, radius: f64, beta: f64, eps: f64, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                got: n,
            });
        }
        require_positive("radius", radius)?;
        require_positive("beta", beta)?;
        require_positive("eps", eps)?;
        require_nonnegative("h", h)?;
        let p = Self {
            n,
            radius,
            beta,
            eps,
            h,
        };
        p.check_tube()?;
        Ok(p)
    }

    fn check_tube(&self) -> Result<()> {
        let thickness = self.eps * self.h;
        if thickness >= self.radius {
            return Err(Error::TubeCondition {
                thickness,
                radius: self.radius,
            });
        }
        Ok(())
    }

    pub fn outer_radius(&self) -> f64 {
        self.radius + self.eps * self.h
    }

    /// `int_R^rho r^(1-n) dr`, computed without cancellation for thin shells.
    fn shell_integral(&self) -> f64 {
        let x = self.eps * self.h / self.radius;
        if self.n == 2 {
            x.ln_1p()
        } else {
            let k = self.n as f64 - 2.0;
            -(-k * x.ln_1p()).exp_m1() / (k * self.radius.powf(k))
        }
    }

    /// Slope constant `c` of `u' = c r^(1-n)`.
    pub fn slope_constant(&self) -> f64 {
        let rho = self.outer_radius();
        let flux = rho.powi(1 - self.n as i32);
        -self.beta / (self.eps * flux + self.beta * self.shell_integral())
    }

    /// Limit `F_0 = beta |S| / (1 + beta h)` with `|S| = n omega_n R^(n-1)`.
    pub fn zero_order(&self) -> f64 {
        self.beta * self.surface_area() / (1.0 + self.beta * self.h)
    }

    /// `F^(1) = beta |S| (n-1)/R * h (2 + beta h) / (2 (1 + beta h)^2)`.
    pub fn first_order(&self) -> f64 {
        let d = 1.0 + self.beta * self.h;
        let curvature = (self.n as f64 - 1.0) / self.radius;
        self.beta * self.surface_area() * curvature * self.h * (2.0 + self.beta * self.h)
            / (2.0 * d * d)
    }

    fn surface_area(&self) -> f64 {
        unit_sphere_area(self.n) * self.radius.powi(self.n as i32 - 1)
    }
}

/// `eps int_shell |grad u|^2 + beta int_{|x| = rho} u^2` at the minimizer.
pub fn radial_exact_energy(p: &RadialProblem) -> Result<f64> {
    p.check_tube()?;
    let area = unit_sphere_area(p.n);
    let rho = p.outer_radius();
    let c = p.slope_constant();
    let l = p.shell_integral();
    let u_out = 1.0 + c * l;
    let bulk = p.eps * area * c * c * l;
    let boundary = p.beta * area * rho.powi(p.n as i32 - 1) * u_out * u_out;
    Ok(bulk + boundary)
}

/// Exact energies over `eps_list`, fitted against `F_0 + eps F^(1)`.
pub fn radial_expansion_check(
    n: usize,
    radius: f64,
    beta: f64,
    h: f64,
    eps_list: &[f64],
) -> Result<ExpansionReport> {
    check_eps_list(eps_list)?;
    let problems = eps_list
        .iter()
        .map(|&eps| RadialProblem::new(n, radius, beta, eps, h))
        .collect::<Result<Vec<_>>>()?;
    let exact = problems
        .iter()
        .map(radial_exact_energy)
        .collect::<Result<Vec<_>>>()?;
    let p = problems[0];
    Ok(ExpansionReport::build(
        eps_list,
        exact,
        p.zero_order(),
        p.first_order(),
    ))
}
