//! Zero- and first-order heat-loss functionals on a discretized boundary.
//!
//! Every functional is a single pairwise sum over `(weight, H, h)` triples,
//! so evaluation is `O(N)` and bit-reproducible for a fixed mesh.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::geometry::{fmt17, BoundaryMesh};
use crate::numerics::pairwise_sum_by;

/// Relative slack on the mass budget before a field counts as infeasible.
pub const MASS_FEASIBILITY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    /// Heat-transfer coefficient.
    pub beta: f64,
    /// Layer-scale parameter. Zero gives the zero-order problem.
    pub eps: f64,
    /// Insulator budget `m`.
    pub mass: f64,
}

impl PhysicsParams {
    pub fn new(beta: f64, eps: f64, mass: f64) -> Result<Self> {
        require_positive("beta", beta)?;
        require_nonnegative("eps", eps)?;
        require_positive("mass", mass)?;
        Ok(Self { beta, eps, mass })
    }

    /// `eps * H / beta`, the dimensionless curvature that drives the optimum.
    pub fn curvature_ratio(&self, curvature: f64) -> f64 {
        self.eps * curvature / self.beta
    }
}

/// Nonnegative per-sample thickness aligned with a mesh, with its cached mass.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessField {
    values: Vec<f64>,
    mass: f64,
}

impl ThicknessField {
    pub fn new(mesh: &BoundaryMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Misaligned {
                expected: mesh.len(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::NegativeThickness { index, value });
        }
        let mass = pairwise_sum_by(values.len(), |i| mesh.weight(i) * values[i]);
        Ok(Self { values, mass })
    }

    pub fn constant(mesh: &BoundaryMesh, value: f64) -> Result<Self> {
        Self::new(mesh, vec![value; mesh.len()])
    }

    pub fn zeros(mesh: &BoundaryMesh) -> Self {
        Self {
            values: vec![0.0; mesh.len()],
            mass: 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `sum_i w_i h_i`
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Returns the field if its mass is within `budget`. A violation smaller
    /// than [`MASS_FEASIBILITY_RTOL`] relative is clamped by rescaling the
    /// whole field; anything larger is an error.
    pub fn within_budget(self, mesh: &BoundaryMesh, budget: f64) -> Result<Self> {
        if self.mass <= budget {
            return Ok(self);
        }
        if self.mass <= budget * (1.0 + MASS_FEASIBILITY_RTOL) {
            let s = budget / self.mass;
            let values = self.values.iter().map(|v| v * s).collect();
            let scaled = Self::new(mesh, values)?;
            if scaled.mass <= budget {
                return Ok(scaled);
            }
            // rounding pushed it back over by an ulp
            let s = s * (1.0 - 4.0 * f64::EPSILON);
            return Self::new(mesh, scaled.values.iter().map(|v| v * s).collect());
        }
        Err(Error::MassExceeded {
            mass: self.mass,
            budget,
        })
    }

    /// Single-column CSV (`h`) in mesh sample order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["h"])?;
        for v in &self.values {
            w.write_record([fmt17(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `h` column (the first column if none is named `h`).
    pub fn read_csv<R: Read>(mesh: &BoundaryMesh, input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let col = rdr
            .headers()?
            .iter()
            .position(|name| name.trim() == "h")
            .unwrap_or(0);
        let mut values = Vec::with_capacity(mesh.len());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = rec.get(col).unwrap_or("").trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::InvalidInput(format!("row {}: cannot parse thickness `{field}`", row + 1))
            })?;
            values.push(v);
        }
        Self::new(mesh, values)
    }
}

fn check_aligned(mesh: &BoundaryMesh, h: &ThicknessField) -> Result<()> {
    if h.len() == mesh.len() {
        Ok(())
    } else {
        Err(Error::Misaligned {
            expected: mesh.len(),
            got: h.len(),
        })
    }
}

/// `F_0(h) = beta * sum_i w_i / (1 + beta h_i)`
pub fn eval_f0(mesh: &BoundaryMesh, h: &ThicknessField, beta: f64) -> Result<f64> {
    check_aligned(mesh, h)?;
    let hv = h.values();
    Ok(beta * pairwise_sum_by(mesh.len(), |i| mesh.weight(i) / (1.0 + beta * hv[i])))
}

/// `F^(1)(h) = beta * sum_i w_i H_i h_i (2 + beta h_i) / (2 (1 + beta h_i)^2)`
pub fn eval_f1(mesh: &BoundaryMesh, h: &ThicknessField, beta: f64) -> Result<f64> {
    check_aligned(mesh, h)?;
    let hv = h.values();
    Ok(beta
        * pairwise_sum_by(mesh.len(), |i| {
            let x = hv[i];
            let d = 1.0 + beta * x;
            mesh.weight(i) * mesh.curvature(i) * x * (2.0 + beta * x) / (2.0 * d * d)
        }))
}

/// `G_eps(h) = F_0(h) + eps * F^(1)(h)`.
pub fn eval_geps(mesh: &BoundaryMesh, h: &ThicknessField, beta: f64, eps: f64) -> Result<f64> {
    Ok(eval_f0(mesh, h, beta)? + eps * eval_f1(mesh, h, beta)?)
}

/// One-sided derivative of `t -> G_eps(base + t (target - base))` at `t = 0`.
pub fn geps_directional_derivative(
    mesh: &BoundaryMesh,
    base: &ThicknessField,
    target: &ThicknessField,
    beta: f64,
    eps: f64,
) -> Result<f64> {
    check_aligned(mesh, base)?;
    check_aligned(mesh, target)?;
    let (b, t) = (base.values(), target.values());
    Ok(beta
        * pairwise_sum_by(mesh.len(), |i| {
            let d = 1.0 + beta * b[i];
            let slope = (eps * mesh.curvature(i) - beta * d) / (d * d * d);
            mesh.weight(i) * slope * (t[i] - b[i])
        }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformBaseline {
    pub h0: ThicknessField,
    /// `beta P^2 / (P + beta m)`, the minimum of `F_0` over the budget.
    pub value: f64,
}

/// Uniform layer `h0 = m/P`, the unique minimizer of `F_0` at mass `m`.
pub fn uniform_baseline(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<UniformBaseline> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let p = mesh.perimeter();
    let h0 = ThicknessField::constant(mesh, params.mass / p)?;
    let value = params.beta * p * p / (p + params.beta * params.mass);
    Ok(UniformBaseline { h0, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circle_mesh, discretize_sphere, ellipse_mesh};
    use std::f64::consts::PI;

    #[test]
    fn f0_without_insulation_is_beta_perimeter() {
        let m = ellipse_mesh(2.0, 1.0, 128).unwrap();
        let z = ThicknessField::zeros(&m);
        assert_eq!(eval_f0(&m, &z, 1.7).unwrap(), 1.7 * m.perimeter());
        assert_eq!(eval_f1(&m, &z, 1.7).unwrap(), 0.0);
        for eps in [0.0, 0.1, 3.0] {
            assert_eq!(eval_geps(&m, &z, 1.7, eps).unwrap(), 1.7 * m.perimeter());
        }
    }

    #[test]
    fn circle_values() {
        let m = circle_mesh(1.0, 256).unwrap();
        let one = ThicknessField::constant(&m, 1.0).unwrap();
        assert!((eval_f0(&m, &one, 1.0).unwrap() - PI).abs() < 1e-13);
        assert!((eval_f1(&m, &one, 1.0).unwrap() - 0.75 * PI).abs() < 1e-13);
        let g = eval_geps(&m, &one, 1.0, 0.1).unwrap();
        assert!((g - 1.075 * PI).abs() < 1e-13);
        assert_eq!(
            eval_geps(&m, &one, 1.0, 0.0).unwrap(),
            eval_f0(&m, &one, 1.0).unwrap()
        );
    }

    #[test]
    fn sphere_f1() {
        let m = discretize_sphere(1.0, 16).unwrap();
        let one = ThicknessField::constant(&m, 1.0).unwrap();
        assert!((eval_f1(&m, &one, 1.0).unwrap() - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn baseline_values() {
        let m = circle_mesh(1.0, 256).unwrap();
        let b = uniform_baseline(&m, &PhysicsParams::new(1.0, 0.1, 2.0 * PI).unwrap()).unwrap();
        assert!(b.h0.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!((b.value - PI).abs() < 1e-13);
        assert!((eval_f0(&m, &b.h0, 1.0).unwrap() - b.value).abs() < 1e-13);

        let s = discretize_sphere(1.0, 16).unwrap();
        let b = uniform_baseline(&s, &PhysicsParams::new(2.0, 0.1, 4.0 * PI).unwrap()).unwrap();
        assert!((b.value - 8.0 * PI / 3.0).abs() < 1e-12);

        let tiny = uniform_baseline(&m, &PhysicsParams::new(1.0, 0.1, 1e-12).unwrap()).unwrap();
        assert!((tiny.value - m.perimeter()).abs() < 1e-10);
    }

    #[test]
    fn misaligned_field_rejected() {
        let m = circle_mesh(1.0, 32).unwrap();
        let other = circle_mesh(1.0, 64).unwrap();
        let h = ThicknessField::zeros(&other);
        assert!(matches!(
            eval_f0(&m, &h, 1.0),
            Err(Error::Misaligned { .. })
        ));
        assert!(matches!(
            eval_f1(&m, &h, 1.0),
            Err(Error::Misaligned { .. })
        ));
        assert!(ThicknessField::new(&m, vec![1.0; 3]).is_err());
    }

    #[test]
    fn negative_thickness_rejected() {
        let m = circle_mesh(1.0, 16).unwrap();
        let mut v = vec![0.5; 16];
        v[3] = -1e-9;
        assert!(matches!(
            ThicknessField::new(&m, v),
            Err(Error::NegativeThickness { index: 3, .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(PhysicsParams::new(0.0, 0.1, 1.0).is_err());
        assert!(PhysicsParams::new(1.0, -0.1, 1.0).is_err());
        assert!(PhysicsParams::new(1.0, 0.1, 0.0).is_err());
        assert!(PhysicsParams::new(1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn budget_clamp() {
        let m = circle_mesh(1.0, 64).unwrap();
        let h = ThicknessField::constant(&m, 1.0).unwrap();
        let p = m.perimeter();
        let clamped = h.clone().within_budget(&m, p * (1.0 - 1e-12)).unwrap();
        assert!(clamped.mass() <= p * (1.0 - 1e-12));
        assert!(h.clone().within_budget(&m, p * 0.5).is_err());
        assert_eq!(h.clone().within_budget(&m, 2.0 * p).unwrap(), h);
    }

    #[test]
    fn csv_round_trip() {
        let m = ellipse_mesh(2.0, 1.0, 32).unwrap();
        let h = ThicknessField::new(&m, (0..32).map(|i| i as f64 / 7.0).collect()).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let back = ThicknessField::read_csv(&m, buf.as_slice()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn directional_derivative_matches_finite_difference() {
        let m = ellipse_mesh(2.0, 1.0, 64).unwrap();
        let a = ThicknessField::new(&m, (0..64).map(|i| 0.2 + 0.1 * (i as f64).sin()).collect())
            .unwrap();
        let b = ThicknessField::constant(&m, 0.3).unwrap();
        let (beta, eps) = (1.3, 0.2);
        let d = geps_directional_derivative(&m, &a, &b, beta, eps).unwrap();
        let t = 1e-6;
        let mid: Vec<f64> = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x + t * (y - x))
            .collect();
        let mid = ThicknessField::new(&m, mid).unwrap();
        let fd =
            (eval_geps(&m, &mid, beta, eps).unwrap() - eval_geps(&m, &a, beta, eps).unwrap()) / t;
        assert!((d - fd).abs() < 1e-5 * d.abs().max(1.0), "{d} vs {fd}");
    }
}
