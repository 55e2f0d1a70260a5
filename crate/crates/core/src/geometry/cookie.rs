//! Cookie shapes: a flat disk of radius `R` thickened by a rounded rim of
//! radius `r`. In the plane this is a stadium with flat sides of length `2R`
//! and two semicircular caps.

use std::f64::consts::{FRAC_PI_2, PI};

use super::mesh::{BoundaryMesh, Sample};
use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::numerics::{adaptive_simpson, unit_ball_volume};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CookieSpec {
    /// Radius of the rounded rim.
    pub r: f64,
    /// Radius of the flat faces.
    pub big_r: f64,
    /// Ambient dimension.
    pub n: usize,
}

impl CookieSpec {
    pub fn new(r: f64, big_r: f64, n: usize) -> Result<Self> {
        require_positive("r", r)?;
        require_positive("R", big_r)?;
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "cookie dimension must be >= 2, got {n}"
            )));
        }
        Ok(Self { r, big_r, n })
    }

    pub fn perimeter(&self) -> f64 {
        perimeter_unchecked(self.r, self.big_r, self.n)
    }
}

/// Perimeter of the cookie shape,
/// `2 omega_{n-1} (R^{n-1} + (n-1) r int_0^1 (r rho + R)^{n-2} / sqrt(1 - rho^2) d rho)`.
///
/// Accepts the degenerate limits `r = 0` (two flat disks) and `R = 0` (a ball).
pub fn cookie_perimeter(r: f64, big_r: f64, n: usize) -> Result<f64> {
    require_nonnegative("r", r)?;
    require_nonnegative("R", big_r)?;
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "cookie dimension must be >= 2, got {n}"
        )));
    }
    Ok(perimeter_unchecked(r, big_r, n))
}

fn perimeter_unchecked(r: f64, big_r: f64, n: usize) -> f64 {
    let omega = unit_ball_volume(n - 1);
    let flat = big_r.powi(n as i32 - 1);
    // rho = sin(theta) removes the endpoint singularity
    let rim_integral = if n == 2 {
        FRAC_PI_2
    } else {
        let scale = (r + big_r).powi(n as i32 - 2);
        adaptive_simpson(
            &|theta: f64| (r * theta.sin() + big_r).powi(n as i32 - 2),
            0.0,
            FRAC_PI_2,
            1e-15 * scale.max(f64::MIN_POSITIVE),
        )
    };
    2.0 * omega * (flat + (n - 1) as f64 * r * rim_integral)
}

/// Flat radius `R` such that the cookie with rim `r` has perimeter `target`.
///
/// In the plane `R = (P - 2 pi r)/4`. Otherwise bisection on the monotone
/// map `R -> P(C_{r,R})`, stopped once the perimeter matches to `1e-10`
/// relative.
pub fn solve_cookie_radius(target: f64, r: f64, n: usize) -> Result<f64> {
    require_positive("perimeter", target)?;
    require_positive("r", r)?;
    let lower_bound = cookie_perimeter(r, 0.0, n)?;
    if !(target > lower_bound) {
        return Err(Error::InfeasiblePerimeter {
            target,
            lower_bound,
            r,
        });
    }
    if n == 2 {
        return Ok((target - 2.0 * PI * r) / 4.0);
    }
    let tol = 1e-10 * target;
    let mut lo = 0.0;
    let mut hi = r.max(1.0);
    while perimeter_unchecked(r, hi, n) < target {
        lo = hi;
        hi *= 2.0;
    }
    let mut best = hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p = perimeter_unchecked(r, mid, n);
        best = mid;
        if (p - target).abs() <= tol || mid == lo || mid == hi {
            break;
        }
        if p < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Planar cookie boundary. Flat sides carry `H = 0`, caps carry `H = 1/r`;
/// samples are allotted to pieces in proportion to length, with the midpoint
/// rule on each piece so the piece weights are exact.
pub fn cookie_boundary(spec: &CookieSpec, n_samples: usize) -> Result<BoundaryMesh> {
    if spec.n != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: spec.n,
        });
    }
    if n_samples < 16 {
        return Err(Error::InvalidInput(format!(
            "cookie boundary needs at least 16 samples, got {n_samples}"
        )));
    }
    let (r, big_r) = (spec.r, spec.big_r);
    let flat_len = 2.0 * big_r;
    let cap_len = PI * r;
    let total = 2.0 * (flat_len + cap_len);
    let per_piece = |len: f64| ((n_samples as f64 * len / total).round() as usize).max(4);
    let n_flat = per_piece(flat_len);
    let n_cap = per_piece(cap_len);

    let mut samples = Vec::with_capacity(2 * (n_flat + n_cap));
    // counterclockwise: top (right to left), left cap, bottom, right cap
    let w_flat = flat_len / n_flat as f64;
    let w_cap = cap_len / n_cap as f64;
    for i in 0..n_flat {
        let x = big_r - (i as f64 + 0.5) * w_flat;
        samples.push(flat_sample(x, r, w_flat));
    }
    for i in 0..n_cap {
        let phi = FRAC_PI_2 + (i as f64 + 0.5) * PI / n_cap as f64;
        samples.push(cap_sample(-big_r, r, phi, w_cap));
    }
    for i in 0..n_flat {
        let x = -big_r + (i as f64 + 0.5) * w_flat;
        samples.push(flat_sample(x, -r, w_flat));
    }
    for i in 0..n_cap {
        let phi = -FRAC_PI_2 + (i as f64 + 0.5) * PI / n_cap as f64;
        samples.push(cap_sample(big_r, r, phi, w_cap));
    }
    BoundaryMesh::new(2, samples, format!("cookie(r={r},R={big_r})"))
}

fn flat_sample(x: f64, y: f64, weight: f64) -> Sample {
    Sample {
        position: [x, y, 0.0],
        weight,
        curvature: 0.0,
    }
}

fn cap_sample(cx: f64, r: f64, phi: f64, weight: f64) -> Sample {
    let (s, c) = phi.sin_cos();
    Sample {
        position: [cx + r * c, r * s, 0.0],
        weight,
        curvature: 1.0 / r,
    }
}
