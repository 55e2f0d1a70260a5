//! Per-sample one-dimensional layer problems along the outer normal.
//!
//! For a sample with curvature `H` and thickness `h`, the fiber functional is
//! `eps int_0^T u'(t)^2 (1 + tH) dt + beta u(T)^2 (1 + TH)` with `T = eps h`
//! and `u(0) = 1`. Its minimizer has `u' = c/(1 + tH)`.

use rayon::prelude::*;

use super::{check_eps_list, ExpansionReport};
use crate::error::{require_positive, Error, Result};
use crate::functionals::{eval_f0, eval_f1, ThicknessField};
use crate::geometry::BoundaryMesh;
use crate::numerics::{log1p_over_x, pairwise_sum};

fn check_inputs(mesh: &BoundaryMesh, h: &ThicknessField, beta: f64, eps: f64) -> Result<()> {
    require_positive("beta", beta)?;
    require_positive("eps", eps)?;
    if h.len() != mesh.len() {
        return Err(Error::Misaligned {
            expected: mesh.len(),
            got: h.len(),
        });
    }
    for (i, &x) in h.values().iter().enumerate() {
        let jacobian = 1.0 + eps * x * mesh.curvature(i);
        if !(jacobian > 0.0) {
            return Err(Error::NonpositiveJacobian { index: i, jacobian });
        }
    }
    Ok(())
}

/// Weighted sum of per-sample values, evaluated in parallel and reduced in
/// a fixed order.
fn weighted_total(mesh: &BoundaryMesh, per_sample: impl Fn(usize) -> f64 + Sync) -> f64 {
    let terms: Vec<f64> = (0..mesh.len())
        .into_par_iter()
        .with_min_len(256)
        .map(|i| mesh.weight(i) * per_sample(i))
        .collect();
    pairwise_sum(&terms)
}

/// Minimum of one fiber functional.
fn fiber_minimum(curvature: f64, h: f64, beta: f64, eps: f64) -> f64 {
    let t = eps * h;
    let jac = 1.0 + t * curvature;
    // int_0^T dt/(1 + tH) = ln(1 + TH)/H
    let l = t * log1p_over_x(t * curvature);
    let c = -beta / (eps / jac + beta * l);
    let u_out = 1.0 + c * l;
    eps * c * c * l + beta * u_out * u_out * jac
}

/// Sum over samples of the minimal fiber energies.
pub fn fiber_energy(mesh: &BoundaryMesh, h: &ThicknessField, beta: f64, eps: f64) -> Result<f64> {
    check_inputs(mesh, h, beta, eps)?;
    let hv = h.values();
    Ok(weighted_total(mesh, |i| {
        fiber_minimum(mesh.curvature(i), hv[i], beta, eps)
    }))
}

/// Fiber energy of the explicit recovery profile.
///
/// Order 1 uses `u = 1 - beta t / (eps (1 + beta h))`; order 2 adds
/// `-beta H t^2 / (2 eps (1 + beta h)^2)`. Both are polynomials in `t`, so
/// the weighted integral is exact.
pub fn recovery_energy(
    mesh: &BoundaryMesh,
    h: &ThicknessField,
    beta: f64,
    eps: f64,
    order: u8,
) -> Result<f64> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidInput(format!(
            "recovery order must be 1 or 2, got {order}"
        )));
    }
    check_inputs(mesh, h, beta, eps)?;
    let hv = h.values();
    Ok(weighted_total(mesh, |i| {
        let (curv, x) = (mesh.curvature(i), hv[i]);
        let d = 1.0 + beta * x;
        let p = -beta / (eps * d);
        let q = if order == 2 {
            -beta * curv / (eps * d * d)
        } else {
            0.0
        };
        let t = eps * x;
        // int_0^T (p + q s)^2 (1 + H s) ds
        let bulk = t
            * (p * p
                + t * ((2.0 * p * q + p * p * curv) / 2.0
                    + t * ((q * q + 2.0 * p * q * curv) / 3.0 + t * q * q * curv / 4.0)));
        let u_out = 1.0 + t * (p + q * t / 2.0);
        eps * bulk + beta * u_out * u_out * (1.0 + t * curv)
    }))
}

/// Fiber energies over `eps_list`, fitted against `eval_F0 + eps eval_F1`.
pub fn fiber_expansion_check(
    mesh: &BoundaryMesh,
    h: &ThicknessField,
    beta: f64,
    eps_list: &[f64],
) -> Result<ExpansionReport> {
    check_eps_list(eps_list)?;
    let exact = eps_list
        .iter()
        .map(|&eps| fiber_energy(mesh, h, beta, eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpansionReport::build(
        eps_list,
        exact,
        eval_f0(mesh, h, beta)?,
        eval_f1(mesh, h, beta)?,
    ))
}
