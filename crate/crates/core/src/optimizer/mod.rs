//! Mass-constrained minimization of `G_eps` over thickness fields.
//!
//! For a multiplier `k` each sample with `eps H / beta < 1 - k` gets the
//! thickness `(y_k - 1)/beta`, where `y_k` is the root of the pointwise
//! cubic; the rest get zero. The total mass `M(k)` is continuous and
//! strictly decreasing from `+inf` (as `k -> 0`) to `0` (as `k -> k0`), so
//! a bisection on `k` hits any budget.

mod cubic;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cubic::{cubic_residual, cubic_root_bracketed, cubic_root_yk, lower_bracket};

use crate::error::{Error, Regime, Result};
use crate::functionals::{eval_geps, PhysicsParams, ThicknessField};
use crate::geometry::BoundaryMesh;
use crate::numerics::pairwise_sum_by;

/// Largest `sup eps H / beta` for which the minimizer is known to be unique.
pub const INTERIOR_RATIO_MAX: f64 = 2.0 / 3.0;
/// Smallest `inf eps H / beta` for which no insulation is optimal.
pub const NO_INSULATION_RATIO_MIN: f64 = 2.0;
/// Acceptable `|M(k_m) - m| / m`.
pub const MASS_RTOL: f64 = 1e-8;
const MAX_K_ITERATIONS: usize = 200;

/// Multiplier together with the quantities it induces on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierState {
    pub k: f64,
    /// `1 - eps H_0 / beta` with `H_0` the smallest sample curvature.
    pub k0: f64,
    /// Samples with `eps H / beta < 1 - k`, in mesh order.
    pub active_set: Vec<usize>,
}

impl MultiplierState {
    pub fn new(mesh: &BoundaryMesh, params: &PhysicsParams, k: f64) -> Result<Self> {
        let k0 = multiplier_upper_bound(mesh, params)?;
        if !(k > 0.0 && k < k0) {
            return Err(Error::MultiplierOutOfRange { k, k0 });
        }
        let bound = 1.0 - k;
        let active_set = (0..mesh.len())
            .filter(|&i| params.curvature_ratio(mesh.curvature(i)) < bound)
            .collect();
        Ok(Self { k, k0, active_set })
    }
}

/// `k0 = 1 - eps H_0 / beta`.
pub fn multiplier_upper_bound(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<f64> {
    let h0 = mesh.min_curvature().ok_or(Error::EmptyMesh)?;
    Ok(1.0 - params.curvature_ratio(h0))
}

/// Regime from the range of `eps H / beta` over the samples.
pub fn classify_regime(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<Regime> {
    let (lo, hi) = ratio_range(mesh, params)?;
    Ok(if hi <= INTERIOR_RATIO_MAX {
        Regime::Interior
    } else if lo >= NO_INSULATION_RATIO_MIN {
        Regime::NoInsulation
    } else {
        Regime::OutsideTheory
    })
}

fn ratio_range(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<(f64, f64)> {
    let lo = mesh.min_curvature().ok_or(Error::EmptyMesh)?;
    let hi = mesh.max_curvature().ok_or(Error::EmptyMesh)?;
    Ok((params.curvature_ratio(lo), params.curvature_ratio(hi)))
}

/// Thickness `mu_k`: `(y_k - 1)/beta` on the active set, zero elsewhere.
pub fn mu_of_k(mesh: &BoundaryMesh, params: &PhysicsParams, k: f64) -> Result<ThicknessField> {
    let k0 = multiplier_upper_bound(mesh, params)?;
    if !(k > 0.0 && k < k0) {
        return Err(Error::MultiplierOutOfRange { k, k0 });
    }
    // every root is bounded by the one at the flattest point
    let z_k = cubic_root_yk(k, 1.0 - k0)?;
    let beta = params.beta;
    let values = (0..mesh.len())
        .into_par_iter()
        .with_min_len(128)
        .map(|i| {
            let a = params.curvature_ratio(mesh.curvature(i));
            if a < 1.0 - k {
                Ok((cubic_root_bracketed(k, a, z_k)? - 1.0) / beta)
            } else {
                Ok(0.0)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    ThicknessField::new(mesh, values)
}

/// `M(k) = sum_i w_i mu_k(i)`.
pub fn mass_of_k(mesh: &BoundaryMesh, params: &PhysicsParams, k: f64) -> Result<f64> {
    Ok(mu_of_k(mesh, params, k)?.mass())
}

/// Multiplier `k_m` with `M(k_m) = m`.
///
/// Bisection on `[k0 * 1e-9, k0 * (1 - 1e-9)]`, widened toward the ends if
/// the budget lies outside, and run until the bracket collapses so that the
/// mass residual sits at rounding level.
pub fn solve_k_m(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<f64> {
    let (lo_ratio, hi_ratio) = ratio_range(mesh, params)?;
    if hi_ratio > INTERIOR_RATIO_MAX {
        return Err(Error::OutsideTheory {
            min_ratio: lo_ratio,
            max_ratio: hi_ratio,
        });
    }
    let m = params.mass;
    let k0 = 1.0 - lo_ratio;
    let mass = |k: f64| mass_of_k(mesh, params, k);

    let mut lo = k0 * 1e-9;
    let mut widen = 0;
    while mass(lo)? < m {
        lo *= 1e-3;
        widen += 1;
        if widen > 30 || lo == 0.0 {
            return Err(Error::NoConvergence {
                lo,
                hi: k0,
                residual: (mass(lo.max(f64::MIN_POSITIVE))? - m).abs(),
            });
        }
    }
    let mut hi = k0 * (1.0 - 1e-9);
    widen = 0;
    while mass(hi)? > m {
        let next = k0 - (k0 - hi) * 1e-3;
        if next >= k0 || widen > 12 {
            return Err(Error::NoConvergence {
                lo,
                hi,
                residual: (mass(hi)? - m).abs(),
            });
        }
        hi = next;
        widen += 1;
    }

    let mut best = (f64::INFINITY, lo);
    for k in [lo, hi] {
        let r = (mass(k)? - m).abs();
        if r < best.0 {
            best = (r, k);
        }
    }
    for _ in 0..MAX_K_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mm = mass(mid)?;
        let r = (mm - m).abs();
        if r < best.0 {
            best = (r, mid);
        }
        if mm == m {
            break;
        }
        if mm > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.0 > MASS_RTOL * m {
        return Err(Error::NoConvergence {
            lo,
            hi,
            residual: best.0,
        });
    }
    Ok(best.1)
}

/// Spread of the Euler-Lagrange constant `c = beta (1 + beta mu - a)/(1 + beta mu)^3`
/// over the samples carrying insulation. At the optimum `c = beta k_m` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    pub c_mean: f64,
    pub c_variance: f64,
    /// `max_i |k y_i^3 - y_i + a_i|` with `k = c_mean / beta`, `y_i = 1 + beta mu_i`.
    pub max_pointwise_residual: f64,
}

pub fn el_residual(
    mesh: &BoundaryMesh,
    params: &PhysicsParams,
    mu: &ThicknessField,
) -> Result<ElResidual> {
    if mu.len() != mesh.len() {
        return Err(Error::Misaligned {
            expected: mesh.len(),
            got: mu.len(),
        });
    }
    let beta = params.beta;
    let active: Vec<usize> = (0..mesh.len()).filter(|&i| mu.values()[i] > 0.0).collect();
    if active.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let ys: Vec<f64> = active
        .iter()
        .map(|&i| 1.0 + beta * mu.values()[i])
        .collect();
    let ratios: Vec<f64> = active
        .iter()
        .map(|&i| params.curvature_ratio(mesh.curvature(i)))
        .collect();
    let cs: Vec<f64> = ys
        .iter()
        .zip(&ratios)
        .map(|(y, a)| beta * (y - a) / (y * y * y))
        .collect();
    let n = cs.len() as f64;
    let c_mean = pairwise_sum_by(cs.len(), |j| cs[j]) / n;
    let c_variance = pairwise_sum_by(cs.len(), |j| (cs[j] - c_mean).powi(2)) / n;
    let k = c_mean / beta;
    let max_pointwise_residual = ys
        .iter()
        .zip(&ratios)
        .map(|(&y, &a)| cubic_residual(k, a, y).abs())
        .fold(0.0, f64::max);
    Ok(ElResidual {
        c_mean,
        c_variance,
        max_pointwise_residual,
    })
}

/// Optimizer output.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalLayer {
    pub regime: Regime,
    /// Solved multiplier; absent when no insulation is optimal.
    pub k_m: Option<f64>,
    pub mu: ThicknessField,
    /// `G_eps(mu)`.
    pub value: f64,
    /// `|M(k_m) - m|`, zero in the no-insulation regime.
    pub mass_residual: f64,
    pub el: Option<ElResidual>,
    pub active_set: Vec<usize>,
}

impl OptimalLayer {
    pub fn el_constant_variance(&self) -> f64 {
        self.el.map_or(0.0, |e| e.c_variance)
    }

    pub fn report(&self) -> OptimizerReport {
        OptimizerReport {
            k_m: self.k_m,
            value: self.value,
            mass_residual: self.mass_residual,
            el: self.el.map(|e| ElSummary {
                c_mean: e.c_mean,
                c_variance: e.c_variance,
            }),
            regime: self.regime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElSummary {
    pub c_mean: f64,
    pub c_variance: f64,
}

/// JSON form of [`OptimalLayer`] without the field itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub k_m: Option<f64>,
    pub value: f64,
    pub mass_residual: f64,
    pub el: Option<ElSummary>,
    pub regime: Regime,
}

/// Minimizes `G_eps` over nonnegative fields of mass at most `m`.
///
/// Dispatches on the range of `eps H / beta`: the multiplier solution when
/// its supremum is at most 2/3, the empty layer when its infimum is at least
/// 2, and an [`Error::OutsideTheory`] otherwise.
pub fn optimize(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<OptimalLayer> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let (beta, eps) = (params.beta, params.eps);
    match classify_regime(mesh, params)? {
        Regime::Interior => {
            let k_m = solve_k_m(mesh, params)?;
            let state = MultiplierState::new(mesh, params, k_m)?;
            let mu = mu_of_k(mesh, params, k_m)?;
            let value = eval_geps(mesh, &mu, beta, eps)?;
            let mass_residual = (mu.mass() - params.mass).abs();
            let el = el_residual(mesh, params, &mu).ok();
            Ok(OptimalLayer {
                regime: Regime::Interior,
                k_m: Some(k_m),
                mu,
                value,
                mass_residual,
                el,
                active_set: state.active_set,
            })
        }
        Regime::NoInsulation => {
            let mu = ThicknessField::zeros(mesh);
            let value = eval_geps(mesh, &mu, beta, eps)?;
            Ok(OptimalLayer {
                regime: Regime::NoInsulation,
                k_m: None,
                mu,
                value,
                mass_residual: 0.0,
                el: None,
                active_set: Vec::new(),
            })
        }
        Regime::OutsideTheory => {
            let (min_ratio, max_ratio) = ratio_range(mesh, params)?;
            Err(Error::OutsideTheory {
                min_ratio,
                max_ratio,
            })
        }
    }
}
