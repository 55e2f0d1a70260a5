//! Studies built on the optimizer: thin cookie shapes approaching the
//! infimum at fixed perimeter, comparison against the disk of equal
//! perimeter, and where the optimal layer concentrates.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_positive, Error, Regime, Result};
use crate::functionals::{eval_geps, PhysicsParams, ThicknessField};
use crate::geometry::{
    circle_mesh, cookie_boundary, fmt17, solve_cookie_radius, BoundaryMesh, CookieSpec,
};
use crate::numerics::pairwise_sum_by;
use crate::optimizer::optimize;

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CookieRow {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// `G_eps` of the layer spread evenly over the flat part.
    pub g_eps: f64,
    /// `g_eps - beta P^2/(P + beta m)`.
    pub gap: f64,
    /// Optimal value on the same cookie, when it lies in the interior regime.
    pub optimizer_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CookieSweep {
    pub perimeter: f64,
    pub params: PhysicsParams,
    /// `beta P^2/(P + beta m)`, the zero-order infimum over all shapes.
    pub limit: f64,
    pub rows: Vec<CookieRow>,
}

impl CookieSweep {
    /// Columns `r,R,G_eps,gap,optimizer_value` (the last empty when absent).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "R", "G_eps", "gap", "optimizer_value"])?;
        for row in &self.rows {
            w.write_record([
                fmt17(row.r),
                fmt17(row.big_r),
                fmt17(row.g_eps),
                fmt17(row.gap),
                row.optimizer_value.map(fmt17).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Planar cookies of perimeter `perimeter` with rim radii `r_list`, each
/// carrying the whole budget uniformly on its flat sides and nothing on the
/// caps.
pub fn cookie_sweep(
    perimeter: f64,
    params: &PhysicsParams,
    r_list: &[f64],
    n_samples: usize,
) -> Result<CookieSweep> {
    require_positive("perimeter", perimeter)?;
    if r_list.is_empty() {
        return Err(Error::InvalidInput("empty r list".into()));
    }
    if r_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "r list must be strictly decreasing".into(),
        ));
    }
    let (beta, m) = (params.beta, params.mass);
    let limit = beta * perimeter * perimeter / (perimeter + beta * m);
    let rows = r_list
        .par_iter()
        .map(|&r| {
            let big_r = solve_cookie_radius(perimeter, r, 2)?;
            let mesh = cookie_boundary(&CookieSpec::new(r, big_r, 2)?, n_samples)?;
            let h = flat_part_layer(&mesh, m)?;
            let g_eps = eval_geps(&mesh, &h, beta, params.eps)?;
            let optimizer_value = match optimize(&mesh, params) {
                Ok(opt) => Some(opt.value),
                Err(Error::OutsideTheory { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(CookieRow {
                r,
                big_r,
                g_eps,
                gap: g_eps - limit,
                optimizer_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CookieSweep {
        perimeter,
        params: *params,
        limit,
        rows,
    })
}

/// Mass `m` spread uniformly over the samples with `H = 0`.
fn flat_part_layer(mesh: &BoundaryMesh, mass: f64) -> Result<ThicknessField> {
    let flat_length = pairwise_sum_by(mesh.len(), |i| {
        if mesh.curvature(i) == 0.0 {
            mesh.weight(i)
        } else {
            0.0
        }
    });
    if !(flat_length > 0.0) {
        return Err(Error::InvalidInput("cookie has no flat part".into()));
    }
    let h = mass / flat_length;
    let values = (0..mesh.len())
        .map(|i| if mesh.curvature(i) == 0.0 { h } else { 0.0 })
        .collect();
    ThicknessField::new(mesh, values)
}

/// Which size hypothesis of the disk comparison holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    /// `P >= 3 pi eps / beta`
    LargePerimeter,
    /// `P <= pi eps / beta`
    SmallPerimeter,
    NotMet,
}

impl Hypothesis {
    pub fn holds(self) -> bool {
        self != Hypothesis::NotMet
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallComparison {
    pub perimeter: f64,
    /// Radius `P / (2 pi)` of the comparison disk.
    pub ball_radius: f64,
    pub regime_shape: Regime,
    pub regime_ball: Regime,
    /// Optimal values; absent when either optimization falls outside the theory.
    pub g_shape: Option<f64>,
    pub g_ball: Option<f64>,
    pub hypothesis: Hypothesis,
    /// `g_shape <= g_ball + 1e-10`, checked only when a hypothesis holds
    /// and both values exist.
    pub satisfied: Option<bool>,
}

impl BallComparison {
    pub fn skipped(&self) -> bool {
        self.g_shape.is_none() || self.g_ball.is_none()
    }
}

pub const BALL_COMPARE_TOL: f64 = 1e-10;

/// Optimal value on a planar shape against the disk of the same perimeter.
pub fn ball_compare(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<BallComparison> {
    if mesh.dimension() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: mesh.dimension(),
        });
    }
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let perimeter = mesh.perimeter();
    let ball_radius = perimeter / (2.0 * PI);
    let ball = circle_mesh(ball_radius, mesh.len().max(16))?;
    let scale = PI * params.eps / params.beta;
    let hypothesis = if perimeter >= 3.0 * scale {
        Hypothesis::LargePerimeter
    } else if perimeter <= scale {
        Hypothesis::SmallPerimeter
    } else {
        Hypothesis::NotMet
    };

    let (regime_shape, g_shape) = optimal_value(mesh, params)?;
    let (regime_ball, g_ball) = optimal_value(&ball, params)?;
    let satisfied = match (g_shape, g_ball) {
        (Some(s), Some(b)) if hypothesis.holds() => Some(s <= b + BALL_COMPARE_TOL),
        _ => None,
    };
    Ok(BallComparison {
        perimeter,
        ball_radius,
        regime_shape,
        regime_ball,
        g_shape,
        g_ball,
        hypothesis,
        satisfied,
    })
}

fn optimal_value(mesh: &BoundaryMesh, params: &PhysicsParams) -> Result<(Regime, Option<f64>)> {
    match optimize(mesh, params) {
        Ok(opt) => Ok((opt.regime, Some(opt.value))),
        Err(Error::OutsideTheory { .. }) => Ok((Regime::OutsideTheory, None)),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub curvature: f64,
    pub mu: f64,
    pub active: bool,
}

/// Optimal thickness against curvature, sorted by curvature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationProfile {
    pub regime: Regime,
    pub points: Vec<ProfilePoint>,
    pub active_count: usize,
    /// Active samples whose thickness exceeds that of some active sample
    /// with strictly smaller curvature.
    pub violations: usize,
}

impl ConcentrationProfile {
    /// Columns `H,mu,active`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["H", "mu", "active"])?;
        for p in &self.points {
            w.write_record([
                fmt17(p.curvature),
                fmt17(p.mu),
                (p.active as u8).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Optimizes and checks that the thickness is non-increasing in `H` over
/// the active set. Curvatures closer than `1e-12 max|H|` count as equal.
pub fn concentration_profile(
    mesh: &BoundaryMesh,
    params: &PhysicsParams,
) -> Result<ConcentrationProfile> {
    let opt = optimize(mesh, params)?;
    let mu = opt.mu.values();
    let mut points: Vec<ProfilePoint> = (0..mesh.len())
        .map(|i| ProfilePoint {
            curvature: mesh.curvature(i),
            mu: mu[i],
            active: mu[i] > 0.0,
        })
        .collect();
    points.sort_by(|a, b| a.curvature.total_cmp(&b.curvature));
    let active: Vec<&ProfilePoint> = points.iter().filter(|p| p.active).collect();
    let violations = count_violations(&active);
    Ok(ConcentrationProfile {
        regime: opt.regime,
        active_count: active.len(),
        violations,
        points,
    })
}

fn count_violations(sorted: &[&ProfilePoint]) -> usize {
    let scale = sorted.iter().map(|p| p.curvature.abs()).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    // running min of mu over samples with curvature below H_j - tol
    let mut lower = 0;
    let mut running_min = f64::INFINITY;
    let mut count = 0;
    for p in sorted {
        while lower < sorted.len() && sorted[lower].curvature < p.curvature - tol {
            running_min = running_min.min(sorted[lower].mu);
            lower += 1;
        }
        if p.mu > running_min {
            count += 1;
        }
    }
    count
}
