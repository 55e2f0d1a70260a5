//! The pointwise optimality cubic `P_k(y) = k y^3 - y + a`, with
//! `a = eps H / beta` and `y = 1 + beta mu`.
//!
//! For `a < 1 - k` we have `P_k(1) < 0`, and `P_k` is increasing on
//! `[max(1/sqrt(3k), 1), inf)` where it attains its minimum over `y >= 1`.
//! Hence exactly one root lies in `(1, inf)` and it sits right of that
//! lower bracket.

use crate::error::{require_positive, Error, Result};

/// Width (relative) at which bisection hands over to Newton.
const BISECTION_RTOL: f64 = 1e-6;
const MAX_BISECTION: usize = 200;
const MAX_NEWTON: usize = 60;

#[inline]
pub fn cubic_residual(k: f64, a: f64, y: f64) -> f64 {
    (k * y * y - 1.0) * y + a
}

/// Left end of the proven root bracket, `max(1/sqrt(3k), 1)`.
pub fn lower_bracket(k: f64) -> f64 {
    (1.0 / (3.0 * k).sqrt()).max(1.0)
}

/// Unique root `y_k` of `k y^3 - y + a` in `(1, inf)`.
///
/// The boundary case `a = 1 - k` returns `y = 1` (zero thickness); points
/// with `a > 1 - k` are inactive and yield [`Error::InactivePoint`].
pub fn cubic_root_yk(k: f64, a: f64) -> Result<f64> {
    require_positive("k", k)?;
    check_active(k, a)?;
    if a == 1.0 - k {
        return Ok(1.0);
    }
    let lo = lower_bracket(k);
    let mut hi = 2.0 * lo;
    while cubic_residual(k, a, hi) < 0.0 {
        hi *= 2.0;
    }
    Ok(solve_in_bracket(k, a, lo, hi))
}

/// As [`cubic_root_yk`] with a caller-supplied right bracket (`z_k`), which
/// the result never exceeds.
pub fn cubic_root_bracketed(k: f64, a: f64, upper: f64) -> Result<f64> {
    require_positive("k", k)?;
    check_active(k, a)?;
    if a == 1.0 - k {
        return Ok(1.0);
    }
    let lo = lower_bracket(k);
    Ok(solve_in_bracket(k, a, lo, upper.max(lo)))
}

fn check_active(k: f64, a: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "must be finite",
        });
    }
    let bound = 1.0 - k;
    if a > bound {
        return Err(Error::InactivePoint { a, bound });
    }
    Ok(())
}

/// Bisection to `BISECTION_RTOL`, then bracket-safeguarded Newton.
fn solve_in_bracket(k: f64, a: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..MAX_BISECTION {
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if cubic_residual(k, a, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON {
        let p = cubic_residual(k, a, y);
        if p == 0.0 {
            break;
        }
        if p < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let slope = 3.0 * k * y * y - 1.0;
        let mut next = y - p / slope;
        if !(next >= lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - y).abs() <= 2.0 * f64::EPSILON * y;
        y = next;
        if done {
            break;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_ok(k: f64, a: f64, y: f64) -> bool {
        cubic_residual(k, a, y).abs() <= 1e-14 * (k * y * y * y).max(1.0)
    }

    #[test]
    fn flat_point_has_closed_form_root() {
        let y = cubic_root_yk(0.25, 0.0).unwrap();
        assert!((y - 2.0).abs() < 1e-15);
    }

    #[test]
    fn activity_boundary_gives_unit_root() {
        assert_eq!(cubic_root_yk(0.4, 0.6).unwrap(), 1.0);
    }

    #[test]
    fn inactive_point_signalled() {
        assert!(matches!(
            cubic_root_yk(0.5, 0.6),
            Err(Error::InactivePoint { .. })
        ));
        assert!(cubic_root_yk(0.0, 0.1).is_err());
    }

    #[test]
    fn reference_root() {
        // bisection oracle on [1/sqrt(1.5), z] with z from doubling
        let (k, a) = (0.5, 0.3);
        let (mut lo, mut hi) = (1.0 / 1.5f64.sqrt(), 4.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if k * mid * mid * mid - mid + a < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = cubic_root_yk(k, a).unwrap();
        assert!((y - lo).abs() < 1e-14);
        assert!((y - 1.2297).abs() < 1e-4);
        assert!(residual_ok(k, a, y));
    }

    #[test]
    fn residual_and_bracket_over_a_grid() {
        for ki in 1..50 {
            let k = ki as f64 / 50.0;
            for ai in -20..20 {
                let a = ai as f64 / 25.0;
                if a >= 1.0 - k {
                    continue;
                }
                let y = cubic_root_yk(k, a).unwrap();
                assert!(y >= 1.0, "k={k} a={a}");
                assert!(y >= lower_bracket(k));
                assert!(residual_ok(k, a, y), "k={k} a={a} y={y}");
            }
        }
    }

    #[test]
    fn negative_curvature_and_large_k() {
        // k >= 1 is reachable when some eps H / beta < 0
        let y = cubic_root_yk(1.2, -0.5).unwrap();
        assert!(y > 1.0 && residual_ok(1.2, -0.5, y));
    }

    #[test]
    fn tiny_k_roots_are_large() {
        let k = 1e-9;
        let y = cubic_root_yk(k, 0.1).unwrap();
        assert!(y > 1e4);
        assert!(residual_ok(k, 0.1, y));
    }

    #[test]
    fn bracketed_root_respects_upper() {
        let k = 0.45;
        let z = cubic_root_yk(k, 0.1).unwrap();
        for a in [0.1, 0.2, 0.3, 0.5] {
            let y = cubic_root_bracketed(k, a, z).unwrap();
            assert!(y <= z);
            assert!(residual_ok(k, a, y));
        }
    }
}
