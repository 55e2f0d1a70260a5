use serde::Serialize;

use super::mesh::BoundaryMesh;
use crate::error::{Error, Result};
use crate::numerics::unit_ball_volume;

/// Equality gap below which a body is considered a ball.
pub const AF_EQUALITY_TOL: f64 = 1e-8;

/// Quermassintegral `W_j` of a smooth convex body from its boundary mesh.
///
/// `W_1 = P/n` and `W_2 = (1/(n(n-1))) * int H`; higher orders need the
/// individual principal curvatures and are not available.
pub fn quermassintegral(mesh: &BoundaryMesh, j: usize) -> Result<f64> {
    let n = mesh.dimension() as f64;
    match j {
        1 => Ok(mesh.perimeter() / n),
        2 => Ok(mesh.curvature_integral() / (n * (n - 1.0))),
        _ => Err(Error::UnsupportedQuermass(j)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlexandrovFenchelReport {
    /// `(W_1/omega_3)^(1/2)`
    pub lhs: f64,
    /// `W_2/omega_3`
    pub rhs: f64,
    pub satisfied: bool,
    /// `rhs - lhs`; zero exactly for balls.
    pub equality_gap: f64,
}

/// Checks `(W_1/omega_3)^(1/2) <= W_2/omega_3` on a convex surface in `R^3`.
pub fn alexandrov_fenchel_check(mesh: &BoundaryMesh) -> Result<AlexandrovFenchelReport> {
    if mesh.dimension() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            got: mesh.dimension(),
        });
    }
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let min_h = mesh.min_curvature().unwrap_or(0.0);
    if min_h < 0.0 {
        return Err(Error::Nonconvex { min_h });
    }
    let omega = unit_ball_volume(3);
    let lhs = (quermassintegral(mesh, 1)? / omega).sqrt();
    let rhs = quermassintegral(mesh, 2)? / omega;
    let gap = rhs - lhs;
    Ok(AlexandrovFenchelReport {
        lhs,
        rhs,
        satisfied: lhs <= rhs + AF_EQUALITY_TOL * rhs.abs().max(1.0),
        equality_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circle_mesh, discretize_sphere, spheroid_mesh};
    use std::f64::consts::PI;

    #[test]
    fn sphere_quermassintegrals() {
        let m = discretize_sphere(1.0, 16).unwrap();
        assert!((quermassintegral(&m, 1).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((quermassintegral(&m, 2).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(quermassintegral(&m, 3).is_err());
        assert!(quermassintegral(&m, 0).is_err());
    }

    #[test]
    fn circle_quermassintegrals() {
        let m = circle_mesh(1.0, 128).unwrap();
        assert!((quermassintegral(&m, 1).unwrap() - PI).abs() < 1e-13);
        assert!((quermassintegral(&m, 2).unwrap() - PI).abs() < 1e-13);
    }

    #[test]
    fn quermassintegrals_are_homogeneous() {
        let m = spheroid_mesh(1.0, 1.7, 40, 20).unwrap();
        let t = 2.5;
        let s = m.scaled(t).unwrap();
        let w1 = quermassintegral(&m, 1).unwrap();
        let w2 = quermassintegral(&m, 2).unwrap();
        assert!((quermassintegral(&s, 1).unwrap() - t * t * w1).abs() < 1e-12 * w1);
        assert!((quermassintegral(&s, 2).unwrap() - t * w2).abs() < 1e-12 * w2);
    }

    #[test]
    fn equality_for_spheres() {
        for (r, expect) in [(1.0, 1.0), (3.0, 3.0)] {
            let rep = alexandrov_fenchel_check(&discretize_sphere(r, 24).unwrap()).unwrap();
            assert!((rep.lhs - expect).abs() < 1e-8);
            assert!((rep.rhs - expect).abs() < 1e-8);
            assert!(rep.satisfied);
            assert!(rep.equality_gap.abs() < 1e-8);
        }
    }

    #[test]
    fn strict_for_prolate_spheroid() {
        let rep = alexandrov_fenchel_check(&spheroid_mesh(1.0, 2.0, 64, 32).unwrap()).unwrap();
        assert!(rep.satisfied);
        assert!(rep.equality_gap > 1e-3);
    }

    #[test]
    fn planar_mesh_rejected() {
        let m = circle_mesh(1.0, 32).unwrap();
        assert!(matches!(
            alexandrov_fenchel_check(&m),
            Err(Error::WrongDimension { .. })
        ));
    }
}
