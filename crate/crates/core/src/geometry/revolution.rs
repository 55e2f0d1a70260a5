//! Surfaces of revolution about the z axis.
//!
//! Profiles are described by the squared radius `g(z) = f(z)^2` rather than
//! `f` itself. For a closed body `f` has square-root singularities at the
//! poles while `g` stays smooth, and both the area element and the principal
//! curvatures are smooth functions of `g, g', g''`:
//!
//! ```text
//! S        = 4 g + g'^2
//! dA       = 2pi * sqrt(S) / 2 dz
//! kappa_p  = 2 / sqrt(S)                       (parallel)
//! kappa_m  = -2 (2 g g'' - g'^2) / S^(3/2)     (meridian)
//! ```

use std::f64::consts::TAU;

use super::mesh::{BoundaryMesh, Sample};
use crate::error::{require_positive, Error, Result};
use crate::numerics::gauss_legendre;

/// Meridian profile of a body of revolution.
pub trait RevolutionProfile {
    /// Closed interval of the axis covered by the body.
    fn z_range(&self) -> (f64, f64);

    /// Squared radius and its first two derivatives at `z`.
    fn squared_radius(&self, z: f64) -> [f64; 3];

    fn tag(&self) -> String;
}

/// Spheroid with equatorial semi-axis `a` and polar semi-axis `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spheroid {
    pub a: f64,
    pub c: f64,
}

impl RevolutionProfile for Spheroid {
    fn z_range(&self) -> (f64, f64) {
        (-self.c, self.c)
    }

    fn squared_radius(&self, z: f64) -> [f64; 3] {
        let a2 = self.a * self.a;
        let c2 = self.c * self.c;
        [a2 * (1.0 - z * z / c2), -2.0 * a2 * z / c2, -2.0 * a2 / c2]
    }

    fn tag(&self) -> String {
        if self.a == self.c {
            format!("sphere(R={})", self.a)
        } else {
            format!("spheroid(a={},c={})", self.a, self.c)
        }
    }
}

/// Tensor-product quadrature: `n_z` Gauss-Legendre nodes along the axis
/// times `n_theta` uniform angles.
pub fn discretize_surface_of_revolution(
    profile: &dyn RevolutionProfile,
    n_z: usize,
    n_theta: usize,
) -> Result<BoundaryMesh> {
    if n_z < 2 || n_theta < 3 {
        return Err(Error::InvalidInput(format!(
            "surface of revolution needs n_z >= 2 and n_theta >= 3, got {n_z} x {n_theta}"
        )));
    }
    let (z0, z1) = profile.z_range();
    if !(z1 > z0) {
        return Err(Error::InvalidInput(format!(
            "empty axis range [{z0}, {z1}]"
        )));
    }
    // Interior scan catches pinches that fall between quadrature nodes.
    const SCAN: usize = 1024;
    for k in 1..SCAN {
        let z = z0 + (z1 - z0) * k as f64 / SCAN as f64;
        if !(profile.squared_radius(z)[0] > 0.0) {
            return Err(Error::ProfileTouchesAxis { z });
        }
    }
    let half = 0.5 * (z1 - z0);
    let mid = 0.5 * (z1 + z0);
    let (nodes, weights) = gauss_legendre(n_z);
    let dtheta = TAU / n_theta as f64;
    let mut samples = Vec::with_capacity(n_z * n_theta);
    for (x, w) in nodes.iter().zip(&weights) {
        let z = mid + half * x;
        let [g, dg, ddg] = profile.squared_radius(z);
        if !(g > 0.0) {
            return Err(Error::ProfileTouchesAxis { z });
        }
        let s = 4.0 * g + dg * dg;
        let root_s = s.sqrt();
        let kappa_parallel = 2.0 / root_s;
        let kappa_meridian = -2.0 * (2.0 * g * ddg - dg * dg) / (s * root_s);
        let ring_weight = 0.5 * root_s * half * w * dtheta;
        let f = g.sqrt();
        for j in 0..n_theta {
            let (st, ct) = (j as f64 * dtheta).sin_cos();
            samples.push(Sample {
                position: [f * ct, f * st, z],
                weight: ring_weight,
                curvature: kappa_parallel + kappa_meridian,
            });
        }
    }
    BoundaryMesh::new(3, samples, profile.tag())
}

/// Sphere of radius `radius` with `n` latitude nodes and `2n` longitudes.
///
/// Area and curvature are exact up to rounding for any `n >= 2`: the sphere's
/// area element is uniform in `z`.
pub fn discretize_sphere(radius: f64, n: usize) -> Result<BoundaryMesh> {
    require_positive("radius", radius)?;
    discretize_surface_of_revolution(
        &Spheroid {
            a: radius,
            c: radius,
        },
        n,
        2 * n,
    )
}

pub fn spheroid_mesh(a: f64, c: f64, n_z: usize, n_theta: usize) -> Result<BoundaryMesh> {
    require_positive("a", a)?;
    require_positive("c", c)?;
    discretize_surface_of_revolution(&Spheroid { a, c }, n_z, n_theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    struct Dumbbell;

    impl RevolutionProfile for Dumbbell {
        fn z_range(&self) -> (f64, f64) {
            (-1.0, 1.0)
        }

        // f(z) = |z| sqrt(1 - z^2) pinches to the axis at z = 0
        fn squared_radius(&self, z: f64) -> [f64; 3] {
            let z2 = z * z;
            [z2 * (1.0 - z2), 2.0 * z - 4.0 * z2 * z, 2.0 - 12.0 * z2]
        }

        fn tag(&self) -> String {
            "dumbbell".into()
        }
    }

    #[test]
    fn unit_sphere_area_and_curvature() {
        for n in [2, 7, 32] {
            let m = discretize_sphere(1.0, n).unwrap();
            assert!((m.perimeter() - 4.0 * PI).abs() < 1e-12, "n={n}");
            assert!(m
                .samples()
                .iter()
                .all(|s| (s.curvature - 2.0).abs() < 1e-14));
        }
    }

    #[test]
    fn sphere_radius_two() {
        let m = discretize_sphere(2.0, 16).unwrap();
        assert!((m.perimeter() - 16.0 * PI).abs() < 1e-11);
        assert!(m
            .samples()
            .iter()
            .all(|s| (s.curvature - 1.0).abs() < 1e-14));
    }

    #[test]
    fn sphere_rejects_nonpositive_radius() {
        assert!(discretize_sphere(0.0, 8).is_err());
        assert!(discretize_sphere(-1.0, 8).is_err());
    }

    #[test]
    fn prolate_spheroid_area_matches_closed_form() {
        let (a, c): (f64, f64) = (1.0, 2.0);
        let e = (1.0 - a * a / (c * c)).sqrt();
        let exact = TAU * a * a * (1.0 + c / (a * e) * e.asin());
        assert!((exact - 21.4784).abs() < 1e-4);
        let m = spheroid_mesh(a, c, 64, 32).unwrap();
        assert!((m.perimeter() - exact).abs() < 1e-10);
    }

    #[test]
    fn oblate_spheroid_is_convex() {
        let m = spheroid_mesh(2.0, 1.0, 48, 24).unwrap();
        assert!(m.min_curvature().unwrap() > 0.0);
        let (a, c): (f64, f64) = (2.0, 1.0);
        let e = (1.0 - c * c / (a * a)).sqrt();
        let exact = TAU * a * a * (1.0 + (1.0 - e * e) / e * e.atanh());
        assert!((m.perimeter() - exact).abs() < 1e-10);
    }

    #[test]
    fn pinched_profile_rejected() {
        for n_z in [8, 9] {
            let err = discretize_surface_of_revolution(&Dumbbell, n_z, 8).unwrap_err();
            assert!(matches!(err, Error::ProfileTouchesAxis { .. }));
        }
    }
}
