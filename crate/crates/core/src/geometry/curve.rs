//! Closed planar curves sampled at uniform parameter.
//!
//! The composite trapezoid rule on a periodic smooth integrand converges
//! spectrally, so a few hundred samples already give perimeters and
//! curvature integrals to machine precision.

use std::f64::consts::TAU;

use super::mesh::{BoundaryMesh, Sample};
use crate::error::{require_positive, Error, Result};

/// Position and its first two parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub point: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

/// A closed `C^2` curve parametrized counterclockwise over `[0, 2pi)`.
pub trait ClosedCurve {
    fn jet(&self, t: f64) -> CurveJet;

    fn tag(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub radius: f64,
}

impl ClosedCurve for Circle {
    fn jet(&self, t: f64) -> CurveJet {
        let (s, c) = t.sin_cos();
        let r = self.radius;
        CurveJet {
            point: [r * c, r * s],
            d1: [-r * s, r * c],
            d2: [-r * c, -r * s],
        }
    }

    fn tag(&self) -> String {
        format!("circle(R={})", self.radius)
    }
}

/// Axis-aligned ellipse with semi-axes `a` (x) and `b` (y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
}

impl ClosedCurve for Ellipse {
    fn jet(&self, t: f64) -> CurveJet {
        let (s, c) = t.sin_cos();
        CurveJet {
            point: [self.a * c, self.b * s],
            d1: [-self.a * s, self.b * c],
            d2: [-self.a * c, -self.b * s],
        }
    }

    fn tag(&self) -> String {
        format!("ellipse(a={},b={})", self.a, self.b)
    }
}

/// Star-shaped curve `r(theta) = base * (1 + amplitude * cos(lobes * theta))`.
///
/// Nonconvex once `amplitude * (1 + lobes^2) > 1`, which exercises the
/// negative-curvature paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCurve {
    pub base: f64,
    pub amplitude: f64,
    pub lobes: u32,
}

impl ClosedCurve for PolarCurve {
    fn jet(&self, t: f64) -> CurveJet {
        let k = self.lobes as f64;
        let (sk, ck) = (k * t).sin_cos();
        let r = self.base * (1.0 + self.amplitude * ck);
        let dr = -self.base * self.amplitude * k * sk;
        let ddr = -self.base * self.amplitude * k * k * ck;
        let (s, c) = t.sin_cos();
        CurveJet {
            point: [r * c, r * s],
            d1: [dr * c - r * s, dr * s + r * c],
            d2: [
                ddr * c - 2.0 * dr * s - r * c,
                ddr * s + 2.0 * dr * c - r * s,
            ],
        }
    }

    fn tag(&self) -> String {
        format!(
            "polar(base={},amplitude={},lobes={})",
            self.base, self.amplitude, self.lobes
        )
    }
}

/// Samples a closed curve at `n` uniform parameter values.
///
/// Each sample gets weight `|c'(t_i)| * 2pi/n` and signed curvature
/// `(x'y'' - y'x'') / |c'|^3`, which is `+1/R` on a counterclockwise circle.
pub fn discretize_parametric_curve(curve: &dyn ClosedCurve, n: usize) -> Result<BoundaryMesh> {
    if n < 16 {
        return Err(Error::InvalidInput(format!(
            "closed curves need at least 16 samples, got {n}"
        )));
    }
    let dt = TAU / n as f64;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * dt;
        let j = curve.jet(t);
        let speed = j.d1[0].hypot(j.d1[1]);
        if !(speed >= 1e-12) {
            return Err(Error::DegenerateTangent { t, speed });
        }
        let cross = j.d1[0] * j.d2[1] - j.d1[1] * j.d2[0];
        samples.push(Sample {
            position: [j.point[0], j.point[1], 0.0],
            weight: speed * dt,
            curvature: cross / (speed * speed * speed),
        });
    }
    BoundaryMesh::new(2, samples, curve.tag())
}

pub fn circle_mesh(radius: f64, n: usize) -> Result<BoundaryMesh> {
    require_positive("radius", radius)?;
    discretize_parametric_curve(&Circle { radius }, n)
}

pub fn ellipse_mesh(a: f64, b: f64, n: usize) -> Result<BoundaryMesh> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    discretize_parametric_curve(&Ellipse { a, b }, n)
}
