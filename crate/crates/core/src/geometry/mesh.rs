use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::pairwise_sum_by;

/// One quadrature node on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Point in `R^n`; the trailing coordinate is zero when `n = 2`.
    pub position: [f64; 3],
    /// Boundary measure carried by the node (length in 2-D, area in 3-D).
    pub weight: f64,
    /// Mean curvature as the sum of principal curvatures, positive on convex parts.
    pub curvature: f64,
}

/// Quadrature discretization of a closed boundary.
///
/// Optimization and functional evaluation only read `(weight, curvature)`;
/// positions are kept for export.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    dimension: usize,
    samples: Vec<Sample>,
    shape_tag: String,
    perimeter: f64,
}

impl BoundaryMesh {
    pub fn new(
        dimension: usize,
        samples: Vec<Sample>,
        shape_tag: impl Into<String>,
    ) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(Error::InvalidInput(format!(
                "ambient dimension must be 2 or 3, got {dimension}"
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.weight.is_finite() && s.weight > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "sample {i} has non-positive weight {}",
                    s.weight
                )));
            }
            if !s.curvature.is_finite() || s.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {i} is not finite")));
            }
        }
        let perimeter = pairwise_sum_by(samples.len(), |i| samples[i].weight);
        Ok(Self {
            dimension,
            samples,
            shape_tag: shape_tag.into(),
            perimeter,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn shape_tag(&self) -> &str {
        &self.shape_tag
    }

    /// Total boundary measure `P(Omega)`.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.samples[i].weight
    }

    pub fn curvature(&self, i: usize) -> f64 {
        self.samples[i].curvature
    }

    /// `sum_i w_i H_i`, the quadrature of the mean curvature.
    pub fn curvature_integral(&self) -> f64 {
        pairwise_sum_by(self.len(), |i| {
            self.samples[i].weight * self.samples[i].curvature
        })
    }

    pub fn min_curvature(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.curvature).reduce(f64::min)
    }

    pub fn max_curvature(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.curvature).reduce(f64::max)
    }

    /// Image of the mesh under `x -> t x`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        crate::error::require_positive("scale", t)?;
        let wscale = t.powi(self.dimension as i32 - 1);
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                position: s.position.map(|c| c * t),
                weight: s.weight * wscale,
                curvature: s.curvature / t,
            })
            .collect();
        Self::new(self.dimension, samples, format!("{}*{t}", self.shape_tag))
    }

    /// CSV with columns `x,y[,z],weight,H`, one row per sample in mesh order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.dimension == 2 {
            w.write_record(["x", "y", "weight", "H"])?;
        } else {
            w.write_record(["x", "y", "z", "weight", "H"])?;
        }
        for s in &self.samples {
            let mut row = vec![fmt17(s.position[0]), fmt17(s.position[1])];
            if self.dimension == 3 {
                row.push(fmt17(s.position[2]));
            }
            row.push(fmt17(s.weight));
            row.push(fmt17(s.curvature));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
