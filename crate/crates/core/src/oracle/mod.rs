//! Closed-form layer energies used to check `F_eps = F_0 + eps F^(1) + o(eps)`
//! without a PDE solver.
//!
//! The radial oracle solves the harmonic problem exactly in an annulus or
//! spherical shell. The fiber oracle solves, for every boundary sample, the
//! one-dimensional problem along the normal with Jacobian `1 + tH`.

mod fiber;
mod radial;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use fiber::{fiber_energy, fiber_expansion_check, recovery_energy};
pub use radial::{radial_exact_energy, radial_expansion_check, RadialProblem};

use crate::error::{Error, Result};
use crate::geometry::fmt17;

/// Exact energies over a decreasing list of `eps`, with the affine model
/// fitted from the two smallest values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub eps_list: Vec<f64>,
    pub exact_energies: Vec<f64>,
    #[serde(rename = "fitted_F0")]
    pub fitted_f0: f64,
    #[serde(rename = "fitted_F1")]
    pub fitted_f1: f64,
    /// Closed-form limit `F_0` the fit is compared against.
    #[serde(rename = "reference_F0")]
    pub reference_f0: f64,
    /// Closed-form first-order term `F^(1)`.
    #[serde(rename = "reference_F1")]
    pub reference_f1: f64,
    /// `(F_eps - F_0 - eps F^(1)) / eps^2` with the reference coefficients.
    pub remainder_ratios: Vec<f64>,
}

impl ExpansionReport {
    fn build(eps_list: &[f64], exact: Vec<f64>, reference_f0: f64, reference_f1: f64) -> Self {
        let n = eps_list.len();
        let (e1, e2) = (eps_list[n - 1], eps_list[n - 2]);
        let (f1, f2) = (exact[n - 1], exact[n - 2]);
        let fitted_f1 = (f2 - f1) / (e2 - e1);
        let fitted_f0 = f1 - e1 * fitted_f1;
        let remainder_ratios = eps_list
            .iter()
            .zip(&exact)
            .map(|(&e, &f)| (f - reference_f0 - e * reference_f1) / (e * e))
            .collect();
        Self {
            eps_list: eps_list.to_vec(),
            exact_energies: exact,
            fitted_f0,
            fitted_f1,
            reference_f0,
            reference_f1,
            remainder_ratios,
        }
    }

    /// `max |r| / min |r|` over the remainder ratios; infinite if one vanishes.
    pub fn remainder_spread(&self) -> f64 {
        let abs = self.remainder_ratios.iter().map(|r| r.abs());
        let max = abs.clone().fold(0.0, f64::max);
        let min = abs.fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Columns `eps,exact,model,remainder_ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eps", "exact", "model", "remainder_ratio"])?;
        for ((&e, &f), &r) in self
            .eps_list
            .iter()
            .zip(&self.exact_energies)
            .zip(&self.remainder_ratios)
        {
            let model = self.reference_f0 + e * self.reference_f1;
            w.write_record([fmt17(e), fmt17(f), fmt17(model), fmt17(r)])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "expansion check needs at least 3 eps values, got {}",
            eps_list.len()
        )));
    }
    if let Some(&e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: e,
            reason: "must be positive and finite",
        });
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "eps list must be strictly decreasing".into(),
        ));
    }
    Ok(())
}
