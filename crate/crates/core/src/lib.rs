//! Optimal placement of a thin insulating layer of fixed mass on the
//! boundary of a body, together with exact energy oracles for checking the
//! first-order asymptotic model.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod geometry;
pub mod numerics;
pub mod optimizer;
pub mod oracle;

pub use error::{Error, Regime, Result};
