//! Tempered fractional time series.
//!
//! Numerical kernels and experiment drivers for ARTFIMA processes, the
//! tempered Hermite process of order one, tempered fractional calculus on
//! uniform grids, Wiener integrals with respect to the tempered Hermite
//! process, and the partial-sum invariance principle connecting them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod acceptance;
pub mod artfima;
pub mod error;
pub mod fft;
pub mod grid;
pub mod limits;
pub mod linalg;
pub mod quad;
pub mod report;
pub mod rng;
pub mod specfun;
pub mod stats;
pub mod tfcalc;
pub mod thp;
pub mod wiener;

pub use error::{Error, Result};
