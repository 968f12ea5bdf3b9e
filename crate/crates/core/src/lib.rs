//! Season-length free time-series decomposition.
//!
//! A series is split as `y = g + l + e`: a smooth global trend `g`, a
//! piecewise-linear local trend `l` found by adaptive error-driven
//! segmentation of the detrended series, and a residual `e`. Recurring local
//! regimes play the role of seasonality, so no period is ever declared.
//!
//! The crate also ships a seeded synthetic benchmark generator with exact
//! ground truth, component-wise MAE/MSE evaluation, CSV/JSON interchange and
//! the bench/sweep harness behind the `lgtd` binary.

pub mod error;
pub mod global_trend;
pub mod llt;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod synth;
pub mod io;
pub mod bench;

pub use error::{Error, Result};
pub use model::*;
