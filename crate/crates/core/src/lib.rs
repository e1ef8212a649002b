//! SARIMA-GARCH modeling and short-term electricity-load forecasting.
//!
//! The pipeline: ingest hourly load levels, transform to log-returns, test
//! for unit roots and conditional heteroskedasticity, fit a sparse-lag
//! seasonal ARMA mean equation with a GARCH(1,1) variance equation under
//! normal, skew-normal or Student-t innovations, forecast 24 steps ahead,
//! reconstruct levels with prediction intervals, and score against actuals.

pub mod diagnostics;
pub mod error;
pub mod estimate;
pub mod evaluate;
pub mod forecast;
pub mod innovations;
mod linalg;
pub mod model;
pub mod series;

pub use error::{Error, Result};
pub use estimate::{Criterion, FitOptions, FittedModel};
pub use forecast::{ForecastOptions, ForecastResult};
pub use innovations::{InnovationDist, InnovationFamily};
pub use model::{FilterOutput, ModelParams, ModelSpec};
pub use series::{LoadSeries, ReturnSeries};
