//! Least squares, serial-correlation diagnostics, autoregressions and
//! long-run multipliers.

mod ar;
mod diagnostics;
mod effects;
mod export;
mod ols;

pub use ar::{ar_fit, lag_name, ArFit};
pub use diagnostics::{breusch_godfrey, SerialCorrelationTest};
pub use effects::{long_run_effect, long_run_ratio, relative_series, LongRunEffect};
pub use export::{significance_stars, t_p_value, CoefficientRow, FitSummary};
pub use ols::{ols, ols_with, CovarianceKind, Design, OlsOptions, RegressionFit, INTERCEPT};
