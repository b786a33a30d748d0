//! Impulse responses and forecast-error variance decompositions of a
//! structural model, by moving-average formulas and by the stacked system.

mod export;
mod fevd;
mod irf;
mod stacked;

pub use export::{plot_data, write_fevd_csv, write_irf_csv, PlotPoint, PlotSeries, ShockBands};
pub use fevd::{fevd, FevdResult, STATIONARITY_BOUND};
pub use irf::{
    g_recursion, impulse_responses, irf_domestic, irf_global, irf_sanction, IrfResult, Method, Shock, ShockResponse,
    DEFAULT_HORIZON,
};
pub use stacked::{stacked_dynamics, stacked_irf};
