//! Calendar-aware series containers and the transforms applied to them
//! before estimation.

pub mod io;
mod period;
mod series;
mod transform;

pub use period::{Calendar, Frequency, PeriodLabel, PeriodWindow};
pub use series::{common_span, correlation, CalendarSeries};
pub use transform::{
    aggregate, convert_iranian, convert_iranian_annual, convert_iranian_monthly,
    convert_iranian_quarterly, log_diff, AggregationMethod,
};
