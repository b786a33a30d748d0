//! Calendar conversion, frequency aggregation and log differences.

use serde::{Deserialize, Serialize};

use super::period::{Calendar, Frequency};
use super::series::CalendarSeries;
use crate::error::{Error, Result};

/// Weights `(previous, current)` applied to consecutive Iranian-calendar
/// observations, as integer numerators over a common denominator so that
/// integer inputs convert without intermediate rounding.
fn iranian_weights(frequency: Frequency) -> (f64, f64, f64) {
    match frequency {
        // Jan 1 .. Mar 21 belongs to the previous Iranian year.
        Frequency::Annual => (80.0, 285.0, 365.0),
        Frequency::Quarterly => (8.0, 1.0, 9.0),
        Frequency::Monthly => (1.0, 2.0, 3.0),
    }
}

/// Converts an Iranian-calendar series to the Gregorian calendar at the
/// same frequency. The first observation is consumed as the lag of the
/// second, so the output is one period shorter.
///
/// Iranian periods are labelled by the Gregorian period in which they
/// begin: year 1380 is `2001`, its first quarter `2001Q1`, and Farvardin
/// 1380 (from 21 March) is `2001-03`.
pub fn convert_iranian(series: &CalendarSeries) -> Result<CalendarSeries> {
    if series.calendar() != Calendar::Iranian {
        return Err(Error::Calendar(format!(
            "expected an Iranian-calendar series, got {:?}",
            series.calendar()
        )));
    }
    if series.len() < 2 {
        return Err(Error::Length {
            what: "calendar conversion",
            needed: 2,
            got: series.len(),
        });
    }
    let (w_prev, w_cur, denom) = iranian_weights(series.frequency());
    let values = series
        .values()
        .windows(2)
        .map(|w| (w_prev * w[0] + w_cur * w[1]) / denom)
        .collect();
    let start = series.start().offset(1);
    Ok(series
        .with_values(values)?
        .relabel(Calendar::Gregorian, start))
}

fn convert_at(series: &CalendarSeries, frequency: Frequency) -> Result<CalendarSeries> {
    if series.frequency() != frequency {
        return Err(Error::Frequency(format!(
            "expected {frequency} series, got {}",
            series.frequency()
        )));
    }
    convert_iranian(series)
}

/// `G_y = (80/365) I_{y-1} + (285/365) I_y`.
pub fn convert_iranian_annual(series: &CalendarSeries) -> Result<CalendarSeries> {
    convert_at(series, Frequency::Annual)
}

/// `G_q = (8/9) I_{q-1} + (1/9) I_q`.
pub fn convert_iranian_quarterly(series: &CalendarSeries) -> Result<CalendarSeries> {
    convert_at(series, Frequency::Quarterly)
}

/// `G_m = (1/3) I_{m-1} + (2/3) I_m`.
pub fn convert_iranian_monthly(series: &CalendarSeries) -> Result<CalendarSeries> {
    convert_at(series, Frequency::Monthly)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMethod {
    Mean,
    Sum,
    Last,
}

/// Aggregates to a coarser frequency. Target periods not fully covered by
/// the source (at the head or tail) are dropped.
pub fn aggregate(
    series: &CalendarSeries,
    target: Frequency,
    method: AggregationMethod,
) -> Result<CalendarSeries> {
    let source = series.frequency();
    if !target.is_coarser_than(source) {
        return Err(Error::Frequency(format!(
            "cannot aggregate {source} to {target}"
        )));
    }
    let ratio = (source.periods_per_year() / target.periods_per_year()) as usize;

    // skip to the first source period that opens a target period
    let mut skip = 0;
    while skip < series.len() {
        let p = series.period(skip);
        if p.containing(target)?.first_within(source)? == p {
            break;
        }
        skip += 1;
    }
    let full = (series.len() - skip) / ratio;
    if full == 0 {
        return Err(Error::Length {
            what: "aggregation to a complete target period",
            needed: skip + ratio,
            got: series.len(),
        });
    }
    let start = series.period(skip).containing(target)?;
    let values = series.values()[skip..skip + full * ratio]
        .chunks_exact(ratio)
        .map(|c| match method {
            AggregationMethod::Mean => c.iter().sum::<f64>() / ratio as f64,
            AggregationMethod::Sum => c.iter().sum(),
            AggregationMethod::Last => c[ratio - 1],
        })
        .collect();
    let mut out = CalendarSeries::new(series.calendar(), start, values)?;
    if let Some(u) = series.units() {
        out = out.with_units(u);
    }
    Ok(out)
}

/// `ln(x_t) - ln(x_{t-1})`; one period shorter than the input.
pub fn log_diff(series: &CalendarSeries) -> Result<CalendarSeries> {
    if let Some((p, v)) = series.iter().find(|(_, v)| *v <= 0.0) {
        return Err(Error::Domain {
            period: p.to_string(),
            value: v,
        });
    }
    if series.len() < 2 {
        return Err(Error::Length {
            what: "log difference",
            needed: 2,
            got: series.len(),
        });
    }
    let values = series
        .values()
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect();
    let start = series.start().offset(1);
    let calendar = series.calendar();
    Ok(series.with_values(values)?.relabel(calendar, start))
}
