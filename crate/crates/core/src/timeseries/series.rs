use serde::{Deserialize, Serialize};

use super::period::{Calendar, Frequency, PeriodLabel};
use crate::error::{Error, Result};

/// A contiguous run of observations stamped with frequency and calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalendarSeries {
    frequency: Frequency,
    calendar: Calendar,
    start: PeriodLabel,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    units: Option<String>,
}

impl CalendarSeries {
    pub fn new(calendar: Calendar, start: PeriodLabel, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InteriorGap {
                period: start.offset(i as i64).to_string(),
            });
        }
        Ok(Self {
            frequency: start.frequency(),
            calendar,
            start,
            values,
            units: None,
        })
    }

    /// Builds a series from values that may be missing at either edge.
    /// Leading and trailing gaps are trimmed; an interior gap is an error.
    pub fn from_optional(
        calendar: Calendar,
        start: PeriodLabel,
        values: &[Option<f64>],
    ) -> Result<Self> {
        let present = |v: &Option<f64>| v.is_some_and(f64::is_finite);
        let first = values.iter().position(present);
        let Some(first) = first else {
            return Self::new(calendar, start, Vec::new());
        };
        let last = values.iter().rposition(present).expect("first exists");
        let mut out = Vec::with_capacity(last - first + 1);
        for (i, v) in values[first..=last].iter().enumerate() {
            match v {
                Some(x) if x.is_finite() => out.push(*x),
                _ => {
                    return Err(Error::InteriorGap {
                        period: start.offset((first + i) as i64).to_string(),
                    })
                }
            }
        }
        Self::new(calendar, start.offset(first as i64), out)
    }

    pub fn gregorian(start: PeriodLabel, values: Vec<f64>) -> Result<Self> {
        Self::new(Calendar::Gregorian, start, values)
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = Some(units.into());
        self
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn calendar(&self) -> Calendar {
        self.calendar
    }

    pub fn start(&self) -> PeriodLabel {
        self.start
    }

    /// Label of the last observation. Equal to `start` for an empty series.
    pub fn end(&self) -> PeriodLabel {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn units(&self) -> Option<&str> {
        self.units.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self, i: usize) -> PeriodLabel {
        self.start.offset(i as i64)
    }

    pub fn periods(&self) -> impl Iterator<Item = PeriodLabel> + '_ {
        (0..self.values.len()).map(|i| self.period(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (PeriodLabel, f64)> + '_ {
        self.periods().zip(self.values.iter().copied())
    }

    /// Value at `label`, if covered.
    pub fn get(&self, label: &PeriodLabel) -> Option<f64> {
        let d = self.start.distance_to(label).ok()?;
        (d >= 0).then(|| self.values.get(d as usize).copied()).flatten()
    }

    /// Same stamp, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(self.calendar, self.start, values)?;
        out.units = self.units.clone();
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Sub-series covering `[from, to]`, clipped to what is available.
    pub fn slice(&self, from: PeriodLabel, to: PeriodLabel) -> Result<Self> {
        let a = self.start.distance_to(&from)?.max(0);
        let b = (self.start.distance_to(&to)? + 1).min(self.values.len() as i64);
        let values = if b > a {
            self.values[a as usize..b as usize].to_vec()
        } else {
            Vec::new()
        };
        let mut out = Self::new(self.calendar, self.start.offset(a), values)?;
        out.units = self.units.clone();
        Ok(out)
    }

    /// Shifts the series so that value at `t` becomes the value at `t + lag`.
    pub fn lag(&self, lag: i64) -> Self {
        let mut out = self.clone();
        out.start = self.start.offset(lag);
        out
    }

    pub(crate) fn relabel(mut self, calendar: Calendar, start: PeriodLabel) -> Self {
        self.calendar = calendar;
        self.start = start;
        self
    }

    /// Checks that `self` and `other` share frequency, calendar, start and length.
    pub fn ensure_aligned(&self, other: &CalendarSeries) -> Result<()> {
        if self.frequency != other.frequency
            || self.calendar != other.calendar
            || self.start != other.start
            || self.values.len() != other.values.len()
        {
            return Err(Error::Alignment(format!(
                "{} {}..{} ({} obs) vs {} {}..{} ({} obs)",
                self.frequency,
                self.start,
                self.end(),
                self.len(),
                other.frequency,
                other.start,
                other.end(),
                other.len()
            )));
        }
        Ok(())
    }
}

/// Common span of several same-frequency series.
pub fn common_span(series: &[&CalendarSeries]) -> Result<(PeriodLabel, PeriodLabel)> {
    let first = series
        .first()
        .ok_or_else(|| Error::Alignment("no series supplied".into()))?;
    let mut lo = first.start();
    let mut hi = first.end();
    for s in series {
        if s.frequency() != first.frequency() {
            return Err(Error::Alignment(format!(
                "mixed frequencies {} and {}",
                first.frequency(),
                s.frequency()
            )));
        }
        if s.calendar() != first.calendar() {
            return Err(Error::Alignment("mixed calendars".into()));
        }
        if s.is_empty() {
            return Err(Error::Alignment("empty series".into()));
        }
        lo = lo.max(s.start());
        hi = hi.min(s.end());
    }
    if lo > hi {
        return Err(Error::Alignment(format!("no overlap (latest start {lo}, earliest end {hi})")));
    }
    Ok((lo, hi))
}

/// Pearson correlation over the periods shared by both series.
pub fn correlation(a: &CalendarSeries, b: &CalendarSeries) -> Result<f64> {
    let (lo, hi) = common_span(&[a, b])?;
    let x = a.slice(lo, hi)?;
    let y = b.slice(lo, hi)?;
    let n = x.len();
    if n < 2 {
        return Err(Error::Sample("correlation needs at least 2 shared periods".into()));
    }
    let mx = x.values().iter().sum::<f64>() / n as f64;
    let my = y.values().iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (u, v) in x.values().iter().zip(y.values()) {
        sxy += (u - mx) * (v - my);
        sxx += (u - mx) * (u - mx);
        syy += (v - my) * (v - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation of a constant series".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
