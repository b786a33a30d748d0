use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Quarterly,
    Annual,
}

impl Frequency {
    pub fn periods_per_year(self) -> i64 {
        match self {
            Frequency::Monthly => 12,
            Frequency::Quarterly => 4,
            Frequency::Annual => 1,
        }
    }

    /// True when `self` is strictly coarser than `other`.
    pub fn is_coarser_than(self, other: Frequency) -> bool {
        self.periods_per_year() < other.periods_per_year()
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Frequency::Monthly => "monthly",
            Frequency::Quarterly => "quarterly",
            Frequency::Annual => "annual",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Calendar {
    Gregorian,
    Iranian,
}

/// A year plus an optional month (1..=12) or quarter (1..=4).
///
/// Text forms: `YYYY`, `YYYYQn`, `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodLabel {
    year: i32,
    subperiod: Option<u8>,
    frequency: Frequency,
}

impl PeriodLabel {
    pub fn annual(year: i32) -> Self {
        Self {
            year,
            subperiod: None,
            frequency: Frequency::Annual,
        }
    }

    pub fn quarter(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::Period(format!("{year}Q{quarter}")));
        }
        Ok(Self {
            year,
            subperiod: Some(quarter),
            frequency: Frequency::Quarterly,
        })
    }

    pub fn month(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Period(format!("{year}-{month:02}")));
        }
        Ok(Self {
            year,
            subperiod: Some(month),
            frequency: Frequency::Monthly,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn subperiod(&self) -> Option<u8> {
        self.subperiod
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    /// Zero-based count of periods since year 0 at this label's frequency.
    pub fn ordinal(&self) -> i64 {
        let per = self.frequency.periods_per_year();
        self.year as i64 * per + self.subperiod.map_or(0, |s| s as i64 - 1)
    }

    pub fn from_ordinal(frequency: Frequency, ordinal: i64) -> Self {
        let per = frequency.periods_per_year();
        let year = ordinal.div_euclid(per) as i32;
        let sub = ordinal.rem_euclid(per) as u8 + 1;
        Self {
            year,
            subperiod: (frequency != Frequency::Annual).then_some(sub),
            frequency,
        }
    }

    pub fn offset(&self, n: i64) -> Self {
        Self::from_ordinal(self.frequency, self.ordinal() + n)
    }

    /// Signed number of periods from `self` to `other` (same frequency).
    pub fn distance_to(&self, other: &PeriodLabel) -> Result<i64> {
        if self.frequency != other.frequency {
            return Err(Error::Frequency(format!(
                "cannot compare {} label {self} with {} label {other}",
                self.frequency, other.frequency
            )));
        }
        Ok(other.ordinal() - self.ordinal())
    }

    /// The label of the coarser period that contains this one.
    pub fn containing(&self, target: Frequency) -> Result<Self> {
        if target.is_coarser_than(self.frequency) || target == self.frequency {
            let per_src = self.frequency.periods_per_year();
            let per_dst = target.periods_per_year();
            let ratio = per_src / per_dst;
            let idx = self.subperiod.map_or(0, |s| s as i64 - 1) / ratio;
            return Ok(Self::from_ordinal(target, self.year as i64 * per_dst + idx));
        }
        Err(Error::Frequency(format!(
            "{target} is finer than {}",
            self.frequency
        )))
    }

    /// First label at a finer frequency that falls inside this period.
    pub fn first_within(&self, finer: Frequency) -> Result<Self> {
        if !self.frequency.is_coarser_than(finer) {
            return Err(Error::Frequency(format!(
                "{finer} is not finer than {}",
                self.frequency
            )));
        }
        let ratio = finer.periods_per_year() / self.frequency.periods_per_year();
        let idx = self.subperiod.map_or(0, |s| s as i64 - 1) * ratio;
        Ok(Self::from_ordinal(
            finer,
            self.year as i64 * finer.periods_per_year() + idx,
        ))
    }
}

impl fmt::Display for PeriodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.frequency, self.subperiod) {
            (Frequency::Annual, _) => write!(f, "{:04}", self.year),
            (Frequency::Quarterly, Some(q)) => write!(f, "{:04}Q{q}", self.year),
            (Frequency::Monthly, Some(m)) => write!(f, "{:04}-{m:02}", self.year),
            _ => unreachable!("subperiod always present below annual frequency"),
        }
    }
}

impl FromStr for PeriodLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Period(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());

        if let Some((y, q)) = s.split_once(['Q', 'q']) {
            if y.len() != 4 || !digits(y) || q.len() != 1 || !digits(q) {
                return Err(bad());
            }
            return PeriodLabel::quarter(y.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?)
                .map_err(|_| bad());
        }
        if let Some((y, m)) = s.split_once('-') {
            if y.len() != 4 || !digits(y) || m.len() != 2 || !digits(m) {
                return Err(bad());
            }
            return PeriodLabel::month(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
                .map_err(|_| bad());
        }
        if s.len() == 4 && digits(s) {
            return Ok(PeriodLabel::annual(s.parse().map_err(|_| bad())?));
        }
        Err(bad())
    }
}

impl Serialize for PeriodLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PeriodLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of inclusive period ranges used to restrict normalization and
/// standard-deviation windows. An empty window means "everything".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeriodWindow {
    ranges: Vec<(PeriodLabel, PeriodLabel)>,
}

impl PeriodWindow {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn range(start: PeriodLabel, end: PeriodLabel) -> Result<Self> {
        Self::full().with_range(start, end)
    }

    pub fn with_range(mut self, start: PeriodLabel, end: PeriodLabel) -> Result<Self> {
        if start.frequency() != end.frequency() {
            return Err(Error::Frequency(format!(
                "window bounds {start} and {end} have different frequencies"
            )));
        }
        if start > end {
            return Err(Error::Parameter(format!("window start {start} after end {end}")));
        }
        self.ranges.push((start, end));
        Ok(self)
    }

    pub fn is_full(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn ranges(&self) -> &[(PeriodLabel, PeriodLabel)] {
        &self.ranges
    }

    /// Whether `label` lies in the window. Bounds given at a different
    /// frequency are compared through the coarser of the two frequencies.
    pub fn contains(&self, label: &PeriodLabel) -> bool {
        if self.ranges.is_empty() {
            return true;
        }
        self.ranges.iter().any(|(lo, hi)| {
            let f = label.frequency();
            if lo.frequency() == f {
                return lo <= label && label <= hi;
            }
            if lo.frequency().is_coarser_than(f) {
                let c = label.containing(lo.frequency()).expect("coarser target");
                return *lo <= c && c <= *hi;
            }
            // window is finer than the label: overlap test on the window's frequency
            let first = label.first_within(lo.frequency()).expect("finer target");
            let ratio = lo.frequency().periods_per_year() / f.periods_per_year();
            let last = first.offset(ratio - 1);
            first <= *hi && *lo <= last
        })
    }
}
