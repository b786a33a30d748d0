use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};
use crate::timeseries::io::read_wide;
use crate::timeseries::{Calendar, CalendarSeries};

/// Named series available to the estimator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataPanel {
    series: BTreeMap<String, CalendarSeries>,
}

impl DataPanel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, series: CalendarSeries) -> Self {
        self.insert(name, series);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, series: CalendarSeries) {
        self.series.insert(name.into(), series);
    }

    pub fn get(&self, name: &str) -> Result<&CalendarSeries> {
        self.series
            .get(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Reads a wide `period,name1,name2,...` table.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        Ok(read_wide(reader, Calendar::Gregorian)?.into_iter().collect())
    }

    pub fn extend(&mut self, other: DataPanel) {
        self.series.extend(other.series);
    }
}

impl FromIterator<(String, CalendarSeries)> for DataPanel {
    fn from_iter<I: IntoIterator<Item = (String, CalendarSeries)>>(iter: I) -> Self {
        Self {
            series: iter.into_iter().collect(),
        }
    }
}
