use std::collections::BTreeMap;
use std::io::Read;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::timeseries::{Frequency, PeriodLabel};

/// Daily article counts per outlet.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArticleCountPanel {
    outlets: Vec<String>,
    counts: Vec<BTreeMap<NaiveDate, u32>>,
    span: Option<(PeriodLabel, PeriodLabel)>,
}

/// Per-outlet monthly means `n_jt = D_jt^-1 sum_d n_jdt`.
pub(crate) type OutletMonths = BTreeMap<PeriodLabel, f64>;

pub(crate) fn month_of(date: NaiveDate) -> PeriodLabel {
    PeriodLabel::month(date.year(), date.month() as u8).expect("chrono months are 1..=12")
}

impl ArticleCountPanel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the count for `outlet` on `date`, replacing any earlier value.
    pub fn insert(&mut self, outlet: &str, date: NaiveDate, count: u32) {
        let j = match self.outlets.iter().position(|o| o == outlet) {
            Some(j) => j,
            None => {
                self.outlets.push(outlet.to_string());
                self.counts.push(BTreeMap::new());
                self.outlets.len() - 1
            }
        };
        self.counts[j].insert(date, count);
    }

    /// Declares the monthly span the panel is meant to cover. Months in the
    /// span without any observed day are reported rather than zero-filled.
    pub fn with_span(mut self, first: PeriodLabel, last: PeriodLabel) -> Result<Self> {
        if first.frequency() != Frequency::Monthly || last.frequency() != Frequency::Monthly {
            return Err(Error::Frequency("panel span must be given in months".into()));
        }
        if first > last {
            return Err(Error::Parameter(format!("span start {first} after end {last}")));
        }
        self.span = Some((first, last));
        Ok(self)
    }

    pub fn outlets(&self) -> &[String] {
        &self.outlets
    }

    pub fn outlet_counts(&self, outlet: &str) -> Option<&BTreeMap<NaiveDate, u32>> {
        self.outlets
            .iter()
            .position(|o| o == outlet)
            .map(|j| &self.counts[j])
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(BTreeMap::is_empty)
    }

    /// Declared span, or first..last observed month.
    pub fn span(&self) -> Option<(PeriodLabel, PeriodLabel)> {
        if self.span.is_some() {
            return self.span;
        }
        let first = self.counts.iter().filter_map(|c| c.keys().next()).min()?;
        let last = self.counts.iter().filter_map(|c| c.keys().next_back()).max()?;
        Some((month_of(*first), month_of(*last)))
    }

    pub(crate) fn outlet_monthly_means(&self) -> Vec<OutletMonths> {
        self.counts
            .iter()
            .map(|days| {
                let mut acc: BTreeMap<PeriodLabel, (u64, u32)> = BTreeMap::new();
                for (d, c) in days {
                    let e = acc.entry(month_of(*d)).or_default();
                    e.0 += u64::from(*c);
                    e.1 += 1;
                }
                acc.into_iter()
                    .map(|(m, (sum, days))| (m, sum as f64 / f64::from(days)))
                    .collect()
            })
            .collect()
    }

    /// Reads `date,outlet,count` rows (ISO dates, header required).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["date", "outlet", "count"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
            return Err(Error::Parse {
                line: 1,
                message: "expected header 'date,outlet,count'".into(),
            });
        }
        let mut panel = Self::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let bad = |message: String| Error::Parse { line, message };
            if record.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", record.len())));
            }
            let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
                .map_err(|_| bad(format!("bad date '{}'", &record[0])))?;
            if record[1].is_empty() {
                return Err(bad("empty outlet".into()));
            }
            let count: u32 = record[2]
                .parse()
                .map_err(|_| bad(format!("count '{}' is not a non-negative integer", &record[2])))?;
            panel.insert(&record[1], date, count);
        }
        if panel.is_empty() {
            return Err(Error::Parse {
                line: 1,
                message: "no data rows".into(),
            });
        }
        Ok(panel)
    }
}

/// Additions to and removals from a sanctioned-entity list per period.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityFlowSeries {
    start: PeriodLabel,
    additions: Vec<u32>,
    removals: Vec<u32>,
}

impl EntityFlowSeries {
    pub fn new(start: PeriodLabel, additions: Vec<u32>, removals: Vec<u32>) -> Result<Self> {
        if additions.len() != removals.len() {
            return Err(Error::Alignment(format!(
                "{} addition periods vs {} removal periods",
                additions.len(),
                removals.len()
            )));
        }
        Ok(Self {
            start,
            additions,
            removals,
        })
    }

    pub fn start(&self) -> PeriodLabel {
        self.start
    }

    pub fn additions(&self) -> &[u32] {
        &self.additions
    }

    pub fn removals(&self) -> &[u32] {
        &self.removals
    }

    pub fn len(&self) -> usize {
        self.additions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty()
    }

    /// Reads `period,additions,removals` rows with consecutive periods.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["period", "additions", "removals"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
            return Err(Error::Parse {
                line: 1,
                message: "expected header 'period,additions,removals'".into(),
            });
        }
        let mut start = None;
        let mut prev: Option<PeriodLabel> = None;
        let (mut adds, mut rems) = (Vec::new(), Vec::new());
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let bad = |message: String| Error::Parse { line, message };
            if record.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", record.len())));
            }
            let p: PeriodLabel = record[0]
                .parse()
                .map_err(|_| bad(format!("bad period '{}'", &record[0])))?;
            if let Some(q) = prev {
                if q.frequency() != p.frequency() || q.offset(1) != p {
                    return Err(bad(format!("period {p} does not follow {q}")));
                }
            } else {
                start = Some(p);
            }
            prev = Some(p);
            let parse = |s: &str| {
                s.parse::<u32>()
                    .map_err(|_| bad(format!("'{s}' is not a non-negative integer")))
            };
            adds.push(parse(&record[1])?);
            rems.push(parse(&record[2])?);
        }
        let start = start.ok_or_else(|| Error::Parse {
            line: 1,
            message: "no data rows".into(),
        })?;
        Self::new(start, adds, rems)
    }
}
