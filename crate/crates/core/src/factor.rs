//! Cross-section weighted averages used as proxies for unobserved common
//! factors and as regional comparators.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::Design;
use crate::timeseries::io::format_value;
use crate::timeseries::{CalendarSeries, PeriodLabel};

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSource {
    GdpPpp,
    Population,
    Given,
}

/// Non-negative member weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub members: Vec<String>,
    pub weights: Vec<f64>,
    pub source: WeightSource,
    pub window: Option<(PeriodLabel, PeriodLabel)>,
}

impl WeightScheme {
    /// Normalizes non-negative raw weights.
    pub fn from_raw(members: Vec<String>, raw: Vec<f64>) -> Result<Self> {
        if members.len() != raw.len() {
            return Err(Error::Parameter(format!(
                "{} members but {} weights",
                members.len(),
                raw.len()
            )));
        }
        if members.is_empty() {
            return Err(Error::Parameter("weight scheme has no members".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &members {
            if !seen.insert(m.as_str()) {
                return Err(Error::Parameter(format!("duplicate member '{m}'")));
            }
        }
        if let Some((m, w)) = members.iter().zip(&raw).find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::Parameter(format!("member '{m}' has invalid weight {w}")));
        }
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate("weights sum to zero".into()));
        }
        Ok(Self {
            members,
            weights: raw.iter().map(|w| w / total).collect(),
            source: WeightSource::Given,
            window: None,
        })
    }

    pub fn equal(members: &[&str]) -> Result<Self> {
        Self::from_raw(members.iter().map(|m| m.to_string()).collect(), vec![1.0; members.len()])
    }

    pub fn weight(&self, member: &str) -> Option<f64> {
        self.members.iter().position(|m| m == member).map(|i| self.weights[i])
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.len() != self.weights.len() || self.members.is_empty() {
            return Err(Error::Parameter("weight scheme is empty or ragged".into()));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Parameter("negative weight".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Parameter(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `member,weight` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["member", "weight"])?;
        for (m, x) in self.members.iter().zip(&self.weights) {
            w.write_record([m.as_str(), &format_value(*x)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `member,weight` rows; the weights are renormalized.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.len() != 2 || &header[0] != "member" || &header[1] != "weight" {
            return Err(Error::Parse {
                line: 1,
                message: "expected header 'member,weight'".into(),
            });
        }
        let mut members = Vec::new();
        let mut raw = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            if rec.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 fields, found {}", rec.len()),
                });
            }
            members.push(rec[0].to_string());
            raw.push(rec[1].trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("bad weight '{}'", &rec[1]),
            })?);
        }
        Self::from_raw(members, raw)
    }
}

/// Weights proportional to each member's total over `window`.
fn window_sum_weights(
    panel: &[(String, CalendarSeries)],
    window: (PeriodLabel, PeriodLabel),
    source: WeightSource,
) -> Result<WeightScheme> {
    let (from, to) = window;
    if from > to || from.frequency() != to.frequency() {
        return Err(Error::Parameter(format!("bad weight window {from}..{to}")));
    }
    let mut sums = Vec::with_capacity(panel.len());
    for (name, s) in panel {
        if s.frequency() != from.frequency() {
            return Err(Error::Frequency(format!(
                "member '{name}' is {} but the window is {}",
                s.frequency(),
                from.frequency()
            )));
        }
        let inside: Vec<f64> = s.iter().filter(|(p, _)| *p >= from && *p <= to).map(|(_, v)| v).collect();
        if inside.is_empty() {
            return Err(Error::Coverage(format!("member '{name}' has no observation in {from}..{to}")));
        }
        if let Some(v) = inside.iter().find(|v| **v < 0.0) {
            return Err(Error::Parameter(format!("member '{name}' has negative value {v}")));
        }
        sums.push(inside.iter().sum());
    }
    let mut scheme = WeightScheme::from_raw(panel.iter().map(|(n, _)| n.clone()).collect(), sums)?;
    scheme.source = source;
    scheme.window = Some(window);
    Ok(scheme)
}

/// `w_i = sum_t Y_it / sum_i sum_t Y_it` over the window.
pub fn gdp_ppp_weights(panel: &[(String, CalendarSeries)], window: (PeriodLabel, PeriodLabel)) -> Result<WeightScheme> {
    window_sum_weights(panel, window, WeightSource::GdpPpp)
}

pub fn population_weights(
    panel: &[(String, CalendarSeries)],
    window: (PeriodLabel, PeriodLabel),
) -> Result<WeightScheme> {
    window_sum_weights(panel, window, WeightSource::Population)
}

/// `sum_i w_i x_it` over the union of member spans. At a period where some
/// members are missing the remaining weights are rescaled to sum to one.
pub fn weighted_average(panel: &[(String, CalendarSeries)], weights: &WeightScheme) -> Result<CalendarSeries> {
    weights.validate()?;
    let mut used: Vec<(&CalendarSeries, f64)> = Vec::with_capacity(weights.members.len());
    for (m, w) in weights.members.iter().zip(&weights.weights) {
        let s = panel
            .iter()
            .find(|(n, _)| n == m)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownVariable(m.clone()))?;
        used.push((s, *w));
    }
    let nonempty: Vec<&(&CalendarSeries, f64)> = used.iter().filter(|(s, _)| !s.is_empty()).collect();
    let Some(first) = nonempty.first() else {
        return Err(Error::Sample("every member series is empty".into()));
    };
    let freq = first.0.frequency();
    let calendar = first.0.calendar();
    if let Some((s, _)) = nonempty.iter().find(|(s, _)| s.frequency() != freq || s.calendar() != calendar) {
        return Err(Error::Frequency(format!(
            "member series mix {freq} and {} data",
            s.frequency()
        )));
    }
    let lo = nonempty.iter().map(|(s, _)| s.start()).min().expect("nonempty");
    let hi = nonempty.iter().map(|(s, _)| s.end()).max().expect("nonempty");
    let len = lo.distance_to(&hi)? as usize + 1;
    let mut values = Vec::with_capacity(len);
    for t in 0..len {
        let p = lo.offset(t as i64);
        let mut num = 0.0;
        let mut den = 0.0;
        for (s, w) in &nonempty {
            if let Some(v) = s.get(&p) {
                num += w * v;
                den += w;
            }
        }
        if !(den > 0.0) {
            return Err(Error::InteriorGap { period: p.to_string() });
        }
        values.push(num / den);
    }
    CalendarSeries::new(calendar, lo, values)
}

/// Appends proxy columns, cut to the design's periods `start..`, to a copy
/// of `design`.
pub fn augment_regressors(
    design: &Design,
    start: PeriodLabel,
    proxies: &[(&str, &CalendarSeries)],
) -> Result<Design> {
    let rows = design.nrows().unwrap_or(0);
    let mut out = design.clone();
    if proxies.is_empty() {
        return Ok(out);
    }
    if rows == 0 {
        return Err(Error::Sample("cannot augment an empty design".into()));
    }
    let end = start.offset(rows as i64 - 1);
    for (name, s) in proxies {
        if s.frequency() != start.frequency() || s.start() > start || s.end() < end {
            return Err(Error::Alignment(format!(
                "proxy '{name}' spans {}..{}, the regression needs {start}..{end}",
                s.start(),
                s.end()
            )));
        }
        out.push(*name, s.slice(start, end)?.into_values());
    }
    Ok(out)
}
