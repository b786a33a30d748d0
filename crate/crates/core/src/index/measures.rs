use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::panel::{ArticleCountPanel, EntityFlowSeries, OutletMonths};
use crate::error::{Error, Result};
use crate::regression::{ols, Design};
use crate::timeseries::io::format_value;
use crate::timeseries::{Calendar, CalendarSeries, Frequency, PeriodLabel, PeriodWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    On,
    Off,
    Net,
    SdnNet,
}

impl IndexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::On => "on",
            IndexKind::Off => "off",
            IndexKind::Net => "net",
            IndexKind::SdnNet => "sdn_net",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityIndex {
    pub series: CalendarSeries,
    pub kind: IndexKind,
    pub normalization_max: f64,
    pub net_weight: Option<f64>,
}

/// Monthly count series plus months in the panel span that had no
/// observed day and were left out.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyCounts {
    pub series: CalendarSeries,
    pub excluded: Vec<PeriodLabel>,
}

/// Averages per-outlet monthly values across the outlets observed in each
/// month. Uncovered months at the edges of the span are excluded and
/// reported; an uncovered month between covered ones is an error since a
/// series cannot have interior gaps.
fn average_outlets(panel: &ArticleCountPanel, per_outlet: &[OutletMonths]) -> Result<MonthlyCounts> {
    let (first, last) = panel
        .span()
        .ok_or_else(|| Error::Sample("article panel has no observations".into()))?;
    let n = first.distance_to(&last)? + 1;
    let mut values = Vec::with_capacity(n as usize);
    for i in 0..n {
        let m = first.offset(i);
        let (sum, count) = per_outlet
            .iter()
            .filter_map(|o| o.get(&m))
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        values.push((count > 0).then(|| sum / count as f64));
    }
    let excluded: Vec<PeriodLabel> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(i, _)| first.offset(i as i64))
        .collect();
    let series = CalendarSeries::from_optional(Calendar::Gregorian, first, &values).map_err(|e| match e {
        Error::InteriorGap { period } => Error::Coverage(format!(
            "month {period} has no covered publishing days inside the panel span"
        )),
        other => other,
    })?;
    if series.is_empty() {
        return Err(Error::Sample("no month with covered publishing days".into()));
    }
    Ok(MonthlyCounts { series, excluded })
}

/// Grand mean of daily counts per month, across outlets and days.
pub fn monthly_mean_count(panel: &ArticleCountPanel) -> Result<MonthlyCounts> {
    if panel.outlets().is_empty() || panel.is_empty() {
        return Err(Error::Sample("article panel is empty".into()));
    }
    average_outlets(panel, &panel.outlet_monthly_means())
}

fn sample_sd(values: &[f64]) -> Option<f64> {
    let t = values.len();
    if t < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / t as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Some((ss / (t as f64 - 1.0)).sqrt())
}

/// Per-outlet monthly means divided by the outlet's standard deviation
/// (denominator `T - 1`), then averaged across outlets.
pub fn standardized_monthly_count(panel: &ArticleCountPanel) -> Result<MonthlyCounts> {
    standardized_monthly_count_within(panel, &PeriodWindow::full())
}

/// As [`standardized_monthly_count`], with the standard deviation computed
/// separately within each range of `sd_window`; months in a range are
/// divided by that range's deviation, all other months by the full-sample
/// deviation.
pub fn standardized_monthly_count_within(
    panel: &ArticleCountPanel,
    sd_window: &PeriodWindow,
) -> Result<MonthlyCounts> {
    if panel.outlets().is_empty() || panel.is_empty() {
        return Err(Error::Sample("article panel is empty".into()));
    }
    let per_outlet = panel.outlet_monthly_means();
    let mut scaled = Vec::with_capacity(per_outlet.len());
    for (name, months) in panel.outlets().iter().zip(&per_outlet) {
        let degenerate = || Error::DegenerateOutlet {
            outlet: name.clone(),
        };
        let all: Vec<f64> = months.values().copied().collect();
        let full_sd = sample_sd(&all).filter(|s| *s > 0.0);
        let mut range_sd = Vec::new();
        for (lo, hi) in sd_window.ranges() {
            let w = PeriodWindow::range(*lo, *hi)?;
            let vals: Vec<f64> = months
                .iter()
                .filter(|(m, _)| w.contains(m))
                .map(|(_, v)| *v)
                .collect();
            let sd = sample_sd(&vals).filter(|s| *s > 0.0).ok_or_else(degenerate)?;
            range_sd.push((w, sd));
        }
        let mut out = OutletMonths::new();
        for (m, v) in months {
            let sd = match range_sd.iter().find(|(w, _)| w.contains(m)) {
                Some((_, sd)) => *sd,
                None => full_sd.ok_or_else(degenerate)?,
            };
            out.insert(*m, v / sd);
        }
        scaled.push(out);
    }
    average_outlets(panel, &scaled)
}

/// Divides by the maximum over `window`; that maximum becomes exactly 1.
/// Values outside the window may exceed 1.
pub fn normalize_unit_max(
    series: &CalendarSeries,
    window: &PeriodWindow,
    kind: IndexKind,
) -> Result<IntensityIndex> {
    let max = series
        .iter()
        .filter(|(p, _)| window.contains(p))
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::Normalization(if max == f64::NEG_INFINITY {
            "normalization window contains no observations".into()
        } else {
            format!("maximum over the window is {max}, must be positive")
        }));
    }
    let values = series.values().iter().map(|v| if *v == max { 1.0 } else { v / max }).collect();
    Ok(IntensityIndex {
        series: series.with_values(values)?,
        kind,
        normalization_max: max,
        net_weight: None,
    })
}

fn check_weight(w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Parameter(format!("net weight {w} outside [0, 1]")));
    }
    Ok(())
}

/// `s_t = s_on,t - w s_off,t`.
pub fn net_index(on: &IntensityIndex, off: &IntensityIndex, w: f64) -> Result<IntensityIndex> {
    check_weight(w)?;
    on.series.ensure_aligned(&off.series)?;
    let values = on
        .series
        .values()
        .iter()
        .zip(off.series.values())
        .map(|(a, b)| a - w * b)
        .collect();
    Ok(IntensityIndex {
        series: on.series.with_values(values)?,
        kind: IndexKind::Net,
        normalization_max: on.normalization_max,
        net_weight: Some(w),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub w: f64,
    pub ssr: f64,
    pub log_likelihood: f64,
    pub beta_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSearch {
    pub w_hat: f64,
    pub nobs: usize,
    pub points: Vec<GridPoint>,
    /// `(max SSR - min SSR) / min SSR` across the grid.
    pub ssr_spread: f64,
    /// Other grid points whose SSR ties the minimum; the smallest w wins.
    pub ties: Vec<f64>,
}

impl WeightSearch {
    pub fn is_flat(&self, threshold: f64) -> bool {
        self.ssr_spread < threshold
    }
}

/// Interior grid points of (0, 1) at `step`.
pub fn weight_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::Parameter(format!("grid step {step} must lie in (0, 1)")));
    }
    let inv = 1.0 / step;
    let n = inv.round();
    if (n * step - 1.0).abs() < 1e-9 {
        let n = n as usize;
        return Ok((1..n).map(|k| k as f64 / n as f64).collect());
    }
    Ok((1..)
        .map(|k| k as f64 * step)
        .take_while(|w| *w < 1.0 - 1e-12)
        .collect())
}

/// Chooses `w` on the grid by maximizing the Gaussian likelihood of
/// `dy_t = b0 + b1 dy_{t-1} + b2 s_{t-1}(w) + e_t`.
pub fn grid_search_weight(
    on: &IntensityIndex,
    off: &IntensityIndex,
    dy: &CalendarSeries,
    grid_step: f64,
) -> Result<WeightSearch> {
    on.series.ensure_aligned(&off.series)?;
    if dy.frequency() != on.series.frequency() {
        return Err(Error::Frequency(format!(
            "output growth is {} but the index is {}",
            dy.frequency(),
            on.series.frequency()
        )));
    }
    let grid = weight_grid(grid_step)?;
    // periods t with dy_t, dy_{t-1} and s_{t-1} all observed
    let first = dy.start().offset(1).max(on.series.start().offset(1));
    let last = dy.end().min(on.series.end().offset(1));
    let n = first.distance_to(&last)? + 1;
    if n < 10 {
        return Err(Error::Sample(format!(
            "only {} overlapping periods after lagging; need at least 10",
            n.max(0)
        )));
    }
    let n = n as usize;
    let periods: Vec<PeriodLabel> = (0..n).map(|i| first.offset(i as i64)).collect();
    let y: Vec<f64> = periods.iter().map(|p| dy.get(p).expect("in span")).collect();
    let ylag: Vec<f64> = periods.iter().map(|p| dy.get(&p.offset(-1)).expect("in span")).collect();
    let on_lag: Vec<f64> = periods.iter().map(|p| on.series.get(&p.offset(-1)).expect("in span")).collect();
    let off_lag: Vec<f64> = periods.iter().map(|p| off.series.get(&p.offset(-1)).expect("in span")).collect();

    let points = grid
        .par_iter()
        .map(|&w| {
            let s: Vec<f64> = on_lag.iter().zip(&off_lag).map(|(a, b)| a - w * b).collect();
            let fit = ols(&y, &Design::new().with("dy(-1)", ylag.clone()).with("s(-1)", s), true)?;
            let nf = n as f64;
            let log_likelihood = if fit.ssr > 0.0 {
                -0.5 * nf * ((2.0 * std::f64::consts::PI).ln() + (fit.ssr / nf).ln() + 1.0)
            } else {
                f64::INFINITY
            };
            Ok(GridPoint {
                w,
                ssr: fit.ssr,
                log_likelihood,
                beta_s: fit.coefficient("s(-1)").expect("named"),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let min = points.iter().map(|p| p.ssr).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.ssr).fold(f64::NEG_INFINITY, f64::max);
    let best = points.iter().find(|p| p.ssr == min).expect("non-empty grid");
    let ties = points
        .iter()
        .filter(|p| p.ssr == min && p.w != best.w)
        .map(|p| p.w)
        .collect();
    Ok(WeightSearch {
        w_hat: best.w,
        nobs: n,
        points,
        ssr_spread: if min > 0.0 { (max - min) / min } else { 0.0 },
        ties,
    })
}

/// `(additions - w removals) / max(additions - w removals)`; negative
/// values are kept.
pub fn sdn_index(flows: &EntityFlowSeries, w: f64) -> Result<IntensityIndex> {
    check_weight(w)?;
    if flows.is_empty() {
        return Err(Error::Sample("entity flow series is empty".into()));
    }
    let net: Vec<f64> = flows
        .additions()
        .iter()
        .zip(flows.removals())
        .map(|(a, r)| f64::from(*a) - w * f64::from(*r))
        .collect();
    let series = CalendarSeries::gregorian(flows.start(), net)?;
    let mut idx = normalize_unit_max(&series, &PeriodWindow::full(), IndexKind::SdnNet)?;
    idx.net_weight = Some(w);
    Ok(idx)
}

/// Writes `period,value,kind` rows for each index in order.
pub fn write_indices<W: Write>(writer: W, indices: &[&IntensityIndex]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["period", "value", "kind"])?;
    for idx in indices {
        for (p, v) in idx.series.iter() {
            w.write_record([p.to_string(), format_value(v), idx.kind.as_str().to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountVariant {
    #[default]
    Simple,
    Standardized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightChoice {
    Fixed(f64),
    Grid { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSettings {
    pub variant: CountVariant,
    pub frequency: Frequency,
    pub normalization_window: PeriodWindow,
    /// Standard-deviation windows for the standardized "off" counts.
    pub off_sd_window: PeriodWindow,
    pub weight: WeightChoice,
}

impl Default for IndexSettings {
    fn default() -> Self {
        Self {
            variant: CountVariant::Simple,
            frequency: Frequency::Quarterly,
            normalization_window: PeriodWindow::full(),
            off_sd_window: PeriodWindow::full(),
            weight: WeightChoice::Fixed(0.4),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexBundle {
    pub on: IntensityIndex,
    pub off: IntensityIndex,
    pub net: IntensityIndex,
    pub search: Option<WeightSearch>,
    pub excluded_months: BTreeMap<IndexKind, Vec<PeriodLabel>>,
}

/// Monthly counts -> mean over each target period -> unit-max
/// normalization -> netting (fixed or grid-searched weight).
pub fn build_indices(
    on_panel: &ArticleCountPanel,
    off_panel: &ArticleCountPanel,
    settings: &IndexSettings,
    output_growth: Option<&CalendarSeries>,
) -> Result<IndexBundle> {
    let (on_m, off_m) = match settings.variant {
        CountVariant::Simple => (monthly_mean_count(on_panel)?, monthly_mean_count(off_panel)?),
        CountVariant::Standardized => (
            standardized_monthly_count(on_panel)?,
            standardized_monthly_count_within(off_panel, &settings.off_sd_window)?,
        ),
    };
    let to_freq = |s: &CalendarSeries| -> Result<CalendarSeries> {
        if settings.frequency == Frequency::Monthly {
            Ok(s.clone())
        } else {
            crate::timeseries::aggregate(s, settings.frequency, crate::timeseries::AggregationMethod::Mean)
        }
    };
    let on_q = to_freq(&on_m.series)?;
    let off_q = to_freq(&off_m.series)?;
    let (lo, hi) = crate::timeseries::common_span(&[&on_q, &off_q])?;
    let on = normalize_unit_max(&on_q.slice(lo, hi)?, &settings.normalization_window, IndexKind::On)?;
    let off = normalize_unit_max(&off_q.slice(lo, hi)?, &settings.normalization_window, IndexKind::Off)?;
    let (w, search) = match &settings.weight {
        WeightChoice::Fixed(w) => (*w, None),
        WeightChoice::Grid { step } => {
            let dy = output_growth.ok_or_else(|| {
                Error::Parameter("grid search over the net weight needs an output growth series".into())
            })?;
            let s = grid_search_weight(&on, &off, dy, *step)?;
            (s.w_hat, Some(s))
        }
    };
    let net = net_index(&on, &off, w)?;
    let mut excluded_months = BTreeMap::new();
    excluded_months.insert(IndexKind::On, on_m.excluded);
    excluded_months.insert(IndexKind::Off, off_m.excluded);
    Ok(IndexBundle {
        on,
        off,
        net,
        search,
        excluded_months,
    })
}
