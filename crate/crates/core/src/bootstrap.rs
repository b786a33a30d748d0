//! Residual-resampling bootstrap bands for impulse responses.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{impulse_responses, IrfResult, Shock, ShockBands};
use crate::error::{Error, Result};
use crate::linalg;
use crate::svar::{align, estimate_aligned, AlignedSample, DataPanel, StructuralModel, SvarEstimate};

pub const DEFAULT_REPLICATIONS: usize = 1000;
pub const DEFAULT_QUANTILES: (f64, f64) = (0.05, 0.95);
pub const MAX_DROP_SHARE: f64 = 0.05;
pub const GENERATOR: &str = "ChaCha20";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resampling {
    /// Each equation's residuals are drawn independently.
    #[default]
    Separate,
    /// Whole residual rows are drawn, keeping cross-equation dependence.
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSettings {
    pub replications: usize,
    pub quantiles: (f64, f64),
    pub seed: u64,
    pub resampling: Resampling,
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        Self {
            replications: DEFAULT_REPLICATIONS,
            quantiles: DEFAULT_QUANTILES,
            seed: 0,
            resampling: Resampling::Separate,
        }
    }
}

impl BootstrapSettings {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.quantiles;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::Parameter(format!(
                "band quantiles ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1"
            )));
        }
        if self.replications == 0 {
            return Err(Error::Parameter("bootstrap needs at least one replication".into()));
        }
        Ok(())
    }
}

/// Residual pools of the stacked system, one column per component of
/// `(q, s, z)`, all of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPools {
    columns: Vec<Vec<f64>>,
}

impl ResidualPools {
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::Sample("empty residual pool".into()));
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Alignment("residual pools differ in length".into()));
        }
        Ok(Self { columns })
    }

    /// Pools of a fitted system: equation residuals, then the intervention
    /// and control innovations. A spec without the intervention gets a zero
    /// pool in its place.
    pub fn from_estimate(est: &SvarEstimate) -> Result<Self> {
        let n = est.nobs;
        let mut columns: Vec<Vec<f64>> = est.equations.iter().map(|f| f.residuals.clone()).collect();
        columns.push(match &est.s_process {
            Some(f) => f.residuals().to_vec(),
            None => vec![0.0; n],
        });
        columns.extend(est.controls_process.residuals().into_iter().map(<[f64]>::to_vec));
        Self::new(columns)
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn draw(&self, rng: &mut ChaCha20Rng, mode: Resampling) -> DVector<f64> {
        let n = self.len() as u64;
        match mode {
            Resampling::Joint => {
                let t = rng.random_range(0..n) as usize;
                DVector::from_iterator(self.dim(), self.columns.iter().map(|c| c[t]))
            }
            Resampling::Separate => DVector::from_iterator(
                self.dim(),
                self.columns.iter().map(|c| c[rng.random_range(0..n) as usize]),
            ),
        }
    }
}

/// Pointwise quantiles and median over replications for one shock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    pub shock: Shock,
    #[serde(with = "linalg::rows")]
    pub lower: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub median: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub upper: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapMetadata {
    pub replications: usize,
    pub completed: usize,
    pub dropped: usize,
    pub quantiles: (f64, f64),
    /// `hi - lo`; the nominal coverage of the bands.
    pub nominal_coverage: f64,
    pub seed: u64,
    pub generator: String,
    pub resampling: Resampling,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapBands {
    pub metadata: BootstrapMetadata,
    pub tables: Vec<BandTable>,
}

impl BootstrapBands {
    pub fn get(&self, shock: &Shock) -> Option<&BandTable> {
        self.tables.iter().find(|t| &t.shock == shock)
    }

    /// Lower and upper bands in the form the IRF writers take.
    pub fn shock_bands(&self) -> Vec<ShockBands> {
        self.tables
            .iter()
            .map(|t| ShockBands {
                shock: t.shock.clone(),
                lower: t.lower.clone(),
                upper: t.upper.clone(),
            })
            .collect()
    }

    pub fn write_metadata<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.metadata)?;
        Ok(())
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let i = pos.floor() as usize;
    if i + 1 >= n {
        return sorted[n - 1];
    }
    let frac = pos - i as f64;
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

/// One simulated sample: the first two rows of `sample` are kept and the
/// rest are generated by `model` from resampled innovations.
pub fn resample(
    model: &StructuralModel,
    pools: &ResidualPools,
    sample: &AlignedSample,
    mode: Resampling,
    rng: &mut ChaCha20Rng,
) -> Result<AlignedSample> {
    let rows = sample.rows();
    if rows < 3 {
        return Err(Error::Length {
            what: "bootstrap sample",
            needed: 3,
            got: rows,
        });
    }
    if pools.dim() != model.stacked_dim() {
        return Err(Error::Spec(format!(
            "{} residual pools for a stacked system of dimension {}",
            pools.dim(),
            model.stacked_dim()
        )));
    }
    let innovations: Vec<DVector<f64>> = (2..rows).map(|_| pools.draw(rng, mode)).collect();
    let z0 = sample.stacked_row(0);
    let z1 = sample.stacked_row(1);
    let z = model.simulate([&z0, &z1], &innovations)?;
    Ok(sample.from_stacked(&z))
}

/// Bootstrap over any re-estimation: `estimator` maps a simulated sample to
/// impulse responses. Replications whose estimator fails are dropped; more
/// than [`MAX_DROP_SHARE`] dropped aborts the run.
pub fn bootstrap_with<F>(
    model: &StructuralModel,
    pools: &ResidualPools,
    sample: &AlignedSample,
    settings: &BootstrapSettings,
    estimator: F,
) -> Result<BootstrapBands>
where
    F: Fn(&AlignedSample) -> Result<IrfResult> + Sync,
{
    settings.validate()?;
    let runs: Vec<Result<IrfResult>> = (0..settings.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(settings.seed.wrapping_add(r as u64));
            let sim = resample(model, pools, sample, settings.resampling, &mut rng)?;
            estimator(&sim)
        })
        .collect();

    let mut ok = Vec::with_capacity(runs.len());
    let mut dropped = 0;
    let mut last = String::new();
    for run in runs {
        match run {
            Ok(irf) => ok.push(irf),
            Err(e) => {
                dropped += 1;
                last = e.to_string();
            }
        }
    }
    if dropped as f64 > MAX_DROP_SHARE * settings.replications as f64 || ok.is_empty() {
        return Err(Error::BootstrapAborted {
            dropped,
            replications: settings.replications,
            last,
        });
    }

    let first = &ok[0];
    let (lo, hi) = settings.quantiles;
    let mut tables = Vec::with_capacity(first.shocks.len());
    for (k, s) in first.shocks.iter().enumerate() {
        let (rows, cols) = s.responses.shape();
        let mut lower = DMatrix::zeros(rows, cols);
        let mut median = DMatrix::zeros(rows, cols);
        let mut upper = DMatrix::zeros(rows, cols);
        let mut values = Vec::with_capacity(ok.len());
        for h in 0..rows {
            for i in 0..cols {
                values.clear();
                values.extend(ok.iter().map(|irf| irf.shocks[k].responses[(h, i)]));
                values.sort_by(f64::total_cmp);
                lower[(h, i)] = quantile_sorted(&values, lo);
                median[(h, i)] = quantile_sorted(&values, 0.5);
                upper[(h, i)] = quantile_sorted(&values, hi);
            }
        }
        tables.push(BandTable {
            shock: s.shock.clone(),
            lower,
            median,
            upper,
        });
    }

    Ok(BootstrapBands {
        metadata: BootstrapMetadata {
            replications: settings.replications,
            completed: ok.len(),
            dropped,
            quantiles: settings.quantiles,
            nominal_coverage: hi - lo,
            seed: settings.seed,
            generator: GENERATOR.to_string(),
            resampling: settings.resampling,
            horizon: first.horizon,
        },
        tables,
    })
}

/// Bands for every IRF of `est`: resample residuals, simulate the stacked
/// system from the first two observations of `data`, re-estimate the same
/// specification and recompute the responses.
pub fn bootstrap_irf(
    est: &SvarEstimate,
    data: &DataPanel,
    horizon: usize,
    global: Option<&str>,
    settings: &BootstrapSettings,
) -> Result<BootstrapBands> {
    let mut spec = est.spec.clone();
    spec.sample.start = Some(est.sample_start);
    spec.sample.end = Some(est.sample_end);
    let sample = align(&spec, data)?;
    if sample.nobs() != est.nobs {
        return Err(Error::Alignment(format!(
            "data give {} observations, the estimate has {}",
            sample.nobs(),
            est.nobs
        )));
    }
    let pools = ResidualPools::from_estimate(est)?;
    bootstrap_with(&est.model, &pools, &sample, settings, |sim| {
        let e = estimate_aligned(&est.spec, sim)?;
        impulse_responses(&e.model, horizon, global)
    })
}
