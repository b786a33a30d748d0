use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::DataPanel;
use super::model::{ReducedForm, StructuralModel};
use super::spec::{ControlProcessKind, Regressor, SvarSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::regression::{ar_fit, lag_name, ols, ArFit, Design, RegressionFit, INTERCEPT};
use crate::timeseries::{common_span, CalendarSeries, PeriodLabel};

/// Variables of a spec laid out over a common span: `lags` presample rows
/// followed by the estimation sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSample {
    pub start: PeriodLabel,
    pub lags: usize,
    pub endogenous: Vec<Vec<f64>>,
    pub intervention: Option<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
}

impl AlignedSample {
    pub fn rows(&self) -> usize {
        self.endogenous.first().map_or(0, Vec::len)
    }

    pub fn nobs(&self) -> usize {
        self.rows().saturating_sub(self.lags)
    }

    /// Row `t` as the stacked vector `(q, s, z)`; `s` is zero when absent.
    pub fn stacked_row(&self, t: usize) -> DVector<f64> {
        let m = self.endogenous.len();
        let k = self.controls.len();
        let mut z = DVector::zeros(m + 1 + k);
        for (j, c) in self.endogenous.iter().enumerate() {
            z[j] = c[t];
        }
        z[m] = self.intervention.as_ref().map_or(0.0, |s| s[t]);
        for (j, c) in self.controls.iter().enumerate() {
            z[m + 1 + j] = c[t];
        }
        z
    }

    /// Rebuilds a sample from stacked rows, keeping this sample's layout.
    pub fn from_stacked(&self, rows: &[DVector<f64>]) -> Self {
        let m = self.endogenous.len();
        let k = self.controls.len();
        let col = |j: usize| rows.iter().map(|z| z[j]).collect::<Vec<f64>>();
        Self {
            start: self.start,
            lags: self.lags,
            endogenous: (0..m).map(col).collect(),
            intervention: self.intervention.as_ref().map(|_| col(m)),
            controls: (0..k).map(|j| col(m + 1 + j)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControlFits {
    Ar1 {
        fits: Vec<ArFit>,
    },
    Var1 {
        fits: Vec<RegressionFit>,
        #[serde(with = "linalg::rows")]
        omega: DMatrix<f64>,
    },
}

impl ControlFits {
    /// Innovation series per control.
    pub fn residuals(&self) -> Vec<&[f64]> {
        match self {
            ControlFits::Ar1 { fits } => fits.iter().map(|f| f.residuals()).collect(),
            ControlFits::Var1 { fits, .. } => fits.iter().map(|f| f.residuals.as_slice()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvarEstimate {
    pub spec: SvarSpec,
    pub sample_start: PeriodLabel,
    pub sample_end: PeriodLabel,
    pub nobs: usize,
    pub model: StructuralModel,
    pub equations: Vec<RegressionFit>,
    pub s_process: Option<ArFit>,
    pub controls_process: ControlFits,
}

/// `Phi_j = A0^-1 A_j` and the companion eigenvalues.
pub fn reduced_form(est: &SvarEstimate) -> Result<ReducedForm> {
    est.model.reduced_form()
}

/// Lines up the variables a spec needs over their common span.
pub fn align(spec: &SvarSpec, data: &DataPanel) -> Result<AlignedSample> {
    spec.validate()?;
    let p = spec.max_lag();
    let endo: Vec<&CalendarSeries> = spec.ordering.iter().map(|n| data.get(n)).collect::<Result<_>>()?;
    let controls: Vec<&CalendarSeries> = spec.controls.iter().map(|n| data.get(n)).collect::<Result<_>>()?;
    let s = if spec.uses_intervention() {
        Some(data.get(&spec.intervention.variable)?)
    } else {
        None
    };
    let all: Vec<&CalendarSeries> = endo.iter().chain(&controls).chain(s.iter()).copied().collect();
    let (lo, hi) = common_span(&all)?;
    let freq = lo.frequency();
    for b in [spec.sample.start, spec.sample.end].into_iter().flatten() {
        if b.frequency() != freq {
            return Err(Error::Frequency(format!("sample bound {b} does not match {freq} data")));
        }
    }
    let first = spec.sample.start.map_or(lo.offset(p as i64), |s| s.max(lo.offset(p as i64)));
    let last = spec.sample.end.map_or(hi, |e| e.min(hi));
    if first > last {
        return Err(Error::Sample(format!(
            "no observations left after lagging: data span {lo}..{hi}, {p} presample periods"
        )));
    }
    let from = first.offset(-(p as i64));
    let take = |s: &CalendarSeries| -> Result<Vec<f64>> { Ok(s.slice(from, last)?.into_values()) };
    Ok(AlignedSample {
        start: from,
        lags: p,
        endogenous: endo.iter().map(|s| take(s)).collect::<Result<_>>()?,
        intervention: s.map(take).transpose()?,
        controls: controls.iter().map(|s| take(s)).collect::<Result<_>>()?,
    })
}

/// Equation-by-equation least squares on the recursive system, plus the
/// autoregressions of the intervention and control variables.
pub fn estimate_svar(spec: &SvarSpec, data: &DataPanel) -> Result<SvarEstimate> {
    estimate_aligned(spec, &align(spec, data)?)
}

pub fn estimate_aligned(spec: &SvarSpec, sample: &AlignedSample) -> Result<SvarEstimate> {
    spec.validate()?;
    let m = spec.m();
    let k = spec.controls.len();
    let p = sample.lags;
    let rows = sample.rows();
    if sample.endogenous.len() != m || sample.controls.len() != k || p < spec.max_lag() {
        return Err(Error::Spec("aligned sample does not match the specification".into()));
    }
    if spec.uses_intervention() && sample.intervention.is_none() {
        return Err(Error::UnknownVariable(spec.intervention.variable.clone()));
    }
    let n = sample.nobs();
    if n == 0 {
        return Err(Error::Sample("empty estimation sample".into()));
    }

    let column = |r: &Regressor| -> Vec<f64> {
        match *r {
            Regressor::Intervention { lag } => {
                let s = sample.intervention.as_ref().expect("checked above");
                (p..rows).map(|t| s[t - lag]).collect()
            }
            Regressor::Endogenous { index, lag } => (p..rows).map(|t| sample.endogenous[index][t - lag]).collect(),
            Regressor::Control { index } => sample.controls[index][p..].to_vec(),
        }
    };

    let equations = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut design = Design::new();
            for r in spec.regressors(i) {
                design.push(spec.regressor_name(&r), column(&r));
            }
            ols(&sample.endogenous[i][p..], &design, spec.intercept)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut model = StructuralModel::zeros(
        &spec.ordering.iter().map(String::as_str).collect::<Vec<_>>(),
        &spec.controls.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for (i, fit) in equations.iter().enumerate() {
        for (r, b) in spec.regressors(i).iter().zip(&fit.coefficients) {
            match *r {
                Regressor::Intervention { lag: 0 } => model.gamma0[i] = *b,
                Regressor::Intervention { .. } => model.gamma1[i] = *b,
                Regressor::Endogenous { index, lag: 0 } => model.a0[(i, index)] = -b,
                Regressor::Endogenous { index, lag: 1 } => model.a1[(i, index)] = *b,
                Regressor::Endogenous { index, .. } => model.a2[(i, index)] = *b,
                Regressor::Control { index } => model.dw[(i, index)] = *b,
            }
        }
        model.intercept[i] = fit.coefficient(INTERCEPT).unwrap_or(0.0);
        model.sigma[i] = fit.residual_variance();
    }

    let s_process = match &sample.intervention {
        Some(s) if spec.uses_intervention() => {
            let fit = ar_fit(&s[p - 1..], 1)?;
            model.s_intercept = fit.intercept;
            model.rho_s = fit.rho();
            model.omega_s = fit.omega;
            Some(fit)
        }
        _ => None,
    };

    let controls_process = match spec.controls_process {
        ControlProcessKind::Ar1 => {
            let fits = sample
                .controls
                .iter()
                .map(|c| ar_fit(&c[p - 1..], 1))
                .collect::<Result<Vec<_>>>()?;
            for (c, f) in fits.iter().enumerate() {
                model.zw_intercept[c] = f.intercept;
                model.a_zw[(c, c)] = f.rho();
                model.omega_w[(c, c)] = f.omega * f.omega;
            }
            ControlFits::Ar1 { fits }
        }
        ControlProcessKind::Var1 => {
            let mut design = Design::new();
            for (j, name) in spec.controls.iter().enumerate() {
                design.push(lag_name(name, 1), sample.controls[j][p - 1..rows - 1].to_vec());
            }
            let fits = sample
                .controls
                .iter()
                .map(|c| ols(&c[p..], &design, true))
                .collect::<Result<Vec<_>>>()?;
            let df = (n - k - 1) as f64;
            let mut omega = DMatrix::zeros(k, k);
            for a in 0..k {
                for b in 0..k {
                    let cross: f64 = fits[a].residuals.iter().zip(&fits[b].residuals).map(|(x, y)| x * y).sum();
                    omega[(a, b)] = cross / df;
                }
                for b in 0..k {
                    model.a_zw[(a, b)] = fits[a].coefficients[b];
                }
                model.zw_intercept[a] = fits[a].coefficient(INTERCEPT).expect("intercept present");
            }
            model.omega_w = omega.clone();
            ControlFits::Var1 { fits, omega }
        }
    };

    Ok(SvarEstimate {
        spec: spec.clone(),
        sample_start: sample.start.offset(p as i64),
        sample_end: sample.start.offset(rows as i64 - 1),
        nobs: n,
        model,
        equations,
        s_process,
        controls_process,
    })
}
