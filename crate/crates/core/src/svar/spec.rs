use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::lag_name;
use crate::timeseries::PeriodLabel;

/// Highest lag the structural system carries (`A_1`, `A_2`).
pub const MAX_LAG: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagTerm {
    pub variable: String,
    pub lag: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFlags {
    pub contemporaneous: bool,
    pub lagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterventionSpec {
    #[serde(default = "default_intervention")]
    pub variable: String,
    #[serde(default = "yes")]
    pub contemporaneous: bool,
    #[serde(default = "yes")]
    pub lagged: bool,
    /// Overrides of the two flags for named equations.
    #[serde(default)]
    pub per_equation: BTreeMap<String, TermFlags>,
}

impl Default for InterventionSpec {
    fn default() -> Self {
        Self {
            variable: default_intervention(),
            contemporaneous: true,
            lagged: true,
            per_equation: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlProcessKind {
    /// Independent AR(1) per control.
    #[default]
    Ar1,
    /// Joint VAR(1) across controls.
    Var1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRange {
    #[serde(default)]
    pub start: Option<PeriodLabel>,
    #[serde(default)]
    pub end: Option<PeriodLabel>,
}

fn default_intervention() -> String {
    "s".into()
}

fn default_lags() -> Vec<usize> {
    vec![1, 2]
}

fn yes() -> bool {
    true
}

/// Recursive structural VAR specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvarSpec {
    pub ordering: Vec<String>,
    /// Lags of every endogenous variable in every equation.
    #[serde(default = "default_lags")]
    pub lags: Vec<usize>,
    #[serde(default)]
    pub per_equation_extras: BTreeMap<String, Vec<LagTerm>>,
    #[serde(default)]
    pub intervention: InterventionSpec,
    #[serde(default)]
    pub controls: Vec<String>,
    #[serde(default)]
    pub controls_process: ControlProcessKind,
    #[serde(default = "yes")]
    pub intercept: bool,
    #[serde(default)]
    pub sample: SampleRange,
}

/// One right-hand-side term of a structural equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regressor {
    Intervention { lag: usize },
    Endogenous { index: usize, lag: usize },
    Control { index: usize },
}

impl SvarSpec {
    pub fn new(ordering: &[&str]) -> Self {
        Self {
            ordering: ordering.iter().map(|s| s.to_string()).collect(),
            lags: default_lags(),
            per_equation_extras: BTreeMap::new(),
            intervention: InterventionSpec::default(),
            controls: Vec::new(),
            controls_process: ControlProcessKind::Ar1,
            intercept: true,
            sample: SampleRange::default(),
        }
    }

    pub fn with_lags(mut self, lags: &[usize]) -> Self {
        self.lags = lags.to_vec();
        self
    }

    pub fn with_controls(mut self, controls: &[&str]) -> Self {
        self.controls = controls.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_extra(mut self, equation: &str, variable: &str, lag: usize) -> Self {
        self.per_equation_extras
            .entry(equation.to_string())
            .or_default()
            .push(LagTerm {
                variable: variable.to_string(),
                lag,
            });
        self
    }

    pub fn without_intervention(mut self) -> Self {
        self.intervention.contemporaneous = false;
        self.intervention.lagged = false;
        self.intervention.per_equation.clear();
        self
    }

    pub fn m(&self) -> usize {
        self.ordering.len()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.ordering.iter().position(|n| n == name)
    }

    pub fn intervention_terms(&self, equation: usize) -> TermFlags {
        self.intervention
            .per_equation
            .get(&self.ordering[equation])
            .copied()
            .unwrap_or(TermFlags {
                contemporaneous: self.intervention.contemporaneous,
                lagged: self.intervention.lagged,
            })
    }

    pub fn uses_intervention(&self) -> bool {
        (0..self.m()).any(|i| {
            let f = self.intervention_terms(i);
            f.contemporaneous || f.lagged
        })
    }

    /// Largest lag of any term, including the lagged intervention.
    pub fn max_lag(&self) -> usize {
        let endo = self.lags.iter().copied();
        let extra = self.per_equation_extras.values().flatten().map(|t| t.lag);
        let s = (0..self.m()).filter(|i| self.intervention_terms(*i).lagged).map(|_| 1);
        endo.chain(extra).chain(s).max().unwrap_or(0).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ordering.is_empty() {
            return Err(Error::Spec("ordering is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for n in self.ordering.iter().chain(&self.controls) {
            if n.is_empty() {
                return Err(Error::Spec("empty variable name".into()));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Spec(format!("variable '{n}' listed more than once")));
            }
        }
        if self.uses_intervention() && seen.contains(self.intervention.variable.as_str()) {
            return Err(Error::Spec(format!(
                "intervention variable '{}' also listed as endogenous or control",
                self.intervention.variable
            )));
        }
        let check_lag = |lag: usize| {
            if lag == 0 || lag > MAX_LAG {
                Err(Error::Spec(format!("lag {lag} outside 1..={MAX_LAG}")))
            } else {
                Ok(())
            }
        };
        let mut lags = BTreeSet::new();
        for l in &self.lags {
            check_lag(*l)?;
            if !lags.insert(*l) {
                return Err(Error::Spec(format!("lag {l} listed twice")));
            }
        }
        for (eq, terms) in &self.per_equation_extras {
            if self.position(eq).is_none() {
                return Err(Error::UnknownVariable(eq.clone()));
            }
            for t in terms {
                check_lag(t.lag)?;
                if self.position(&t.variable).is_none() {
                    return Err(Error::UnknownVariable(t.variable.clone()));
                }
            }
        }
        for eq in self.intervention.per_equation.keys() {
            if self.position(eq).is_none() {
                return Err(Error::UnknownVariable(eq.clone()));
            }
        }
        if let (Some(a), Some(b)) = (self.sample.start, self.sample.end) {
            if a > b {
                return Err(Error::Spec(format!("sample start {a} after end {b}")));
            }
        }
        for i in 0..self.m() {
            let terms = self.regressors(i);
            let mut names = BTreeSet::new();
            for r in &terms {
                let n = self.regressor_name(r);
                if !names.insert(n.clone()) {
                    return Err(Error::Spec(format!(
                        "equation '{}' lists regressor '{n}' twice",
                        self.ordering[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Right-hand side of equation `i`, in design-column order.
    pub fn regressors(&self, i: usize) -> Vec<Regressor> {
        let mut out = Vec::new();
        let flags = self.intervention_terms(i);
        if flags.contemporaneous {
            out.push(Regressor::Intervention { lag: 0 });
        }
        if flags.lagged {
            out.push(Regressor::Intervention { lag: 1 });
        }
        for j in 0..i {
            out.push(Regressor::Endogenous { index: j, lag: 0 });
        }
        let mut lags = self.lags.clone();
        lags.sort_unstable();
        for l in lags {
            for j in 0..self.m() {
                out.push(Regressor::Endogenous { index: j, lag: l });
            }
        }
        if let Some(extra) = self.per_equation_extras.get(&self.ordering[i]) {
            for t in extra {
                if let Some(j) = self.position(&t.variable) {
                    out.push(Regressor::Endogenous { index: j, lag: t.lag });
                }
            }
        }
        for c in 0..self.controls.len() {
            out.push(Regressor::Control { index: c });
        }
        out
    }

    pub fn regressor_name(&self, r: &Regressor) -> String {
        match *r {
            Regressor::Intervention { lag } => lag_name(&self.intervention.variable, lag),
            Regressor::Endogenous { index, lag } => lag_name(&self.ordering[index], lag),
            Regressor::Control { index } => self.controls[index].clone(),
        }
    }
}
