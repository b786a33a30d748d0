use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, unit_vector};
use crate::svar::StructuralModel;

pub const DEFAULT_HORIZON: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Stacked,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "name", rename_all = "lowercase")]
pub enum Shock {
    Domestic(String),
    Sanction,
    Global(String),
}

impl Shock {
    pub fn label(&self) -> &str {
        match self {
            Shock::Domestic(n) | Shock::Global(n) => n,
            Shock::Sanction => "sanction",
        }
    }
}

/// Responses of every variable to one shock: row `h` is horizon `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockResponse {
    pub shock: Shock,
    pub scale: f64,
    #[serde(with = "linalg::rows")]
    pub responses: DMatrix<f64>,
}

impl ShockResponse {
    fn from_paths(shock: Shock, scale: f64, paths: &[DVector<f64>]) -> Self {
        let m = paths.first().map_or(0, |v| v.len());
        let mut responses = DMatrix::zeros(paths.len(), m);
        for (h, v) in paths.iter().enumerate() {
            responses.row_mut(h).copy_from(&(v * scale).transpose());
        }
        Self {
            shock,
            scale,
            responses,
        }
    }

    pub fn horizon(&self) -> usize {
        self.responses.nrows().saturating_sub(1)
    }

    pub fn at(&self, h: usize, variable: usize) -> f64 {
        self.responses[(h, variable)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub horizon: usize,
    pub method: Method,
    pub variables: Vec<String>,
    /// Companion stationarity at the time of computation; responses of a
    /// nonstationary system are still reported.
    pub stationary: bool,
    pub max_modulus: f64,
    pub shocks: Vec<ShockResponse>,
}

impl IrfResult {
    pub fn get(&self, shock: &Shock) -> Option<&ShockResponse> {
        self.shocks.iter().find(|s| &s.shock == shock)
    }

    /// Largest absolute difference over shocks present in both results.
    pub fn max_deviation(&self, other: &IrfResult) -> f64 {
        self.shocks
            .iter()
            .filter_map(|a| other.get(&a.shock).map(|b| (a, b)))
            .map(|(a, b)| (&a.responses - &b.responses).abs().max())
            .fold(0.0, f64::max)
    }
}

/// `G_l = Phi1 G_{l-1} + Phi2 G_{l-2}`, `G_{-1} = 0`, `G_0 = I`.
pub fn g_recursion(phi1: &DMatrix<f64>, phi2: &DMatrix<f64>, horizon: usize) -> Result<Vec<DMatrix<f64>>> {
    let m = phi1.nrows();
    if phi1.ncols() != m || phi2.nrows() != m || phi2.ncols() != m {
        return Err(Error::Spec(format!(
            "Phi1 is {}x{} and Phi2 is {}x{}; both must be square and equal",
            phi1.nrows(),
            phi1.ncols(),
            phi2.nrows(),
            phi2.ncols()
        )));
    }
    let mut g = Vec::with_capacity(horizon + 1);
    g.push(DMatrix::identity(m, m));
    for l in 1..=horizon {
        let mut next = phi1 * &g[l - 1];
        if l >= 2 {
            next += phi2 * &g[l - 2];
        }
        g.push(next);
    }
    Ok(g)
}

pub(crate) fn g_for(model: &StructuralModel, horizon: usize) -> Result<Vec<DMatrix<f64>>> {
    model.check()?;
    let rf = model.reduced_form()?;
    g_recursion(&rf.phi1, &rf.phi2, horizon)
}

/// `sum_{l=0}^{h} G_{h-l} A0^-1 d_l` for each `h`.
fn convolve(g: &[DMatrix<f64>], a0_inv: &DMatrix<f64>, d: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mapped: Vec<DVector<f64>> = d.iter().map(|v| a0_inv * v).collect();
    (0..g.len())
        .map(|h| {
            let mut acc = DVector::zeros(a0_inv.nrows());
            for l in 0..=h {
                acc += &g[h - l] * &mapped[l];
            }
            acc
        })
        .collect()
}

/// Unscaled domestic paths `G_h A0^-1 e_j`.
pub(crate) fn domestic_paths(g: &[DMatrix<f64>], a0_inv: &DMatrix<f64>, j: usize) -> Vec<DVector<f64>> {
    let col = a0_inv.column(j).into_owned();
    g.iter().map(|gh| gh * &col).collect()
}

/// `b_h` of the sanction shock, before scaling by `omega_s`.
pub(crate) fn sanction_paths(model: &StructuralModel, g: &[DMatrix<f64>]) -> Result<Vec<DVector<f64>>> {
    if !(model.rho_s.abs() < 1.0) {
        return Err(Error::Nonstationary(format!(
            "intervention process has rho = {}; |rho| must be below 1",
            model.rho_s
        )));
    }
    let d: Vec<DVector<f64>> = (0..g.len())
        .map(|l| {
            let mut v = &model.gamma0 * model.rho_s.powi(l as i32);
            if l >= 1 {
                v += &model.gamma1 * model.rho_s.powi(l as i32 - 1);
            }
            v
        })
        .collect();
    Ok(convolve(g, &model.a0_inverse(), &d))
}

pub(crate) fn check_controls_stationary(model: &StructuralModel) -> Result<()> {
    let radius = linalg::spectral_radius(&model.a_zw)
        .ok_or_else(|| Error::Degenerate("control-process eigenvalues did not converge".into()))?;
    if !(radius < 1.0) {
        return Err(Error::Nonstationary(format!(
            "control process has spectral radius {radius}; must be below 1"
        )));
    }
    Ok(())
}

/// `kappa_h` of a shock to control `c`, before scaling.
pub(crate) fn global_paths(model: &StructuralModel, g: &[DMatrix<f64>], c: usize) -> Result<Vec<DVector<f64>>> {
    check_controls_stationary(model)?;
    let mut cl = unit_vector(model.k(), c);
    let mut d = Vec::with_capacity(g.len());
    for _ in 0..g.len() {
        d.push(&model.dw * &cl);
        cl = &model.a_zw * cl;
    }
    Ok(convolve(g, &model.a0_inverse(), &d))
}

/// Response to a one standard error shock to domestic variable `variable`.
pub fn irf_domestic(model: &StructuralModel, variable: &str, horizon: usize) -> Result<ShockResponse> {
    let j = model.variable_index(variable)?;
    let g = g_for(model, horizon)?;
    let scale = model.sigma[j].sqrt();
    Ok(ShockResponse::from_paths(
        Shock::Domestic(variable.to_string()),
        scale,
        &domestic_paths(&g, &model.a0_inverse(), j),
    ))
}

/// Response to a one standard error innovation in the intervention
/// process.
pub fn irf_sanction(model: &StructuralModel, horizon: usize) -> Result<ShockResponse> {
    let g = g_for(model, horizon)?;
    Ok(ShockResponse::from_paths(
        Shock::Sanction,
        model.omega_s,
        &sanction_paths(model, &g)?,
    ))
}

/// Response to a one standard error innovation in control `control`.
pub fn irf_global(model: &StructuralModel, control: &str, horizon: usize) -> Result<ShockResponse> {
    let c = model.control_index(control)?;
    let g = g_for(model, horizon)?;
    Ok(ShockResponse::from_paths(
        Shock::Global(control.to_string()),
        model.omega_control(c),
        &global_paths(model, &g, c)?,
    ))
}

/// All domestic shocks, the sanction shock and, when named, one global
/// shock, by the moving-average formulas.
pub fn impulse_responses(model: &StructuralModel, horizon: usize, global: Option<&str>) -> Result<IrfResult> {
    let g = g_for(model, horizon)?;
    let rf = model.reduced_form()?;
    let a0_inv = model.a0_inverse();
    let mut shocks: Vec<ShockResponse> = (0..model.m())
        .map(|j| {
            ShockResponse::from_paths(
                Shock::Domestic(model.variables[j].clone()),
                model.sigma[j].sqrt(),
                &domestic_paths(&g, &a0_inv, j),
            )
        })
        .collect();
    shocks.push(ShockResponse::from_paths(
        Shock::Sanction,
        model.omega_s,
        &sanction_paths(model, &g)?,
    ));
    if let Some(name) = global {
        let c = model.control_index(name)?;
        shocks.push(ShockResponse::from_paths(
            Shock::Global(name.to_string()),
            model.omega_control(c),
            &global_paths(model, &g, c)?,
        ));
    }
    Ok(IrfResult {
        horizon,
        method: Method::Direct,
        variables: model.variables.clone(),
        stationary: rf.stationary,
        max_modulus: rf.max_modulus,
        shocks,
    })
}
