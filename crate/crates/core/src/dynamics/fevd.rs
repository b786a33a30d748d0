use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::irf::{domestic_paths, g_for, global_paths, sanction_paths, Method};
use crate::error::{Error, Result};
use crate::svar::StructuralModel;

/// Companion moduli at or above this bound are treated as nonstationary.
pub const STATIONARITY_BOUND: f64 = 1.0 - 1e-8;

/// Forecast-error variance shares. `tables[i]` has one row per horizon and
/// columns `variables..., sanction, global`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FevdResult {
    pub horizon: usize,
    pub method: Method,
    pub variables: Vec<String>,
    pub columns: Vec<String>,
    pub global: Option<String>,
    #[serde(with = "tables")]
    pub tables: Vec<DMatrix<f64>>,
}

mod tables {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct T(#[serde(with = "crate::linalg::rows")] DMatrix<f64>);

    pub fn serialize<S: Serializer>(v: &[DMatrix<f64>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|m| T(m.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DMatrix<f64>>, D::Error> {
        Ok(Vec::<T>::deserialize(d)?.into_iter().map(|t| t.0).collect())
    }
}

impl FevdResult {
    pub fn share(&self, variable: usize, h: usize, column: usize) -> f64 {
        self.tables[variable][(h, column)]
    }

    /// Largest `|row sum - 1|` over every table.
    pub fn max_row_error(&self) -> f64 {
        self.tables
            .iter()
            .flat_map(|t| t.row_iter().map(|r| (r.sum() - 1.0).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &FevdResult) -> f64 {
        self.tables
            .iter()
            .zip(&other.tables)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn fevd_columns(model: &StructuralModel, global: Option<&str>) -> Vec<String> {
    let mut cols = model.variables.clone();
    cols.push("sanction".into());
    cols.push(global.unwrap_or("global").to_string());
    cols
}

pub(crate) fn require_stationary(model: &StructuralModel) -> Result<()> {
    let rf = model.reduced_form()?;
    if rf.max_modulus >= STATIONARITY_BOUND {
        let moduli: Vec<String> = rf.eigenvalues.iter().map(|e| format!("{:.6}", e.modulus)).collect();
        return Err(Error::Nonstationary(format!(
            "companion eigenvalue moduli [{}]; variance decompositions need all below 1",
            moduli.join(", ")
        )));
    }
    Ok(())
}

/// Accumulates squared contributions into shares. `contrib[c][l]` is the
/// vector of loadings of shock column `c` at lag `l`, already multiplied by
/// the shock's standard deviation; `total[l][i]` is the denominator term.
pub(crate) fn shares(
    m: usize,
    horizon: usize,
    contrib: &[Vec<DVector<f64>>],
    total: &[DVector<f64>],
) -> Result<Vec<DMatrix<f64>>> {
    let ncol = contrib.len();
    let mut tables = vec![DMatrix::zeros(horizon + 1, ncol); m];
    for i in 0..m {
        let mut num = vec![0.0; ncol];
        let mut den = 0.0;
        for h in 0..=horizon {
            for (c, path) in contrib.iter().enumerate() {
                num[c] += path[h][i] * path[h][i];
            }
            den += total[h][i];
            if !(den > 0.0) {
                return Err(Error::Degenerate(format!(
                    "variable {i} has zero forecast-error variance at horizon {h}"
                )));
            }
            for c in 0..ncol {
                tables[i][(h, c)] = num[c] / den;
            }
        }
    }
    Ok(tables)
}

/// Shares of the domestic, sanction and (optionally) one global shock in
/// each variable's h-step forecast-error variance.
pub fn fevd(model: &StructuralModel, horizon: usize, global: Option<&str>) -> Result<FevdResult> {
    require_stationary(model)?;
    let g = g_for(model, horizon)?;
    let m = model.m();
    let a0_inv = model.a0_inverse();
    let mut contrib: Vec<Vec<DVector<f64>>> = (0..m)
        .map(|j| {
            let sd = model.sigma[j].sqrt();
            domestic_paths(&g, &a0_inv, j).into_iter().map(|v| v * sd).collect()
        })
        .collect();
    let b = sanction_paths(model, &g)?;
    contrib.push(b.iter().map(|v| v * model.omega_s).collect());
    let (kappa, omega_c) = match global {
        Some(name) => {
            let c = model.control_index(name)?;
            (global_paths(model, &g, c)?, model.omega_control(c))
        }
        None => (vec![DVector::zeros(m); horizon + 1], 0.0),
    };
    contrib.push(kappa.iter().map(|v| v * omega_c).collect());

    let sigma = DMatrix::from_diagonal(&DVector::from_column_slice(&model.sigma));
    let total: Vec<DVector<f64>> = (0..=horizon)
        .map(|l| {
            let ga = &g[l] * &a0_inv;
            let dom = &ga * &sigma * ga.transpose();
            DVector::from_fn(m, |i, _| {
                dom[(i, i)]
                    + model.omega_s * model.omega_s * b[l][i] * b[l][i]
                    + omega_c * omega_c * kappa[l][i] * kappa[l][i]
            })
        })
        .collect();

    Ok(FevdResult {
        horizon,
        method: Method::Direct,
        variables: model.variables.clone(),
        columns: fevd_columns(model, global),
        global: global.map(str::to_string),
        tables: shares(m, horizon, &contrib, &total)?,
    })
}
