use nalgebra::{DMatrix, DVector};

use super::fevd::{fevd_columns, require_stationary, shares, FevdResult};
use super::irf::{check_controls_stationary, g_recursion, IrfResult, Method, Shock, ShockResponse};
use crate::error::{Error, Result};
use crate::svar::StructuralModel;

/// IRFs and FEVDs from the stacked system over `(q, s, z)`:
/// `F_l = Phi1~ F_{l-1} + Phi2~ F_{l-2}` with `Phi_j~ = Psi0~^-1 Psi_j~`.
pub fn stacked_dynamics(
    model: &StructuralModel,
    horizon: usize,
    global: Option<&str>,
) -> Result<(IrfResult, FevdResult)> {
    let irf = stacked_irf(model, horizon, global)?;
    require_stationary(model)?;
    let m = model.m();
    let (psi0_inv, f) = stacked_f(model, horizon)?;
    let gc = global.map(|n| model.control_index(n)).transpose()?;

    let n = model.stacked_dim();
    let mut sigma = DVector::zeros(n);
    for j in 0..m {
        sigma[j] = model.sigma[j];
    }
    sigma[m] = model.omega_s * model.omega_s;
    if let Some(c) = gc {
        sigma[m + 1 + c] = model.omega_w[(c, c)];
    }
    let global_col = gc.map(|c| m + 1 + c);

    let loads: Vec<DMatrix<f64>> = f.iter().map(|fl| fl.rows(0, m) * &psi0_inv).collect();
    let mut contrib: Vec<Vec<DVector<f64>>> = (0..=m)
        .map(|j| loads.iter().map(|l| l.column(j) * sigma[j].sqrt()).collect())
        .collect();
    contrib.push(match global_col {
        Some(j) => loads.iter().map(|l| l.column(j) * sigma[j].sqrt()).collect(),
        None => vec![DVector::zeros(m); horizon + 1],
    });
    let sig = DMatrix::from_diagonal(&sigma);
    let total: Vec<DVector<f64>> = loads
        .iter()
        .map(|l| (l * &sig * l.transpose()).diagonal())
        .collect();

    let fevd = FevdResult {
        horizon,
        method: Method::Stacked,
        variables: model.variables.clone(),
        columns: fevd_columns(model, global),
        global: global.map(str::to_string),
        tables: shares(m, horizon, &contrib, &total)?,
    };
    Ok((irf, fevd))
}

fn stacked_f(model: &StructuralModel, horizon: usize) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
    model.check()?;
    let (p0, p1, p2, _) = model.psi();
    let inv = p0
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("Psi0 is singular".into()))?;
    let f = g_recursion(&(&inv * p1), &(&inv * p2), horizon)?;
    Ok((inv, f))
}

/// Stacked-system IRFs for the same shocks as the direct path.
pub fn stacked_irf(model: &StructuralModel, horizon: usize, global: Option<&str>) -> Result<IrfResult> {
    if !(model.rho_s.abs() < 1.0) {
        return Err(Error::Nonstationary(format!(
            "intervention process has rho = {}; |rho| must be below 1",
            model.rho_s
        )));
    }
    let m = model.m();
    let (psi0_inv, f) = stacked_f(model, horizon)?;
    let response = |shock: Shock, j: usize, scale: f64| {
        let mut r = DMatrix::zeros(horizon + 1, m);
        for (h, fh) in f.iter().enumerate() {
            let col = fh.rows(0, m) * psi0_inv.column(j) * scale;
            r.row_mut(h).copy_from(&col.transpose());
        }
        ShockResponse {
            shock,
            scale,
            responses: r,
        }
    };
    let mut shocks: Vec<ShockResponse> = (0..m)
        .map(|j| response(Shock::Domestic(model.variables[j].clone()), j, model.sigma[j].sqrt()))
        .collect();
    shocks.push(response(Shock::Sanction, m, model.omega_s));
    if let Some(name) = global {
        let c = model.control_index(name)?;
        check_controls_stationary(model)?;
        shocks.push(response(Shock::Global(name.to_string()), m + 1 + c, model.omega_control(c)));
    }
    let rf = model.reduced_form()?;
    Ok(IrfResult {
        horizon,
        method: Method::Stacked,
        variables: model.variables.clone(),
        stationary: rf.stationary,
        max_modulus: rf.max_modulus,
        shocks,
    })
}
