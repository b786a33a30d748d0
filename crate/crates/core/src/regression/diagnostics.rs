use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ols::{fit_matrix, OlsOptions, RegressionFit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerialCorrelationTest {
    pub lm_stat: f64,
    pub p_value: f64,
    pub lags: usize,
}

/// Breusch-Godfrey LM test: regress the residuals on the original
/// regressors and `lags` lagged residuals (initial lags set to zero);
/// `LM = n R^2` referred to a chi-square with `lags` degrees of freedom.
pub fn breusch_godfrey(fit: &RegressionFit, lags: usize) -> Result<SerialCorrelationTest> {
    if lags == 0 {
        return Err(Error::Parameter("Breusch-Godfrey needs at least one lag".into()));
    }
    let n = fit.nobs;
    let k = fit.nregressors;
    if n < lags + k + 1 {
        return Err(Error::Sample(format!(
            "Breusch-Godfrey with {lags} lags and {k} regressors needs {} observations, have {n}",
            lags + k + 1
        )));
    }
    let e = &fit.residuals;
    let ee: f64 = e.iter().map(|v| v * v).sum();
    let ff: f64 = fit.fitted().iter().map(|v| v * v).sum();
    if ee == 0.0 || ee <= 1e-24 * ff {
        return Ok(SerialCorrelationTest {
            lm_stat: 0.0,
            p_value: 1.0,
            lags,
        });
    }

    let mut aux = DMatrix::zeros(n, k + lags);
    aux.view_mut((0, 0), (n, k)).copy_from(&fit.design);
    for l in 1..=lags {
        for t in l..n {
            aux[(t, k + l - 1)] = e[t - l];
        }
    }
    let mut names = fit.names.clone();
    names.extend((1..=lags).map(|l| format!("resid(-{l})")));
    let aux_fit = fit_matrix(
        e,
        aux,
        names,
        OlsOptions {
            intercept: false,
            ..OlsOptions::default()
        },
    )?;
    let r2 = 1.0 - aux_fit.ssr / ee;
    let lm_stat = (n as f64 * r2).max(0.0);
    let chi = ChiSquared::new(lags as f64).expect("positive degrees of freedom");
    Ok(SerialCorrelationTest {
        lm_stat,
        p_value: chi.sf(lm_stat),
        lags,
    })
}
