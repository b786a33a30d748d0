use serde::{Deserialize, Serialize};

use super::ols::{ols, Design, RegressionFit, INTERCEPT};
use crate::error::{Error, Result};

/// `x_t = a + rho_1 x_{t-1} + ... + rho_p x_{t-p} + e_t`, `sd(e) = omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArFit {
    pub order: usize,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub omega: f64,
    pub fit: RegressionFit,
}

impl ArFit {
    /// Lag-one coefficient; the persistence parameter of an AR(1).
    pub fn rho(&self) -> f64 {
        self.coefficients.first().copied().unwrap_or(0.0)
    }

    /// Unconditional mean `a / (1 - sum rho)`.
    pub fn mean(&self) -> f64 {
        self.intercept / (1.0 - self.coefficients.iter().sum::<f64>())
    }

    pub fn residuals(&self) -> &[f64] {
        &self.fit.residuals
    }
}

pub fn lag_name(name: &str, lag: usize) -> String {
    if lag == 0 {
        name.to_string()
    } else {
        format!("{name}(-{lag})")
    }
}

pub fn ar_fit(series: &[f64], p: usize) -> Result<ArFit> {
    if p == 0 {
        return Err(Error::Parameter("autoregressive order must be at least 1".into()));
    }
    let n = series.len();
    if n < 2 * p + 2 {
        return Err(Error::Length {
            what: "autoregression",
            needed: 2 * p + 2,
            got: n,
        });
    }
    let first = series[0];
    if series.iter().all(|v| *v == first) {
        return Err(Error::Degenerate("constant series has no autoregressive structure".into()));
    }
    let y = series[p..].to_vec();
    let mut design = Design::new();
    for l in 1..=p {
        design.push(lag_name("x", l), series[p - l..n - l].to_vec());
    }
    let fit = ols(&y, &design, true)?;
    let intercept = fit.coefficient(INTERCEPT).expect("intercept present");
    let coefficients = fit.coefficients[..p].to_vec();
    if fit.sigma_hat <= 0.0 {
        return Err(Error::Degenerate("series is an exact autoregression; innovation variance is zero".into()));
    }
    Ok(ArFit {
        order: p,
        intercept,
        coefficients,
        omega: fit.sigma_hat,
        fit,
    })
}
