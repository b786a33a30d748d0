use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub const INTERCEPT: &str = "const";

/// Named regressor columns of equal length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, column: Vec<f64>) -> Self {
        self.push(name, column);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, column: Vec<f64>) {
        self.names.push(name.into());
        self.columns.push(column);
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn nrows(&self) -> Option<usize> {
        self.columns.first().map(Vec::len)
    }

    fn to_matrix(&self, nobs: usize, intercept: bool) -> Result<(DMatrix<f64>, Vec<String>)> {
        let mut names = self.names.clone();
        for (n, c) in self.names.iter().zip(&self.columns) {
            if c.len() != nobs {
                return Err(Error::Alignment(format!(
                    "regressor '{n}' has {} rows, dependent variable has {nobs}",
                    c.len()
                )));
            }
        }
        let k = self.columns.len() + usize::from(intercept);
        let mut x = DMatrix::zeros(nobs, k);
        for (j, c) in self.columns.iter().enumerate() {
            x.column_mut(j).copy_from_slice(c);
        }
        if intercept {
            if names.iter().any(|n| n == INTERCEPT) {
                return Err(Error::Spec(format!("regressor named '{INTERCEPT}' clashes with the intercept")));
            }
            x.column_mut(k - 1).fill(1.0);
            names.push(INTERCEPT.to_string());
        }
        Ok((x, names))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceKind {
    /// `sigma^2 (X'X)^-1`
    #[default]
    Classical,
    /// White HC1.
    Robust,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OlsOptions {
    pub intercept: bool,
    pub covariance: CovarianceKind,
}

impl Default for OlsOptions {
    fn default() -> Self {
        Self {
            intercept: true,
            covariance: CovarianceKind::Classical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    #[serde(with = "linalg::rows")]
    pub covariance: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub sigma_hat: f64,
    pub ssr: f64,
    pub r2: f64,
    pub adjusted_r2: f64,
    pub nobs: usize,
    pub nregressors: usize,
    pub intercept: bool,
    pub covariance_kind: CovarianceKind,
    #[serde(with = "linalg::rows")]
    pub design: DMatrix<f64>,
}

impl RegressionFit {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.coefficients[i])
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.standard_errors[i])
    }

    pub fn residual_variance(&self) -> f64 {
        self.sigma_hat * self.sigma_hat
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.nobs - self.nregressors
    }

    pub fn fitted(&self) -> Vec<f64> {
        let b = DVector::from_column_slice(&self.coefficients);
        (&self.design * b).iter().copied().collect()
    }

    pub fn t_stat(&self, i: usize) -> f64 {
        self.coefficients[i] / self.standard_errors[i]
    }
}

/// Least squares with classical standard errors.
pub fn ols(y: &[f64], x: &Design, intercept: bool) -> Result<RegressionFit> {
    ols_with(
        y,
        x,
        OlsOptions {
            intercept,
            ..OlsOptions::default()
        },
    )
}

pub fn ols_with(y: &[f64], x: &Design, options: OlsOptions) -> Result<RegressionFit> {
    let n = y.len();
    let (xm, names) = x.to_matrix(n, options.intercept)?;
    fit_matrix(y, xm, names, options)
}

pub(crate) fn fit_matrix(
    y: &[f64],
    xm: DMatrix<f64>,
    names: Vec<String>,
    options: OlsOptions,
) -> Result<RegressionFit> {
    let n = y.len();
    let k = xm.ncols();
    if k == 0 {
        return Err(Error::Spec("regression with no regressors".into()));
    }
    if n <= k {
        return Err(Error::Sample(format!(
            "{n} observations for {k} regressors; need more observations than regressors"
        )));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite dependent value at row {i}")));
    }

    let col_norms: Vec<f64> = xm.column_iter().map(|c| c.norm()).collect();
    let qr = xm.clone().qr();
    let r = qr.r();
    let scale = col_norms.iter().cloned().fold(0.0, f64::max);
    let dependent: Vec<String> = (0..k)
        .filter(|&j| {
            let tol = 1e-10 * col_norms[j].max(1e-300);
            col_norms[j] <= 1e-14 * scale.max(1e-300) || r[(j, j)].abs() <= tol
        })
        .map(|j| names[j].clone())
        .collect();
    if !dependent.is_empty() {
        return Err(Error::Collinear { columns: dependent });
    }

    let yv = DVector::from_column_slice(y);
    let q = qr.q();
    let qty = q.transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Collinear { columns: names.clone() })?;

    let fitted = &xm * &beta;
    let resid = &yv - &fitted;
    let ssr = resid.norm_squared();
    let df = (n - k) as f64;
    let sigma2 = ssr / df;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Collinear { columns: names.clone() })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let covariance = match options.covariance {
        CovarianceKind::Classical => &xtx_inv * sigma2,
        CovarianceKind::Robust => {
            let mut meat = DMatrix::zeros(k, k);
            for (i, row) in xm.row_iter().enumerate() {
                let e2 = resid[i] * resid[i];
                meat += row.transpose() * row * e2;
            }
            (&xtx_inv * meat * &xtx_inv) * (n as f64 / df)
        }
    };
    let standard_errors = (0..k).map(|i| covariance[(i, i)].max(0.0).sqrt()).collect();

    let (r2, adjusted_r2) = if options.intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let r2 = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
        (r2, 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df)
    } else {
        let sst: f64 = y.iter().map(|v| v * v).sum();
        let r2 = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
        (r2, 1.0 - (1.0 - r2) * n as f64 / df)
    };

    Ok(RegressionFit {
        names,
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        covariance,
        residuals: resid.iter().copied().collect(),
        sigma_hat: sigma2.sqrt(),
        ssr,
        r2,
        adjusted_r2,
        nobs: n,
        nregressors: k,
        intercept: options.intercept,
        covariance_kind: options.covariance,
        design: xm,
    })
}
