use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::ols::RegressionFit;
use crate::error::{Error, Result};
use crate::timeseries::{log_diff, CalendarSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongRunEffect {
    pub theta: f64,
    pub se: f64,
    /// Sum of the named effect coefficients and its standard error.
    pub impact_sum: f64,
    pub impact_sum_se: f64,
}

/// Persistence within this distance of a unit root is treated as one.
pub const UNIT_ROOT_TOLERANCE: f64 = 1e-8;

fn check_persistence(name: &str, lambda: f64) -> Result<()> {
    if lambda.abs() < 1.0 - UNIT_ROOT_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Nonstationary(format!(
            "persistence coefficient {name}= {lambda}; long-run effect undefined"
        )))
    }
}

/// `beta / (1 - lambda)`, the cumulative effect of a permanent unit change
/// in a regressor with coefficient `beta` under persistence `lambda`.
pub fn long_run_ratio(beta: f64, lambda: f64) -> Result<f64> {
    check_persistence("", lambda)?;
    Ok(beta / (1.0 - lambda))
}

/// `theta = (sum of effect coefficients) / (1 - lambda)` with a
/// delta-method standard error from the fit's coefficient covariance.
pub fn long_run_effect(
    fit: &RegressionFit,
    effect_names: &[&str],
    persistence_name: &str,
) -> Result<LongRunEffect> {
    if effect_names.is_empty() {
        return Err(Error::Parameter("at least one effect coefficient must be named".into()));
    }
    let lookup = |name: &str| {
        fit.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };
    let effects = effect_names
        .iter()
        .map(|n| lookup(n))
        .collect::<Result<Vec<_>>>()?;
    let li = lookup(persistence_name)?;
    if effects.contains(&li) {
        return Err(Error::Parameter(format!(
            "'{persistence_name}' cannot be both an effect and the persistence coefficient"
        )));
    }

    let lambda = fit.coefficients[li];
    check_persistence(&format!("'{persistence_name}' "), lambda)?;
    let sum: f64 = effects.iter().map(|&i| fit.coefficients[i]).sum();
    let denom = 1.0 - lambda;
    let theta = sum / denom;

    let k = fit.coefficients.len();
    let mut grad = DVector::zeros(k);
    let mut sum_grad = DVector::zeros(k);
    for &i in &effects {
        grad[i] += 1.0 / denom;
        sum_grad[i] += 1.0;
    }
    grad[li] = sum / (denom * denom);
    let quad = |g: &DVector<f64>| (g.transpose() * &fit.covariance * g)[(0, 0)].max(0.0).sqrt();

    Ok(LongRunEffect {
        theta,
        se: quad(&grad),
        impact_sum: sum,
        impact_sum_se: quad(&sum_grad),
    })
}

/// `d ln x_t - d ln x^region_t` for two aligned level series.
pub fn relative_series(domestic: &CalendarSeries, region: &CalendarSeries) -> Result<CalendarSeries> {
    domestic.ensure_aligned(region)?;
    let d = log_diff(domestic)?;
    let r = log_diff(region)?;
    let values = d.values().iter().zip(r.values()).map(|(a, b)| a - b).collect();
    d.with_values(values)
}
