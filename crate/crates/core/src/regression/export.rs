use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::diagnostics::SerialCorrelationTest;
use super::ols::RegressionFit;
use crate::error::Result;
use crate::timeseries::io::format_value;

/// `***` p<0.01, `**` p<0.05, `*` p<0.1.
pub fn significance_stars(p_value: f64) -> &'static str {
    if p_value < 0.01 {
        "***"
    } else if p_value < 0.05 {
        "**"
    } else if p_value < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Two-sided p-value of a t statistic.
pub fn t_p_value(t: f64, df: usize) -> f64 {
    if !t.is_finite() {
        return if t.is_nan() { f64::NAN } else { 0.0 };
    }
    let dist = StudentsT::new(0.0, 1.0, df.max(1) as f64).expect("valid t distribution");
    2.0 * dist.sf(t.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub coefficient: f64,
    pub se: f64,
    pub p_value: f64,
    pub stars: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub rows: Vec<CoefficientRow>,
    pub nobs: usize,
    pub sigma_hat: f64,
    pub adjusted_r2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub serial_correlation: Option<SerialCorrelationTest>,
}

impl FitSummary {
    pub fn new(fit: &RegressionFit, serial_correlation: Option<SerialCorrelationTest>) -> Self {
        let df = fit.degrees_of_freedom();
        let rows = fit
            .names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let p = t_p_value(fit.t_stat(i), df);
                CoefficientRow {
                    name: name.clone(),
                    coefficient: fit.coefficients[i],
                    se: fit.standard_errors[i],
                    p_value: p,
                    stars: significance_stars(p).to_string(),
                }
            })
            .collect();
        Self {
            rows,
            nobs: fit.nobs,
            sigma_hat: fit.sigma_hat,
            adjusted_r2: fit.adjusted_r2,
            serial_correlation,
        }
    }

    /// `name,coefficient,se,stars`, followed by the serial-correlation and
    /// fit rows (statistic in the coefficient column, p-value in the se column).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["name", "coefficient", "se", "stars"])?;
        for r in &self.rows {
            w.write_record([
                r.name.as_str(),
                &format_value(r.coefficient),
                &format_value(r.se),
                &r.stars,
            ])?;
        }
        if let Some(bg) = &self.serial_correlation {
            w.write_record([
                &format!("breusch_godfrey_lm({})", bg.lags),
                &format_value(bg.lm_stat),
                &format_value(bg.p_value),
                "",
            ])?;
        }
        w.write_record(["adjusted_r2", &format_value(self.adjusted_r2), "", ""])?;
        w.write_record(["nobs", &self.nobs.to_string(), "", ""])?;
        w.flush()?;
        Ok(())
    }
}
