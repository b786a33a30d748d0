use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fevd::FevdResult;
use super::irf::{IrfResult, Shock};
use crate::error::{Error, Result};
use crate::linalg;
use crate::timeseries::io::format_value;

/// Pointwise lower and upper band for one shock, laid out like
/// [`super::ShockResponse::responses`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockBands {
    pub shock: Shock,
    #[serde(with = "linalg::rows")]
    pub lower: DMatrix<f64>,
    #[serde(with = "linalg::rows")]
    pub upper: DMatrix<f64>,
}

fn find_bands<'a>(bands: Option<&'a [ShockBands]>, shock: &Shock) -> Result<Option<&'a ShockBands>> {
    match bands {
        None => Ok(None),
        Some(b) => b
            .iter()
            .find(|x| &x.shock == shock)
            .map(Some)
            .ok_or_else(|| Error::Spec(format!("no bands for shock '{}'", shock.label()))),
    }
}

/// `variable,shock,horizon,value[,lower,upper]`, one row per response.
pub fn write_irf_csv<W: Write>(writer: W, irf: &IrfResult, bands: Option<&[ShockBands]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if bands.is_some() {
        w.write_record(["variable", "shock", "horizon", "value", "lower", "upper"])?;
    } else {
        w.write_record(["variable", "shock", "horizon", "value"])?;
    }
    for s in &irf.shocks {
        let b = find_bands(bands, &s.shock)?;
        for (i, var) in irf.variables.iter().enumerate() {
            for h in 0..=irf.horizon {
                let mut row = vec![
                    var.clone(),
                    s.shock.label().to_string(),
                    h.to_string(),
                    format_value(s.responses[(h, i)]),
                ];
                if let Some(b) = b {
                    row.push(format_value(b.lower[(h, i)]));
                    row.push(format_value(b.upper[(h, i)]));
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `variable,shock,horizon,value` with the share of each shock.
pub fn write_fevd_csv<W: Write>(writer: W, fevd: &FevdResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["variable", "shock", "horizon", "value"])?;
    for (i, var) in fevd.variables.iter().enumerate() {
        for (c, col) in fevd.columns.iter().enumerate() {
            for h in 0..=fevd.horizon {
                w.write_record([var.clone(), col.clone(), h.to_string(), format_value(fevd.tables[i][(h, c)])])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint(pub usize, pub f64, pub Option<(f64, f64)>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub shock: String,
    pub variable: String,
    pub points: Vec<PlotPoint>,
}

/// One plot series per (shock, variable) pair: `(h, value, band)` tuples.
pub fn plot_data(irf: &IrfResult, bands: Option<&[ShockBands]>) -> Result<Vec<PlotSeries>> {
    let mut out = Vec::new();
    for s in &irf.shocks {
        let b = find_bands(bands, &s.shock)?;
        for (i, var) in irf.variables.iter().enumerate() {
            out.push(PlotSeries {
                shock: s.shock.label().to_string(),
                variable: var.clone(),
                points: (0..=irf.horizon)
                    .map(|h| PlotPoint(h, s.responses[(h, i)], b.map(|b| (b.lower[(h, i)], b.upper[(h, i)]))))
                    .collect(),
            });
        }
    }
    Ok(out)
}
