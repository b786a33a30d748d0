//! JSON pipeline configuration. Relative paths are resolved against the
//! directory holding the config file.

use std::path::{Path, PathBuf};

use intensity_svar::bootstrap::BootstrapSettings;
use intensity_svar::index::{weight_grid, CountVariant, IndexSettings, WeightChoice};
use intensity_svar::svar::SvarSpec;
use intensity_svar::timeseries::{Frequency, PeriodLabel, PeriodWindow};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// `date,outlet,count` rows for imposition coverage.
    pub on_counts: Option<PathBuf>,
    /// `date,outlet,count` rows for lifting coverage.
    pub off_counts: Option<PathBuf>,
    /// `period,value` output growth, needed for the grid search.
    pub output_growth: Option<PathBuf>,
    /// Wide `period,name,...` table with every model variable.
    pub data: Option<PathBuf>,
    /// Estimate JSON written by `estimate`.
    pub estimate: Option<PathBuf>,
    /// `period,value` series in the Iranian calendar.
    pub iranian_series: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexConfig {
    pub variant: CountVariant,
    pub frequency: Frequency,
    pub normalization_window: Vec<(PeriodLabel, PeriodLabel)>,
    pub off_sd_window: Vec<(PeriodLabel, PeriodLabel)>,
    pub weight: WeightChoice,
}

impl Default for IndexConfig {
    fn default() -> Self {
        let d = IndexSettings::default();
        Self {
            variant: d.variant,
            frequency: d.frequency,
            normalization_window: Vec::new(),
            off_sd_window: Vec::new(),
            weight: d.weight,
        }
    }
}

fn window(ranges: &[(PeriodLabel, PeriodLabel)]) -> intensity_svar::Result<PeriodWindow> {
    ranges
        .iter()
        .try_fold(PeriodWindow::full(), |w, (a, b)| w.with_range(*a, *b))
}

impl IndexConfig {
    pub fn settings(&self) -> intensity_svar::Result<IndexSettings> {
        Ok(IndexSettings {
            variant: self.variant,
            frequency: self.frequency,
            normalization_window: window(&self.normalization_window)?,
            off_sd_window: window(&self.off_sd_window)?,
            weight: self.weight.clone(),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeTo {
    /// Domestic level series.
    pub domestic: String,
    /// Regional comparator level series.
    pub region: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReducedFormConfig {
    pub dependent: String,
    pub intervention: String,
    /// Lags of the intervention variable in the regression; 0 is
    /// contemporaneous.
    pub intervention_lags: Vec<usize>,
    pub controls: Vec<String>,
    pub relative_to: Option<RelativeTo>,
    pub serial_correlation_lags: usize,
}

impl Default for ReducedFormConfig {
    fn default() -> Self {
        Self {
            dependent: "dy".into(),
            intervention: "s".into(),
            intervention_lags: vec![1],
            controls: Vec::new(),
            relative_to: None,
            serial_correlation_lags: 4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    pub index: IndexConfig,
    pub model: Option<SvarSpec>,
    pub horizon: usize,
    /// Control whose innovation is reported as the global shock.
    pub global: Option<String>,
    pub bootstrap: Option<BootstrapSettings>,
    pub reduced_form: ReducedFormConfig,
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            inputs: Inputs::default(),
            index: IndexConfig::default(),
            model: None,
            horizon: intensity_svar::dynamics::DEFAULT_HORIZON,
            global: None,
            bootstrap: None,
            reduced_form: ReducedFormConfig::default(),
            output_dir: PathBuf::from("out"),
            base_dir: PathBuf::from("."),
        }
    }
}

pub const MAX_HORIZON: usize = 400;

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Every problem found, in a fixed order; empty when the config is
    /// usable.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let i = &self.inputs;
        let paths = [
            ("inputs.on_counts", &i.on_counts),
            ("inputs.off_counts", &i.off_counts),
            ("inputs.output_growth", &i.output_growth),
            ("inputs.data", &i.data),
            ("inputs.estimate", &i.estimate),
            ("inputs.iranian_series", &i.iranian_series),
        ];
        for (key, p) in paths {
            if let Some(p) = p {
                let full = self.resolve(p);
                if !full.is_file() {
                    out.push(format!("{key}: file not found: {}", full.display()));
                }
            }
        }
        if let Err(e) = self.index.settings() {
            out.push(format!("index: {e}"));
        }
        match &self.index.weight {
            WeightChoice::Fixed(w) if !(0.0..=1.0).contains(w) => {
                out.push(format!("index.weight: fixed weight {w} outside [0, 1]"))
            }
            WeightChoice::Grid { step } => {
                if let Err(e) = weight_grid(*step) {
                    out.push(format!("index.weight: {e}"));
                }
            }
            _ => {}
        }
        if let Some(spec) = &self.model {
            if let Err(e) = spec.validate() {
                out.push(format!("model: {e}"));
            }
            if let Some(g) = &self.global {
                if !spec.controls.contains(g) {
                    out.push(format!("global: '{g}' is not one of the model controls"));
                }
            }
        }
        if self.horizon > MAX_HORIZON {
            out.push(format!("horizon: {} exceeds {MAX_HORIZON}", self.horizon));
        }
        if let Some(b) = &self.bootstrap {
            if let Err(e) = b.validate() {
                out.push(format!("bootstrap: {e}"));
            }
        }
        let rf = &self.reduced_form;
        if rf.serial_correlation_lags == 0 {
            out.push("reduced_form.serial_correlation_lags: must be at least 1".into());
        }
        if rf.intervention_lags.is_empty() {
            out.push("reduced_form.intervention_lags: at least one lag is needed".into());
        }
        out
    }
}
