use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use intensity_svar::bootstrap::{bootstrap_irf, BootstrapSettings};
use intensity_svar::dynamics::{
    fevd, impulse_responses, plot_data, stacked_dynamics, write_fevd_csv, write_irf_csv, FevdResult, IrfResult,
    Method,
};
use intensity_svar::index::{build_indices, write_indices, ArticleCountPanel, WeightChoice};
use intensity_svar::regression::{
    breusch_godfrey, lag_name, long_run_effect, ols, relative_series, Design, FitSummary, LongRunEffect,
};
use intensity_svar::svar::{estimate_svar, reduced_form, DataPanel, SvarEstimate};
use intensity_svar::timeseries::io::{read_series_file, write_series};
use intensity_svar::timeseries::{common_span, convert_iranian, Calendar, CalendarSeries};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::Failure;

pub const METHOD_TOLERANCE: f64 = 1e-10;

pub struct Context {
    pub config: PipelineConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

impl Context {
    /// A path given by flag (relative to the working directory) or by
    /// config key (relative to the config file). The file must exist.
    fn input(&self, flag: &Option<PathBuf>, configured: &Option<PathBuf>, flag_name: &str, key: &str) -> Result<PathBuf, Failure> {
        let path = match (flag, configured) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => self.config.resolve(p),
            (None, None) => {
                return Err(Failure::Usage(format!(
                    "missing input: pass --{flag_name} or set {key} in the config"
                )))
            }
        };
        if !path.is_file() {
            return Err(Failure::Usage(format!("--{flag_name}: file not found: {}", path.display())));
        }
        Ok(path)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, Failure> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| Failure::Usage(format!("--out {}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        let f = File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        Ok(BufWriter::new(f))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(intensity_svar::Error::from)?;
        writeln!(w).map_err(intensity_svar::Error::from)?;
        w.flush().map_err(intensity_svar::Error::from)?;
        Ok(())
    }

    fn write_with(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> intensity_svar::Result<()>) -> Result<(), Failure> {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush().map_err(intensity_svar::Error::from)?;
        Ok(())
    }

    fn data(&self, flag: &Option<PathBuf>) -> Result<DataPanel, Failure> {
        let path = self.input(flag, &self.config.inputs.data, "data", "inputs.data")?;
        Ok(DataPanel::read_csv(open(&path)?)?)
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct WeightReport {
    mode: &'static str,
    w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_step: Option<f64>,
}

#[derive(Serialize)]
struct IndexDiagnostics {
    variant: intensity_svar::index::CountVariant,
    frequency: intensity_svar::timeseries::Frequency,
    weight: WeightReport,
    normalization_max: BTreeMap<&'static str, f64>,
    excluded_months: BTreeMap<&'static str, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<intensity_svar::index::WeightSearch>,
}

pub struct BuildIndexArgs {
    pub on_counts: Option<PathBuf>,
    pub off_counts: Option<PathBuf>,
    pub output_growth: Option<PathBuf>,
    pub weight: Option<f64>,
}

pub fn build_index(ctx: &Context, args: &BuildIndexArgs) -> Result<(), Failure> {
    let inputs = &ctx.config.inputs;
    let on_path = ctx.input(&args.on_counts, &inputs.on_counts, "on-counts", "inputs.on_counts")?;
    let off_path = ctx.input(&args.off_counts, &inputs.off_counts, "off-counts", "inputs.off_counts")?;
    let mut settings = ctx.config.index.settings()?;
    if let Some(w) = args.weight {
        settings.weight = WeightChoice::Fixed(w);
    }
    let dy = match settings.weight {
        WeightChoice::Grid { .. } => {
            let p = ctx.input(&args.output_growth, &inputs.output_growth, "output-growth", "inputs.output_growth")?;
            Some(read_series_file(p, Calendar::Gregorian)?)
        }
        WeightChoice::Fixed(_) => None,
    };
    let on = ArticleCountPanel::read_csv(open(&on_path)?)?;
    let off = ArticleCountPanel::read_csv(open(&off_path)?)?;
    let bundle = build_indices(&on, &off, &settings, dy.as_ref())?;

    ctx.write_with("indices.csv", |w| write_indices(w, &[&bundle.on, &bundle.off, &bundle.net]))?;
    let w = bundle.net.net_weight.unwrap_or_default();
    let diagnostics = IndexDiagnostics {
        variant: settings.variant,
        frequency: settings.frequency,
        weight: match settings.weight {
            WeightChoice::Fixed(_) => WeightReport {
                mode: "fixed",
                w,
                grid_step: None,
            },
            WeightChoice::Grid { step } => WeightReport {
                mode: "grid",
                w,
                grid_step: Some(step),
            },
        },
        normalization_max: [
            ("on", bundle.on.normalization_max),
            ("off", bundle.off.normalization_max),
            ("net", bundle.net.normalization_max),
        ]
        .into_iter()
        .collect(),
        excluded_months: bundle
            .excluded_months
            .iter()
            .map(|(k, v)| (k.as_str(), v.iter().map(|p| p.to_string()).collect()))
            .collect(),
        search: bundle.search.clone(),
    };
    ctx.write_json("index_diagnostics.json", &diagnostics)?;
    for (kind, months) in &diagnostics.excluded_months {
        if !months.is_empty() {
            eprintln!("warning: {kind} counts: no observed day in {}; months left out", months.join(", "));
        }
    }
    println!("net weight w = {w} ({})", diagnostics.weight.mode);
    Ok(())
}

pub fn convert_calendar(ctx: &Context, input: &Option<PathBuf>, output: &Option<PathBuf>) -> Result<(), Failure> {
    let path = ctx.input(input, &ctx.config.inputs.iranian_series, "input", "inputs.iranian_series")?;
    let series = read_series_file(&path, Calendar::Iranian)?;
    let converted = convert_iranian(&series)?;
    match output {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| Failure::Usage(format!("--output {}: {e}", p.display())))?);
            write_series(&mut w, &converted)?;
            w.flush().map_err(intensity_svar::Error::from)?;
        }
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
            ctx.write_with(&format!("{stem}_gregorian.csv"), |w| write_series(w, &converted))?;
        }
    }
    println!("{} {} observations, {}..{}", converted.len(), converted.frequency(), converted.start(), converted.end());
    Ok(())
}

pub fn estimate(ctx: &Context, data: &Option<PathBuf>) -> Result<(), Failure> {
    let spec = ctx
        .config
        .model
        .as_ref()
        .ok_or_else(|| Failure::Usage("missing model: set 'model' in the config (--config)".into()))?;
    let panel = ctx.data(data)?;
    let est = estimate_svar(spec, &panel)?;
    ctx.write_json("estimate.json", &est)?;
    for (name, fit) in spec.ordering.iter().zip(&est.equations) {
        let bg = breusch_godfrey(fit, 4)?;
        let summary = FitSummary::new(fit, Some(bg));
        ctx.write_with(&format!("equation_{name}.csv"), |w| summary.write_csv(w))?;
    }
    let rf = reduced_form(&est)?;
    ctx.write_json("reduced_form.json", &rf)?;
    println!(
        "{} equations, {} observations ({}..{}); max companion modulus {:.6}",
        est.equations.len(),
        est.nobs,
        est.sample_start,
        est.sample_end,
        rf.max_modulus
    );
    if !rf.stationary {
        eprintln!("warning: estimated system is not stationary");
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Direct,
    Stacked,
    Both,
}

pub struct DynamicsArgs {
    pub estimate: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub method: MethodArg,
    pub horizon: Option<usize>,
    pub global: Option<String>,
    pub bootstrap: Option<usize>,
    pub no_fevd: bool,
}

#[derive(Serialize)]
struct MethodCheck {
    irf_max_deviation: f64,
    fevd_max_deviation: Option<f64>,
    tolerance: f64,
    agree: bool,
}

pub fn dynamics(ctx: &Context, args: &DynamicsArgs) -> Result<(), Failure> {
    let est_path = match (&args.estimate, &ctx.config.inputs.estimate) {
        (None, None) => {
            let p = ctx.out.join("estimate.json");
            if !p.is_file() {
                return Err(Failure::Usage(format!(
                    "missing input: pass --estimate, set inputs.estimate, or run 'estimate' first ({} not found)",
                    p.display()
                )));
            }
            p
        }
        _ => ctx.input(&args.estimate, &ctx.config.inputs.estimate, "estimate", "inputs.estimate")?,
    };
    let est: SvarEstimate = serde_json::from_reader(open(&est_path)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", est_path.display())))?;
    let horizon = args.horizon.unwrap_or(ctx.config.horizon);
    if horizon > crate::config::MAX_HORIZON {
        return Err(Failure::Usage(format!("--horizon {horizon} exceeds {}", crate::config::MAX_HORIZON)));
    }
    let global = args.global.clone().or_else(|| ctx.config.global.clone());
    let global = global.as_deref();
    let model = &est.model;

    let mut settings: Option<BootstrapSettings> = ctx.config.bootstrap.clone();
    if let Some(r) = args.bootstrap {
        settings.get_or_insert_with(BootstrapSettings::default).replications = r;
    }
    if let (Some(s), Some(seed)) = (settings.as_mut(), ctx.seed) {
        s.seed = seed;
    }
    if let Some(s) = &settings {
        s.validate()?;
    }

    let direct = |want_fevd: bool| -> Result<(IrfResult, Option<FevdResult>), Failure> {
        let irf = impulse_responses(model, horizon, global)?;
        let f = if want_fevd { Some(fevd(model, horizon, global)?) } else { None };
        Ok((irf, f))
    };
    let stacked = |want_fevd: bool| -> Result<(IrfResult, Option<FevdResult>), Failure> {
        if want_fevd {
            let (i, f) = stacked_dynamics(model, horizon, global)?;
            Ok((i, Some(f)))
        } else {
            Ok((intensity_svar::dynamics::stacked_irf(model, horizon, global)?, None))
        }
    };
    let want_fevd = !args.no_fevd;
    let (primary, secondary) = match args.method {
        MethodArg::Direct => (direct(want_fevd)?, None),
        MethodArg::Stacked => (stacked(want_fevd)?, None),
        MethodArg::Both => (direct(want_fevd)?, Some(stacked(want_fevd)?)),
    };
    let (irf, fevd_main) = primary;
    if !irf.stationary {
        eprintln!("warning: impulse responses of a nonstationary system (max modulus {:.6})", irf.max_modulus);
    }

    let bands = match &settings {
        Some(s) => {
            let panel = ctx.data(&args.data)?;
            let b = bootstrap_irf(&est, &panel, horizon, global, s)?;
            ctx.write_json("bootstrap.json", &b.metadata)?;
            if b.metadata.dropped > 0 {
                eprintln!("warning: {} bootstrap replications dropped", b.metadata.dropped);
            }
            Some(b.shock_bands())
        }
        None => None,
    };

    ctx.write_with("irf.csv", |w| write_irf_csv(w, &irf, bands.as_deref()))?;
    if let Some(f) = &fevd_main {
        ctx.write_with("fevd.csv", |w| write_fevd_csv(w, f))?;
    }
    ctx.write_json("plot.json", &plot_data(&irf, bands.as_deref())?)?;

    if let Some((s_irf, s_fevd)) = secondary {
        debug_assert_eq!(s_irf.method, Method::Stacked);
        ctx.write_with("irf_stacked.csv", |w| write_irf_csv(w, &s_irf, None))?;
        if let Some(f) = &s_fevd {
            ctx.write_with("fevd_stacked.csv", |w| write_fevd_csv(w, f))?;
        }
        let irf_dev = irf.max_deviation(&s_irf);
        let fevd_dev = match (&fevd_main, &s_fevd) {
            (Some(a), Some(b)) => Some(a.max_deviation(b)),
            _ => None,
        };
        let agree = irf_dev < METHOD_TOLERANCE && fevd_dev.is_none_or(|d| d < METHOD_TOLERANCE);
        let check = MethodCheck {
            irf_max_deviation: irf_dev,
            fevd_max_deviation: fevd_dev,
            tolerance: METHOD_TOLERANCE,
            agree,
        };
        ctx.write_json("method_check.json", &check)?;
        println!(
            "direct vs stacked: max IRF deviation {irf_dev:.3e}{}",
            fevd_dev.map_or(String::new(), |d| format!(", max FEVD deviation {d:.3e}"))
        );
        if !agree {
            return Err(Failure::Data(format!(
                "direct and stacked computations differ by more than {METHOD_TOLERANCE:e}"
            )));
        }
    }
    println!("{} shocks, horizon {horizon}", irf.shocks.len());
    Ok(())
}

#[derive(Serialize)]
struct ReducedFormReport {
    dependent: String,
    relative_to_region: bool,
    sample_start: String,
    sample_end: String,
    effect_terms: Vec<String>,
    persistence_term: String,
    long_run: LongRunEffect,
    table: FitSummary,
}

pub fn reduced_form_report(ctx: &Context, data: &Option<PathBuf>, relative: bool) -> Result<(), Failure> {
    let rf = &ctx.config.reduced_form;
    let panel = ctx.data(data)?;
    let dependent: CalendarSeries = if relative {
        let r = rf.relative_to.as_ref().ok_or_else(|| {
            Failure::Usage("--relative needs reduced_form.relative_to {domestic, region} in the config".into())
        })?;
        relative_series(panel.get(&r.domestic)?, panel.get(&r.region)?)?
    } else {
        panel.get(&rf.dependent)?.clone()
    };
    let label = if relative { "dy_rel".to_string() } else { rf.dependent.clone() };
    let s = panel.get(&rf.intervention)?;
    let controls: Vec<&CalendarSeries> = rf.controls.iter().map(|c| panel.get(c)).collect::<Result<_, _>>()?;

    let max_s_lag = rf.intervention_lags.iter().copied().max().unwrap_or(0);
    let mut all: Vec<&CalendarSeries> = vec![&dependent, s];
    all.extend(controls.iter().copied());
    let (lo, hi) = common_span(&all)?;
    let first = lo.offset(1.max(max_s_lag) as i64);
    if first > hi {
        return Err(Failure::Data("no observations left after lagging".into()));
    }
    let n = first.distance_to(&hi)? as usize + 1;
    let periods: Vec<_> = (0..n).map(|i| first.offset(i as i64)).collect();
    let at = |x: &CalendarSeries, lag: i64| -> Vec<f64> {
        periods.iter().map(|p| x.get(&p.offset(-lag)).expect("inside common span")).collect()
    };
    let y = at(&dependent, 0);
    let persistence = lag_name(&label, 1);
    let mut design = Design::new().with(persistence.clone(), at(&dependent, 1));
    let mut effects = Vec::new();
    for &l in &rf.intervention_lags {
        let name = lag_name(&rf.intervention, l);
        design.push(name.clone(), at(s, l as i64));
        effects.push(name);
    }
    for (name, c) in rf.controls.iter().zip(&controls) {
        design.push(name.clone(), at(c, 0));
    }
    let fit = ols(&y, &design, true)?;
    let refs: Vec<&str> = effects.iter().map(String::as_str).collect();
    let lr = long_run_effect(&fit, &refs, &persistence)?;
    let bg = breusch_godfrey(&fit, rf.serial_correlation_lags)?;
    let table = FitSummary::new(&fit, Some(bg));
    ctx.write_with("reduced_form.csv", |w| table.write_csv(w))?;
    let report = ReducedFormReport {
        dependent: label,
        relative_to_region: relative,
        sample_start: first.to_string(),
        sample_end: hi.to_string(),
        effect_terms: effects,
        persistence_term: persistence,
        long_run: lr,
        table,
    };
    ctx.write_json("reduced_form_report.json", &report)?;
    println!(
        "long-run effect {:.3} ({:.3}); sum of intervention coefficients {:.3} ({:.3})",
        lr.theta, lr.se, lr.impact_sum, lr.impact_sum_se
    );
    Ok(())
}

pub fn validate(ctx: &Context) -> Result<(), Failure> {
    let problems = ctx.config.problems();
    if problems.is_empty() {
        println!("configuration OK");
        Ok(())
    } else {
        Err(Failure::Usage(problems.join("\n")))
    }
}
