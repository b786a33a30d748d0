//! `isvar`: config-driven front end for index building, calendar
//! conversion, SVAR estimation, dynamics and reduced-form reports.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or model
//! error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BuildIndexArgs, Context, DynamicsArgs, MethodArg};
use config::PipelineConfig;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl From<intensity_svar::Error> for Failure {
    fn from(e: intensity_svar::Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "isvar", version, about = "Intervention-intensity indices and recursive SVARs")]
struct Cli {
    /// JSON pipeline configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for the bootstrap generator.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory (default: output_dir from the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build on/off/net intensity indices from daily article counts.
    BuildIndex {
        #[arg(long, value_name = "PATH")]
        on_counts: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        off_counts: Option<PathBuf>,
        /// `period,value` output growth for the weight grid search.
        #[arg(long, value_name = "PATH")]
        output_growth: Option<PathBuf>,
        /// Fixed net weight; skips the grid search.
        #[arg(long, value_name = "W")]
        weight: Option<f64>,
    },
    /// Convert an Iranian-calendar series to the Gregorian calendar.
    ConvertCalendar {
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Estimate the structural VAR in the config.
    Estimate {
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
    },
    /// Impulse responses, variance decompositions and bootstrap bands.
    Dynamics {
        #[arg(long, value_name = "PATH")]
        estimate: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "direct")]
        method: MethodArg,
        #[arg(long, value_name = "H")]
        horizon: Option<usize>,
        /// Control whose innovation is reported as the global shock.
        #[arg(long, value_name = "NAME")]
        global: Option<String>,
        /// Bootstrap replications; enables bands.
        #[arg(long, value_name = "R")]
        bootstrap: Option<usize>,
        /// Skip the variance decomposition.
        #[arg(long)]
        no_fevd: bool,
    },
    /// Dynamic output-growth regression and its long-run intervention effect.
    ReducedForm {
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
        /// Use domestic minus regional growth as the dependent variable.
        #[arg(long)]
        relative: bool,
    },
    /// Check the configuration without running anything.
    Validate,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = PipelineConfig::load(cli.config.as_deref())?;
    let out = cli.out.clone().unwrap_or_else(|| config.resolve(&config.output_dir));
    let ctx = Context {
        config,
        out,
        seed: cli.seed,
    };
    match cli.command {
        Command::BuildIndex {
            on_counts,
            off_counts,
            output_growth,
            weight,
        } => commands::build_index(
            &ctx,
            &BuildIndexArgs {
                on_counts,
                off_counts,
                output_growth,
                weight,
            },
        ),
        Command::ConvertCalendar { input, output } => commands::convert_calendar(&ctx, &input, &output),
        Command::Estimate { data } => commands::estimate(&ctx, &data),
        Command::Dynamics {
            estimate,
            data,
            method,
            horizon,
            global,
            bootstrap,
            no_fevd,
        } => commands::dynamics(
            &ctx,
            &DynamicsArgs {
                estimate,
                data,
                method,
                horizon,
                global,
                bootstrap,
                no_fevd,
            },
        ),
        Command::ReducedForm { data, relative } => commands::reduced_form_report(&ctx, &data, relative),
        Command::Validate => commands::validate(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
