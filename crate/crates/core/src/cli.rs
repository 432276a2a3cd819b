//! Command-line front end: `bound`, `simulate`, `sweep` and `plot`.
//!
//! Exit status is 0 on success, 1 for invalid input (arguments, config,
//! CSV columns) and 2 for failures while running.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytics::{all_bounds, BoundSet};
use crate::experiment::{run_bounds, run_experiment, write_bounds_csv, write_csv, ExperimentConfig, RunError};
use crate::montecarlo::{estimate_connectivity, with_workers, MCEstimate};
use crate::plot::{emit_svg_plot, PlotError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mmwave-conn", version, about = "Relay-strip connectivity under Boolean rectangular blockage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the estimator (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytical bounds only, one CSV row per sweep point
    Bound {
        #[command(flatten)]
        args: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One Monte Carlo point with its bounds, printed as JSON
    Simulate {
        #[command(flatten)]
        args: ConfigArgs,
    },
    /// Full sweep: Monte Carlo estimates beside every bound
    Sweep {
        #[command(flatten)]
        args: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// SVG line chart from one or more sweep CSV files
    Plot {
        #[arg(long = "csv", required = true)]
        csv: Vec<PathBuf>,
        #[arg(long, default_value = "sweep_value")]
        x: String,
        #[arg(long = "y", required = true)]
        y: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Self { code: EXIT_INVALID, message: message.to_string() }
    }

    fn runtime(message: impl ToString) -> Self {
        Self { code: EXIT_RUNTIME, message: message.to_string() }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(_) => Failure::invalid(e),
            _ => Failure::runtime(e),
        }
    }
}

impl From<PlotError> for Failure {
    fn from(e: PlotError) -> Self {
        match e {
            PlotError::Io { .. } => Failure::runtime(e),
            _ => Failure::invalid(e),
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::invalid(format!("{}: {e}", args.config.display())))?;
    let mut config = ExperimentConfig::from_json_str(&text)
        .map_err(|e| Failure::invalid(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        config.estimator.seed = seed;
    }
    Ok(config)
}

fn in_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, Failure> {
    match workers {
        Some(0) => Err(Failure::invalid("--workers must be at least 1")),
        Some(n) => with_workers(n, f).map_err(Failure::runtime),
        None => Ok(f()),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::runtime(format!("{}: {e}", p.display())))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    config: &'a ExperimentConfig,
    estimate: MCEstimate,
    bounds: BoundSet,
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bound { args, out } => {
            let config = load_config(&args)?;
            let rows = run_bounds(&config)?;
            let out = out.or(config.outputs.csv.clone());
            write_bounds_csv(&rows, output(out.as_deref())?)?;
        }
        Command::Simulate { args } => {
            let config = load_config(&args)?;
            if !config.is_single_point() {
                return Err(Failure::invalid(format!(
                    "{}: simulate needs scalar lambda_o, d and kappa; use sweep",
                    args.config.display()
                )));
            }
            let point = config.points().map_err(Failure::invalid)?.remove(0);
            let est = &config.estimator;
            let estimate = in_pool(args.workers, || {
                estimate_connectivity(&point.params, &point.link, est.condition, est.n, est.seed)
            })?
            .map_err(Failure::runtime)?;
            let bounds = all_bounds(&point.params, &point.link, &config.quadrature).map_err(Failure::runtime)?;
            let report = SimulateReport { config: &config, estimate, bounds };
            let mut out = output(None)?;
            serde_json::to_writer_pretty(&mut out, &report).map_err(Failure::runtime)?;
            writeln!(out).map_err(Failure::runtime)?;
        }
        Command::Sweep { args, out, svg } => {
            let config = load_config(&args)?;
            let rows = in_pool(args.workers, || run_experiment(&config))??;
            let csv_path = out.or(config.outputs.csv.clone());
            write_csv(&rows, output(csv_path.as_deref())?)?;
            if let Some(svg_path) = svg.or(config.outputs.svg.clone()) {
                let csv_path =
                    csv_path.ok_or_else(|| Failure::invalid("--svg needs a CSV path (--out or outputs.csv)"))?;
                let ys = ["mc_mean", "bound_thm1", "bound_cor1_plos"].map(String::from);
                emit_svg_plot(&[csv_path], "sweep_value", &ys, &svg_path)?;
            }
        }
        Command::Plot { csv, x, y, out } => emit_svg_plot(&csv, &x, &y, &out)?,
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
