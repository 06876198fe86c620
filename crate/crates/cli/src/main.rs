//! `spectral-dist`: runs verification scenarios for spectral distributions
//! and exports plot-ready data.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 invalid config,
//! 3 I/O error or missing report data.

mod config;
mod error;
mod export;
mod report;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Output, PlotKind};
use error::{CliError, Result};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "spectral-dist", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario; prints the JSON report to stdout and writes the
    /// configured outputs.
    Run { config: PathBuf },
    /// Run a scenario once per value of one parameter; prints CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot data from a saved report.
    Export {
        report: PathBuf,
        #[arg(long, value_enum)]
        what: PlotKind,
        /// Output file; defaults to `<what>.dat`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SPECTRAL_DIST_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("SPECTRAL_DIST_THREADS = {raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

fn summary(report: &Report) {
    for c in &report.checks {
        let value = c.value.map_or_else(|| c.error.clone().unwrap_or_default(), |v| format!("{v:.3e}"));
        eprintln!(
            "{} {:<28} {value}  ({} {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.relation.symbol(),
            c.tolerance
        );
    }
    for (name, reason) in &report.skipped {
        eprintln!("SKIP {name:<28} {reason}");
    }
}

fn run(config: &Path) -> Result<bool> {
    let sc = scenario::validate(config::load_config(config)?)?;
    let report = scenario::run(&sc)?;
    for out in &sc.outputs {
        match out {
            Output::JsonReport { path } => write_file(path, &report_json(&report))?,
            Output::Csv { path } => write_file(path, &report::checks_csv(&report))?,
            Output::PlotData { what, path } => write_file(path, &export::plot_text(&report, *what)?)?,
        }
    }
    summary(&report);
    println!("{}", report_json(&report));
    Ok(report.passed)
}

fn sweep(config: &Path, param: &str, values: &str, out: Option<&Path>) -> Result<bool> {
    let sc = scenario::validate(config::load_config(config)?)?;
    let items: Vec<&str> = values.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    // validate every value before running anything
    let scenarios = items
        .iter()
        .map(|v| sc.with_param(param, export::parse_value(v)).map(|s| (v.to_string(), s)))
        .collect::<Result<Vec<_>>>()?;
    if items.is_empty() {
        sc.with_param(param, sc.params.to_value()[param].clone())?;
    }
    let mut runs = Vec::with_capacity(scenarios.len());
    for (v, s) in &scenarios {
        runs.push((v.clone(), scenario::run(s)?));
    }
    let csv = export::sweep_csv(&sc, param, &runs);
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(runs.iter().all(|(_, r)| r.passed))
}

fn export_plot(report: &Path, what: PlotKind, out: Option<&Path>) -> Result<bool> {
    let text = std::fs::read_to_string(report).map_err(|e| CliError::io(report, e))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!("report line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let default = PathBuf::from(format!("{}.dat", what.as_str()));
    write_file(out.unwrap_or(&default), &export::plot_text(&report, what)?)?;
    Ok(true)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = configure_threads().and_then(|()| match &args.command {
        Command::Run { config } => run(config),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => sweep(config, param, values, out.as_deref()),
        Command::Export { report, what, out } => export_plot(report, *what, out.as_deref()),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
