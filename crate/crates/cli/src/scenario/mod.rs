//! Scenario pipelines: each kind runs its checks into a [`Report`].

mod krein;
mod matrix;
mod suite;

use std::collections::BTreeMap;
use std::time::Instant;

use spectral_dist::krein::KreinError;

use crate::config::{Kind, Params, Scenario, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::report::{Checks, Environment, Report, Timing};

pub fn known_checks(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Matrix => matrix::MATRIX_CHECKS,
        Kind::Unitary => matrix::UNITARY_CHECKS,
        Kind::Krein => krein::CHECKS,
        Kind::DistcoreSuite => suite::CHECKS,
    }
}

pub fn validate(cfg: ScenarioConfig) -> Result<Scenario> {
    let kind = cfg.kind;
    Scenario::from_config(cfg, known_checks(kind))
}

/// Runs every check of the scenario. A numerical failure inside the
/// pipeline becomes a failed `pipeline` record rather than an error.
pub fn run(sc: &Scenario) -> Result<Report> {
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut data = BTreeMap::new();
    let mut plot_data = BTreeMap::new();
    let mut grid_sizes = Vec::new();
    let pipeline: std::result::Result<(), String> = match &sc.params {
        Params::Krein(p) => match krein::run(sc, p, &mut checks) {
            Ok(out) => {
                data = out.data;
                plot_data = out.plot_data;
                grid_sizes = out.grid_sizes;
                Ok(())
            }
            Err(KreinError::InvalidParams(msg)) => return Err(CliError::Config(format!("params: {msg}"))),
            Err(e) => Err(e.to_string()),
        },
        Params::Matrix(p) => matrix::run_matrix(sc, p, &mut checks).map(|d| data = d).map_err(|e| e.to_string()),
        Params::Unitary(p) => matrix::run_unitary(sc, p, &mut checks).map(|d| data = d).map_err(|e| e.to_string()),
        Params::DistcoreSuite(p) => suite::run(sc, p, &mut checks).map(|d| data = d).map_err(|e| e.to_string()),
    };
    if let Err(msg) = pipeline {
        checks.at_most("pipeline", "scenario pipeline completes", 0.0, Err::<f64, _>(msg));
    }
    Ok(Report {
        kind: sc.kind.as_str().to_string(),
        params: sc.params.to_value(),
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            grid_sizes,
        },
        passed: checks.passed(),
        checks: checks.records,
        skipped: checks.skipped,
        data,
        plot_data,
        timing: Timing {
            total_seconds: start.elapsed().as_secs_f64(),
        },
    })
}
