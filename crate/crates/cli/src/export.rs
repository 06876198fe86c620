//! Plain-text plot data and sweep tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::Value;

use crate::config::{PlotKind, Scenario};
use crate::error::{CliError, Result};
use crate::report::{csv_field, Report};

/// Whitespace-separated columns with a `#` header line naming them.
pub fn plot_text(report: &Report, what: PlotKind) -> Result<String> {
    let table = report
        .plot_data
        .get(&what)
        .ok_or_else(|| CliError::MissingData(what.as_str().to_string()))?;
    let mut out = format!("# {}\n", table.columns.join(" "));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    Ok(out)
}

fn zeros_cell(data: &BTreeMap<String, Value>) -> String {
    let Some(Value::Array(zs)) = data.get("zeros").or_else(|| data.get("eigenvalues")) else {
        return String::new();
    };
    zs.iter()
        .map(|z| {
            let re = z["re"].as_f64().unwrap_or(f64::NAN);
            let im = z["im"].as_f64().unwrap_or(f64::NAN);
            format!("{re:e}{im:+e}i")
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Sweep table, one row per value. Check columns hold the computed value of
/// each check (empty when skipped or failed to compute).
pub fn sweep_csv(sc: &Scenario, param: &str, runs: &[(String, Report)]) -> String {
    let mut names: Vec<String> = Vec::new();
    for (_, r) in runs {
        for c in &r.checks {
            if !names.contains(&c.name) {
                names.push(c.name.clone());
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# sweep of params.{param} for kind {}", sc.kind.as_str());
    let _ = writeln!(out, "# value: parameter value; regime: zero regime (krein) or empty");
    let _ = writeln!(out, "# zeros: discrete zeros or eigenvalues as re+imi, ';'-separated");
    let _ = writeln!(out, "# passed: all checks passed; remaining columns: check values");
    let mut header = vec!["value".to_string(), "regime".into(), "zeros".into(), "passed".into()];
    header.extend(names.iter().cloned());
    let _ = writeln!(out, "{}", header.join(","));
    for (value, r) in runs {
        let regime = r.data.get("regime").and_then(Value::as_str).unwrap_or("");
        let mut row = vec![csv_field(value), regime.to_string(), csv_field(&zeros_cell(&r.data)), r.passed.to_string()];
        for name in &names {
            let cell = r
                .checks
                .iter()
                .find(|c| &c.name == name)
                .and_then(|c| c.value)
                .map_or(String::new(), |v| format!("{v:e}"));
            row.push(cell);
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Parses one `--values` item as JSON (numbers, booleans), falling back to
/// a string.
pub fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()))
}
