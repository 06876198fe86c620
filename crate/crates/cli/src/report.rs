use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::PlotKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `value ≤ tolerance`
    #[serde(rename = "<=")]
    AtMost,
    /// `value > tolerance`
    #[serde(rename = ">")]
    Above,
    /// `value ≥ tolerance`
    #[serde(rename = ">=")]
    AtLeast,
    /// `value == tolerance`
    #[serde(rename = "==")]
    Equal,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Above => ">",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity or property being checked.
    pub anchor: String,
    /// `None` when the computation itself failed; see `error`.
    pub value: Option<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Plot-ready table; the first column is the abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub grid_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub params: Value,
    pub environment: Environment,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    /// Checks not applicable to this configuration, with the reason.
    #[serde(default)]
    pub skipped: BTreeMap<String, String>,
    /// Computed quantities (zeros, eigenvalues, …).
    #[serde(default)]
    pub data: BTreeMap<String, Value>,
    #[serde(default)]
    pub plot_data: BTreeMap<PlotKind, PlotTable>,
    /// The only field that varies between identical runs.
    pub timing: Timing,
}

/// Accumulates check records for one scenario run.
#[derive(Debug, Default)]
pub struct Checks {
    pub records: Vec<CheckRecord>,
    pub skipped: BTreeMap<String, String>,
}

impl Checks {
    pub fn record<E: std::fmt::Display>(
        &mut self,
        name: &str,
        anchor: &str,
        relation: Relation,
        tolerance: f64,
        value: std::result::Result<f64, E>,
    ) {
        let (value, error) = match value {
            Ok(v) if v.is_finite() => (Some(v), None),
            Ok(v) => (None, Some(format!("non-finite value {v}"))),
            Err(e) => (None, Some(e.to_string())),
        };
        let pass = value.is_some_and(|v| match relation {
            Relation::AtMost => v <= tolerance,
            Relation::Above => v > tolerance,
            Relation::AtLeast => v >= tolerance,
            Relation::Equal => v == tolerance,
        });
        self.records.push(CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            value,
            relation,
            tolerance,
            pass,
            error,
        });
    }

    pub fn at_most<E: std::fmt::Display>(
        &mut self,
        name: &str,
        anchor: &str,
        tolerance: f64,
        value: std::result::Result<f64, E>,
    ) {
        self.record(name, anchor, Relation::AtMost, tolerance, value);
    }

    pub fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.skipped.insert(name.to_string(), reason.into());
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

/// CSV of the check table: `name,value,relation,tolerance,pass,anchor`.
pub fn checks_csv(report: &Report) -> String {
    let mut out = String::from("name,value,relation,tolerance,pass,anchor\n");
    for r in &report.checks {
        let value = r.value.map_or(String::new(), |v| format!("{v:e}"));
        let relation = r.relation.symbol();
        out.push_str(&format!(
            "{},{value},{relation},{:e},{},{}\n",
            r.name,
            r.tolerance,
            r.pass,
            csv_field(&r.anchor)
        ));
    }
    out
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
