//! Scenario configuration: one JSON document, unknown keys rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Matrix,
    Unitary,
    Krein,
    DistcoreSuite,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Matrix => "matrix",
            Kind::Unitary => "unitary",
            Kind::Krein => "krein",
            Kind::DistcoreSuite => "distcore_suite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Output {
    JsonReport { path: PathBuf },
    Csv { path: PathBuf },
    PlotData { what: PlotKind, path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
pub enum PlotKind {
    #[serde(rename = "C_boundary")]
    #[value(name = "C_boundary")]
    CBoundary,
    #[serde(rename = "mu_diag")]
    #[value(name = "mu_diag")]
    MuDiag,
    #[serde(rename = "eigenfunction")]
    #[value(name = "eigenfunction")]
    Eigenfunction,
    #[serde(rename = "convergence")]
    #[value(name = "convergence")]
    Convergence,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::CBoundary => "C_boundary",
            PlotKind::MuDiag => "mu_diag",
            PlotKind::Eigenfunction => "eigenfunction",
            PlotKind::Convergence => "convergence",
        }
    }
}

/// Raw document; `params` is validated against the kind-specific schema.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default = "empty_object")]
    pub params: Value,
    #[serde(default)]
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

/// A matrix entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn parts(self) -> (f64, f64) {
        match self {
            Entry::Real(x) => (x, 0.0),
            Entry::Complex([re, im]) => (re, im),
        }
    }
}

/// Seeded random matrix with entries uniform in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub dim: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixParams {
    #[serde(default)]
    pub entries: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    pub generator: Option<Generator>,
    /// Contour points for Riesz data.
    #[serde(default = "default_points")]
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryParams {
    #[serde(default)]
    pub entries: Option<Vec<Vec<Entry>>>,
    /// 2×2 rotation by this angle, used when `entries` is absent.
    #[serde(default)]
    pub rotation: Option<f64>,
    /// Trigonometric polynomial `Σ c_l e^{ilθ}` as `[l, re, im]` triples.
    pub phi: Vec<(i64, f64, f64)>,
    pub l_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KreinParams {
    #[serde(default = "two")]
    pub c: f64,
    pub kappa: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Polynomial multiplying the bump on `(1, c)` in `g₀`; `[1]` is the bump.
    #[serde(default = "unit_poly")]
    pub profile: Vec<f64>,
    #[serde(default = "default_n_sequence")]
    pub n_sequence: Vec<usize>,
    /// Support of the test bump used for smeared checks; inside one slit.
    #[serde(default)]
    pub test_bump: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteParams {
    #[serde(default = "three")]
    pub u_first: i32,
    #[serde(default = "twelve")]
    pub u_last: i32,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn three() -> i32 {
    3
}
fn twelve() -> i32 {
    12
}
fn default_points() -> usize {
    spectral_dist::matspec::RIESZ_POINTS
}
fn default_n() -> usize {
    256
}
fn unit_poly() -> Vec<f64> {
    vec![1.0]
}
fn default_n_sequence() -> Vec<usize> {
    vec![32, 64, 128, 256]
}

/// Kind-specific parameters after validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Matrix(MatrixParams),
    Unitary(UnitaryParams),
    Krein(KreinParams),
    DistcoreSuite(SuiteParams),
}

impl Params {
    pub fn parse(kind: Kind, raw: &Value) -> Result<Self> {
        fn typed<T: DeserializeOwned>(raw: &Value) -> Result<T> {
            serde_json::from_value(raw.clone()).map_err(|e| CliError::Config(format!("params: {e}")))
        }
        let params = match kind {
            Kind::Matrix => Params::Matrix(typed(raw)?),
            Kind::Unitary => Params::Unitary(typed(raw)?),
            Kind::Krein => Params::Krein(typed(raw)?),
            Kind::DistcoreSuite => Params::DistcoreSuite(typed(raw)?),
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with defaults filled in, as JSON.
    pub fn to_value(&self) -> Value {
        let v = match self {
            Params::Matrix(p) => serde_json::to_value(p),
            Params::Unitary(p) => serde_json::to_value(p),
            Params::Krein(p) => serde_json::to_value(p),
            Params::DistcoreSuite(p) => serde_json::to_value(p),
        };
        v.expect("parameter structs serialize")
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        match self {
            Params::Matrix(p) => {
                if p.entries.is_some() == p.generator.is_some() {
                    return bad("params: exactly one of `entries` and `generator` is required".into());
                }
                if let Some(g) = &p.generator {
                    if g.dim == 0 || g.dim > 12 || !(g.scale.is_finite() && g.scale > 0.0) {
                        return bad("params.generator: need 1 ≤ dim ≤ 12 and scale > 0".into());
                    }
                }
                if p.n_points < 8 || p.n_points % 2 != 0 {
                    return bad("params.n_points must be even and ≥ 8".into());
                }
            }
            Params::Unitary(p) => {
                if p.entries.is_some() == p.rotation.is_some() {
                    return bad("params: exactly one of `entries` and `rotation` is required".into());
                }
                if p.phi.is_empty() {
                    return bad("params.phi must have at least one term".into());
                }
            }
            Params::Krein(p) => {
                if !(p.c.is_finite() && p.c > 1.0) {
                    return bad(format!("params.c = {} must exceed 1", p.c));
                }
                if !(p.kappa.is_finite() && p.kappa >= 0.0) {
                    return bad(format!("params.kappa = {} must be ≥ 0", p.kappa));
                }
                if p.n < 16 || p.n > 4096 {
                    return bad(format!("params.n = {} must be in [16, 4096]", p.n));
                }
                if p.n_sequence.iter().any(|&n| !(16..=4096).contains(&n)) {
                    return bad("params.n_sequence entries must be in [16, 4096]".into());
                }
                if p.profile.is_empty() {
                    return bad("params.profile must have at least one coefficient".into());
                }
                if let Some((a, b)) = p.test_bump {
                    let inside = |lo: f64, hi: f64| lo <= a && a < b && b <= hi;
                    if !(inside(1.0, p.c) || inside(-p.c, -1.0)) {
                        return bad(format!("params.test_bump ({a}, {b}) must lie inside one slit"));
                    }
                }
            }
            Params::DistcoreSuite(p) => {
                if p.u_first < 0 || p.u_last - p.u_first < 3 || p.u_last > 40 {
                    return bad("params: need 0 ≤ u_first, u_last ≥ u_first + 3, u_last ≤ 40".into());
                }
            }
        }
        Ok(())
    }
}

/// Validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: Kind,
    pub params: Params,
    pub outputs: Vec<Output>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn from_config(cfg: ScenarioConfig, known_checks: &[&str]) -> Result<Self> {
        let params = Params::parse(cfg.kind, &cfg.params)?;
        for (name, &tol) in &cfg.tolerances {
            if !known_checks.contains(&name.as_str()) {
                return Err(CliError::Config(format!(
                    "tolerances: unknown check `{name}` for kind {}",
                    cfg.kind.as_str()
                )));
            }
            if !(tol.is_finite() && tol >= f64::EPSILON) {
                return Err(CliError::Config(format!(
                    "tolerances.{name} = {tol:e} is below machine epsilon"
                )));
            }
        }
        Ok(Scenario {
            kind: cfg.kind,
            params,
            outputs: cfg.outputs,
            tolerances: cfg.tolerances,
        })
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Copy with `params.<name>` replaced by `value`. The name must be an
    /// existing parameter (after defaults are filled in).
    pub fn with_param(&self, name: &str, value: Value) -> Result<Self> {
        let mut raw = self.params.to_value();
        let obj = raw.as_object_mut().expect("params are an object");
        if !obj.contains_key(name) {
            return Err(CliError::Config(format!(
                "unknown parameter `{name}` for kind {}",
                self.kind.as_str()
            )));
        }
        obj.insert(name.to_string(), value);
        Ok(Scenario {
            params: Params::parse(self.kind, &raw)?,
            ..self.clone()
        })
    }
}

/// Parses a config document with line/column diagnostics for syntax errors.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
    })
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        let e = parse_config(r#"{"kind": "krein", "params": {"kappa": 1}, "extra": 1}"#).unwrap_err();
        assert!(e.to_string().contains("extra"), "{e}");
        let cfg = parse_config(r#"{"kind": "krein", "params": {"kappa": 1, "kapa": 2}}"#).unwrap();
        assert!(Params::parse(cfg.kind, &cfg.params).is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_config("{\n  \"kind\": \"krein\",\n  \"params\": {\"kappa\": }\n}").unwrap_err();
        assert!(e.to_string().starts_with("invalid config: line 3, column"), "{e}");
    }

    #[test]
    fn defaults_and_outputs() {
        let cfg = parse_config(
            r#"{"kind": "krein", "params": {"kappa": 4},
                "outputs": [{"type": "plot_data", "what": "C_boundary", "path": "cb.dat"}]}"#,
        )
        .unwrap();
        let sc = Scenario::from_config(cfg, &[]).unwrap();
        match &sc.params {
            Params::Krein(p) => {
                assert_eq!((p.c, p.n), (2.0, 256));
                assert_eq!(p.profile, vec![1.0]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(sc.outputs[0], Output::PlotData {
            what: PlotKind::CBoundary,
            path: "cb.dat".into()
        });
    }

    #[test]
    fn tolerance_overrides_are_checked() {
        let cfg = parse_config(r#"{"kind": "krein", "params": {"kappa": 0}, "tolerances": {"gram": 1e-20}}"#).unwrap();
        assert!(Scenario::from_config(cfg.clone(), &["gram"]).is_err());
        assert!(Scenario::from_config(cfg, &["other"]).is_err());
    }

    #[test]
    fn param_substitution() {
        let cfg = parse_config(r#"{"kind": "krein", "params": {"kappa": 0}}"#).unwrap();
        let sc = Scenario::from_config(cfg, &[]).unwrap();
        let n = sc.with_param("n", Value::from(64)).unwrap();
        assert!(matches!(n.params, Params::Krein(KreinParams { n: 64, .. })));
        assert!(sc.with_param("lambda", Value::from(1)).is_err());
        assert!(sc.with_param("kappa", Value::from(-1.0)).is_err());
    }
}
