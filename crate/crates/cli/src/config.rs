//! Run configuration: a JSON object with reaction, model, solver, output, limit
//! and sweep blocks. Omitted fields take their defaults.

use std::path::{Path, PathBuf};

use bifront::profile::Regime;
use bifront::reaction::ReactionSpec;
use bifront::reduction::Controls;
use bifront::sweep::{Axis, Output, SweepPlan};
use serde::{Deserialize, Serialize};

/// Field path plus message, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReactionBlock {
    Catalog {
        catalog: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
    },
    Explicit(ReactionSpec),
}

impl ReactionBlock {
    pub fn spec(&self) -> Result<ReactionSpec, ConfigError> {
        match self {
            ReactionBlock::Catalog { catalog, param } => {
                ReactionSpec::catalog(catalog, *param).map_err(|e| ConfigError::new("reaction.catalog", e.to_string()))
            }
            ReactionBlock::Explicit(spec) => Ok(spec.clone()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// One-parameter family; `value` selects a single member, `values` a sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub format: Format,
    pub path: Option<PathBuf>,
    /// Significant digits of every printed number.
    pub digits: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { format: Format::Csv, path: None, digits: 9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitBlock {
    pub regime: Regime,
    /// Normalization level `v(0)`; the reaction's default when absent.
    pub v0: Option<f64>,
    pub window: (f64, f64),
    pub points: usize,
}

impl Default for LimitBlock {
    fn default() -> Self {
        Self { regime: Regime::SingularPerturbation, v0: None, window: (-1.0, 4.0), points: 501 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub outputs: Vec<Output>,
    pub expected_order: Option<f64>,
    pub fit: bool,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self { outputs: vec![Output::Speeds, Output::Bounds], expected_order: None, fit: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction: Option<ReactionBlock>,
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub solver: Controls<f64>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub limit: LimitBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::new(e.path().to_string(), e.inner().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn reaction_spec(&self) -> Result<ReactionSpec, ConfigError> {
        self.reaction.as_ref().ok_or_else(|| ConfigError::new("reaction", "missing reaction block"))?.spec()
    }

    /// Single `(a, b)` from explicit parameters or a coupling with one value.
    pub fn point(&self) -> Result<(f64, f64), ConfigError> {
        let m = &self.model;
        let check = |name: &str, x: f64, allow_zero: bool| {
            if x.is_finite() && (x > 0.0 || (allow_zero && x == 0.0)) {
                Ok(x)
            } else {
                Err(ConfigError::new(format!("model.{name}"), format!("must be positive and finite (got {x})")))
            }
        };
        match (m.a, m.b, &m.coupling, m.value) {
            (Some(a), Some(b), _, _) => Ok((check("a", a, false)?, check("b", b, true)?)),
            (_, _, Some(axis), Some(p)) => {
                check("value", p, false)?;
                let plan = SweepPlan::new(ReactionSpec::fisher(1.0), axis.clone(), vec![p]);
                let pts = plan.points().map_err(|e| ConfigError::new("model.coupling", e.to_string()))?;
                Ok((pts[0].1, pts[0].2))
            }
            (Some(_), None, _, _) => Err(ConfigError::new("model.b", "missing")),
            (None, Some(_), _, _) => Err(ConfigError::new("model.a", "missing")),
            (None, None, Some(_), None) => Err(ConfigError::new("model.value", "coupling needs a value")),
            (None, None, None, _) => Err(ConfigError::new("model", "needs a and b, or a coupling with a value")),
        }
    }

    pub fn sweep_plan(&self) -> Result<SweepPlan, ConfigError> {
        let axis =
            self.model.coupling.clone().ok_or_else(|| ConfigError::new("model.coupling", "sweeps need a coupling"))?;
        if self.model.values.is_empty() && !matches!(axis, Axis::Custom { .. }) {
            return Err(ConfigError::new("model.values", "sweeps need at least one value"));
        }
        let mut plan = SweepPlan::new(self.reaction_spec()?, axis, self.model.values.clone())
            .with_outputs(self.sweep.outputs.clone());
        if self.sweep.outputs.contains(&Output::Distances) {
            plan = plan.with_limit(self.limit.regime, self.limit.window);
        }
        plan.points().map_err(|e| ConfigError::new("model.values", e.to_string()))?;
        Ok(plan)
    }

    /// Checks every block before any solve.
    pub fn validate_solver(&self) -> Result<(), ConfigError> {
        let s = &self.solver;
        let positive = [
            ("rtol", s.rtol),
            ("atol", s.atol),
            ("h_min", s.h_min),
            ("h_max", s.h_max),
            ("delta_start", s.delta_start),
            ("v_start_forward", s.v_start_forward),
            ("v_floor", s.v_floor),
            ("v_end", s.v_end),
            ("ctol", s.ctol),
            ("rtol_match", s.rtol_match),
            ("delta0", s.delta0),
            ("delta1", s.delta1),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError::new(format!("solver.{name}"), format!("must lie in (0, 1) (got {v})")));
            }
        }
        if s.profile_points < 8 {
            return Err(ConfigError::new("solver.profile_points", "at least 8 points"));
        }
        if !(1..=17).contains(&self.output.digits) {
            return Err(ConfigError::new("output.digits", "between 1 and 17"));
        }
        let (lo, hi) = self.limit.window;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(ConfigError::new("limit.window", "needs finite lo < hi"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_and_point() {
        let cfg = RunConfig::parse(r#"{"reaction": {"catalog": "fisher"}, "model": {"a": 1, "b": 2}}"#).unwrap();
        assert_eq!(cfg.reaction_spec().unwrap(), ReactionSpec::fisher(1.0));
        assert_eq!(cfg.point().unwrap(), (1.0, 2.0));
        assert_eq!(cfg.solver, Controls::default());
    }

    #[test]
    fn coupling_point() {
        let cfg = RunConfig::parse(r#"{"model": {"coupling": {"kind": "epsilon"}, "value": 0.01}}"#).unwrap();
        let (a, b) = cfg.point().unwrap();
        assert!((a - 10.0).abs() < 1e-12 && (b - 10.0).abs() < 1e-12);
    }

    #[test]
    fn field_path_in_errors() {
        let err = RunConfig::parse(r#"{"solver": {"ctol": "x"}}"#).unwrap_err();
        assert_eq!(err.path, "solver.ctol");
        let err = RunConfig::parse(r#"{"model": {"a": 1, "bee": 2}}"#).unwrap_err();
        assert!(err.path.starts_with("model"), "{}", err.path);
    }

    #[test]
    fn dump_round_trip() {
        let cfg =
            RunConfig::parse(r#"{"reaction": {"catalog": "huxley", "param": 40}, "model": {"a": 1, "b": 1}}"#).unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_json()).unwrap(), cfg);
    }
}
