//! Experiment configuration: a flat TOML table, overridable from the command
//! line, validated before any computation runs.

use std::path::{Path, PathBuf};

use bilinear_variation::ConvexBody;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SUITES: [&str; 9] =
    ["identities", "domination", "carleson", "cz", "square", "counterexample", "interp", "ergodic", "sweep"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown suite {0:?} (expected one of {SUITES:?})")]
    UnknownSuite(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// What the norm sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Strong,
    Weak,
    Bmo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub suite: Option<String>,
    /// `ball`, `cube`, `gamma` or `polytope`.
    pub body: String,
    /// Row-major `[γ11, γ12, γ21, γ22]` for `body = "gamma"`.
    pub gamma: Option<[f64; 4]>,
    /// Rows of `A` in `{A·y ≤ 1}` for `body = "polytope"`.
    pub halfspaces: Option<Vec<Vec<f64>>>,
    pub dims: usize,
    /// Cells per axis.
    pub grid: usize,
    pub mesh: f64,
    pub p1: f64,
    pub p2: f64,
    pub p: f64,
    pub q: f64,
    pub l: f64,
    pub eps: f64,
    pub s: f64,
    pub target: Target,
    pub trials: u64,
    pub seed: u64,
    pub out: PathBuf,
    /// Construction size for the extremal example, level for the maximal
    /// functions.
    pub n: u32,
    /// File of empirical-constant ceilings; the checked-in defaults when unset.
    pub ceilings: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: None,
            body: "ball".into(),
            gamma: None,
            halfspaces: None,
            dims: 1,
            grid: 64,
            mesh: 1.0,
            p1: 2.0,
            p2: 2.0,
            p: 1.0,
            q: 3.0,
            l: 1.5,
            eps: 1.0,
            s: 10.0,
            target: Target::Strong,
            trials: 100,
            seed: 0,
            out: PathBuf::from("out"),
            n: 4,
            ceilings: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<u64>,
    pub grid: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.trials {
            self.trials = v;
        }
        if let Some(v) = o.grid {
            self.grid = v;
        }
    }

    /// Checks everything a suite relies on. `suite` is the one about to run.
    pub fn validate(&self, suite: &str) -> Result<(), ConfigError> {
        if !SUITES.contains(&suite) {
            return Err(ConfigError::UnknownSuite(suite.into()));
        }
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.grid == 0 {
            return bad("grid must be at least 1 cell".into());
        }
        if !(self.mesh > 0.0 && self.mesh.is_finite()) {
            return bad(format!("mesh {} must be positive", self.mesh));
        }
        if !(1..=2).contains(&self.dims) {
            return bad(format!("dims {} must be 1 or 2", self.dims));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.q > 2.0 && self.q.is_finite()) {
            return bad(format!("q = {} must satisfy 2 < q < ∞", self.q));
        }
        for (name, v) in [("p1", self.p1), ("p2", self.p2)] {
            if !(v >= 1.0) {
                return bad(format!("{name} = {v} must be at least 1"));
            }
        }
        if !(self.p > 0.0) {
            return bad(format!("p = {} must be positive", self.p));
        }
        if self.p1.is_finite() || self.p2.is_finite() {
            let lhs = 1.0 / self.p;
            let rhs = 1.0 / self.p1 + 1.0 / self.p2;
            if (lhs - rhs).abs() > 1e-12 {
                return bad(format!("1/p = {lhs} but 1/p1 + 1/p2 = {rhs}"));
            }
        }
        if !(self.l > 1.0 && self.l < 2.0) {
            return bad(format!("l = {} must lie in (1, 2)", self.l));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if !(self.s > 2.0 && self.s.is_finite()) {
            return bad(format!("s = {} must satisfy 2 < s < ∞", self.s));
        }
        self.body()?;
        Ok(())
    }

    pub fn body(&self) -> Result<ConvexBody, ConfigError> {
        let body = match self.body.as_str() {
            "ball" => ConvexBody::ball(self.dims, 1.0),
            "cube" => ConvexBody::cube(self.dims, 1.0),
            "gamma" => {
                let g = self.gamma.ok_or_else(|| ConfigError::Invalid("body = \"gamma\" needs gamma".into()))?;
                ConvexBody::gamma(self.dims, [[g[0], g[1]], [g[2], g[3]]])
            }
            "polytope" => {
                let rows = self
                    .halfspaces
                    .clone()
                    .ok_or_else(|| ConfigError::Invalid("body = \"polytope\" needs halfspaces".into()))?;
                ConvexBody::polytope(self.dims, rows)
            }
            other => return Err(ConfigError::Invalid(format!("unknown body {other:?}"))),
        };
        body.map(|b| b.normalize()).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}
