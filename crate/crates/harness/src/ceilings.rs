//! Ceilings for the tracked empirical constants: a flat TOML table of
//! `key = value`, defaulting to the checked-in calibration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::config::ConfigError;
use crate::report::Check;

/// Each default is four times the largest value seen in a calibration run.
pub const DEFAULT_CEILINGS: &str = include_str!("../ceilings.toml");

pub const CALIBRATION_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ceilings(pub BTreeMap<String, f64>);

impl Ceilings {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(Self(toml::from_str(text)?))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            None => Self::parse(DEFAULT_CEILINGS),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|source| ConfigError::Read { path: p.to_owned(), source })?;
                Self::parse(&text)
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    /// Turns every tracked check with a ceiling into a gating one.
    pub fn apply(&self, checks: &mut [Check]) {
        for c in checks {
            let Some((key, max)) = c.tracked.clone() else { continue };
            match self.get(&key) {
                Some(ceiling) => {
                    c.gating = true;
                    c.fail_if(!(max <= ceiling));
                    c.summary = format!("{}; ceiling {key} = {ceiling}", c.summary);
                }
                None => c.summary = format!("{}; no ceiling for {key}", c.summary),
            }
        }
    }

    /// The file written by a calibration run.
    pub fn render(&self, header: &str) -> String {
        let mut s = String::new();
        for line in header.lines() {
            s.push_str(&format!("# {line}\n"));
        }
        for (k, v) in &self.0 {
            s.push_str(&format!("{k} = {v:?}\n"));
        }
        s
    }
}
