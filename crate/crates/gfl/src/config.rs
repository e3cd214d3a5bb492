//! Experiment configuration: a flat `key = value` file plus command-line
//! overrides. Every report starts with the full resolved key set.

use std::fmt;

use gfl_core::{Error, Result};

/// Keys, defaults and one-line help, in report order.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("model", "example2:tau=1,window=12", "model descriptor"),
    ("mode", "auto", "numeric mode: rational, float, or auto (rational when the model allows it)"),
    ("site", "center", "target site, e.g. (6); `center` is the middle of the window"),
    ("filtration", "auto", "auto | box:r1,r2,... | lopsided:L/R:r1,r2,..."),
    ("family", "standard+oscillating", "boundary generators joined by `+`: constants, standard, random, oscillating, shells, adversarial"),
    ("random", "8", "number of random generators in `standard` / `random`"),
    ("tol", "1e-12", "gap / residual tolerance"),
    ("seed", "20240601", "seed for sampled fixtures and random boundaries"),
    ("samples", "20000", "fixture budget; populations within it are enumerated exhaustively"),
    ("max_volume", "3", "largest volume in specification fixtures"),
    ("axioms", "all", "validate: all, or a comma list of table, marginal, 1spec, tef, spec, reconstruction, gibbs"),
    ("volume", "", "energy / reconstruct: target volume, e.g. (2);(3); defaults to the site"),
    ("condition", "", "energy / reconstruct: condition literal, e.g. (1)=+1;(4)=-1"),
    ("reference", "", "reconstruct: reference configuration on the volume (default all first symbol)"),
    ("order", "", "reconstruct: site visiting order, e.g. (3);(2)"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    values: Vec<(String, String)>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let slot = self
            .values
            .iter_mut()
            .find(|(k, _)| k == key)
            .ok_or_else(|| Error::Argument(format!("unknown config key `{key}`")))?;
        slot.1 = value.trim().to_string();
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("config key `{key}` is not declared"))
    }

    pub fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)
            .parse()
            .map_err(|_| Error::Argument(format!("`{key}` = `{}` is not a number", self.get(key))))
    }

    pub fn seed(&self) -> Result<u64> {
        self.parse_num("seed")
    }

    pub fn samples(&self) -> Result<usize> {
        self.parse_num("samples")
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn load_str(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .entries()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// The same `key = value` format `load_str` reads.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
