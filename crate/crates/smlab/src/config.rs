//! Flat key-value configuration with per-experiment defaults.
//!
//! A config file is lines of `key value` (or `key = value`), `#`
//! comments allowed; command-line `--key value` pairs override the file.
//! Unknown keys are rejected so typos cannot silently change an
//! experiment.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    UnknownExperiment(String),
    UnknownKey(String),
    BadValue(String, String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownExperiment(e) => write!(f, "unknown experiment `{e}`"),
            ConfigError::UnknownKey(k) => write!(f, "unknown config key `{k}`"),
            ConfigError::BadValue(k, v) => write!(f, "bad value `{v}` for key `{k}`"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Defaults per experiment; every key an experiment accepts appears
/// here. The `all` pseudo-experiment accepts the union.
fn defaults(experiment: &str) -> Option<Vec<(&'static str, &'static str)>> {
    let common = vec![("seed", "1")];
    let spec: Vec<(&str, &str)> = match experiment {
        "zmetric" => vec![
            ("window", "8"),
            ("profiles", "5"),
            ("lambda", "1.0"),
            ("tol_lp", "1e-8"),
        ],
        "transport" => vec![
            ("window", "8"),
            ("pairs", "60"),
            ("tol_kr", "1e-7"),
            ("tol_cdf", "1e-9"),
        ],
        "crossed" => vec![
            ("window", "6"),
            ("bound_window", "12"),
            ("elements", "12"),
            ("support", "3"),
            ("tol_spec", "1e-9"),
            ("tol_slack", "1e-9"),
        ],
        "bundle" => vec![
            ("window", "8"),
            ("rmax", "4"),
            ("lambda", "1.0"),
            ("segments", "200"),
            ("curves", "10"),
            ("tol_path", "1e-4"),
        ],
        "catmap" => vec![("kmax", "8"), ("tol_ratio", "0.01")],
        "cantor" => vec![("depth", "2")],
        "nctorus" => vec![("kmax", "8"), ("cutoff", "3"), ("tol_ratio", "0.01")],
        "codes" => vec![("m_max", "3"), ("zeta_terms", "25")],
        _ => return None,
    };
    Some(common.into_iter().chain(spec).collect())
}

fn allowed_for_all() -> BTreeMap<&'static str, &'static str> {
    let mut map = BTreeMap::new();
    for exp in crate::EXPERIMENTS {
        for (k, v) in defaults(exp).expect("known experiment") {
            map.entry(k).or_insert(v);
        }
    }
    map
}

/// A resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Resolve defaults, then a config file body, then overrides.
    pub fn resolve(
        experiment: &str,
        file_body: Option<&str>,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        let base: BTreeMap<String, String> = if experiment == "all" {
            allowed_for_all()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        } else {
            defaults(experiment)
                .ok_or_else(|| ConfigError::UnknownExperiment(experiment.to_string()))?
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        };
        let mut values = base.clone();
        let mut apply = |key: &str, value: &str| -> Result<(), ConfigError> {
            if !base.contains_key(key) {
                return Err(ConfigError::UnknownKey(key.to_string()));
            }
            values.insert(key.to_string(), value.to_string());
            Ok(())
        };
        if let Some(body) = file_body {
            for raw in body.lines() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let cleaned = line.replace('=', " ");
                let mut parts = cleaned.split_whitespace();
                let key = parts
                    .next()
                    .ok_or_else(|| ConfigError::Invalid(raw.to_string()))?;
                let value = parts
                    .next()
                    .ok_or_else(|| ConfigError::Invalid(raw.to_string()))?;
                if parts.next().is_some() {
                    return Err(ConfigError::Invalid(raw.to_string()));
                }
                apply(key, value)?;
            }
        }
        for (k, v) in overrides {
            apply(k, v)?;
        }
        let cfg = Self {
            experiment: experiment.to_string(),
            values,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (k, v) in &self.values {
            if k.starts_with("tol_") && self.f64(k)? <= 0.0 {
                return Err(ConfigError::BadValue(k.clone(), v.clone()));
            }
        }
        if let Some(w) = self.values.get("window") {
            let n: i64 = w
                .parse()
                .map_err(|_| ConfigError::BadValue("window".into(), w.clone()))?;
            if n < 2 {
                return Err(ConfigError::Invalid(format!(
                    "window must be at least 2, got {n}"
                )));
            }
        }
        if let Some(l) = self.values.get("lambda") {
            let v: f64 = l
                .parse()
                .map_err(|_| ConfigError::BadValue("lambda".into(), l.clone()))?;
            if v == 0.0 {
                return Err(ConfigError::Invalid("lambda must be nonzero".into()));
            }
        }
        Ok(())
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        self.values.clone()
    }

    pub fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        self.get(key)?.parse().map_err(|_| self.bad(key))
    }

    pub fn i64(&self, key: &str) -> Result<i64, ConfigError> {
        self.get(key)?.parse().map_err(|_| self.bad(key))
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.get(key)?.parse().map_err(|_| self.bad(key))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.get(key)?.parse().map_err(|_| self.bad(key))
    }

    fn get(&self, key: &str) -> Result<&str, ConfigError> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))
    }

    fn bad(&self, key: &str) -> ConfigError {
        ConfigError::BadValue(
            key.to_string(),
            self.values.get(key).cloned().unwrap_or_default(),
        )
    }

    /// Derive the config for one sub-experiment of `all`.
    pub fn narrowed(&self, experiment: &str) -> Result<ExperimentConfig, ConfigError> {
        let keys: Vec<String> = defaults(experiment)
            .ok_or_else(|| ConfigError::UnknownExperiment(experiment.to_string()))?
            .into_iter()
            .map(|(k, _)| k.to_string())
            .collect();
        let values = self
            .values
            .iter()
            .filter(|(k, _)| keys.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(ExperimentConfig {
            experiment: experiment.to_string(),
            values,
        })
    }
}
