//! One module per experiment; `run` dispatches and `all` concatenates.

use std::path::Path;

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::Report;

pub mod bundle;
pub mod cantor;
pub mod catmap;
pub mod codes;
pub mod crossed;
pub mod nctorus;
pub mod transport;
pub mod zmetric;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Io(std::io::Error),
    /// A core-module error with experiment context.
    Core(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
            RunError::Core(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Wrap a core error with its experiment context.
pub(crate) fn core_err<E: std::fmt::Display>(experiment: &str, e: E) -> RunError {
    RunError::Core(format!("{experiment}: {e}"))
}

/// Run one experiment (or `all`): CSVs are written into `out`, the
/// returned report is written by the caller.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let report = match cfg.experiment.as_str() {
        "zmetric" => zmetric::run(cfg, out)?,
        "transport" => transport::run(cfg, out)?,
        "crossed" => crossed::run(cfg, out)?,
        "bundle" => bundle::run(cfg, out)?,
        "catmap" => catmap::run(cfg, out)?,
        "cantor" => cantor::run(cfg, out)?,
        "nctorus" => nctorus::run(cfg, out)?,
        "codes" => codes::run(cfg, out)?,
        "all" => {
            let mut combined = Report::new("all", cfg.echo());
            for exp in crate::EXPERIMENTS {
                let sub_cfg = cfg.narrowed(exp)?;
                let sub = run(&sub_cfg, out)?;
                combined.absorb(exp, sub);
            }
            combined
        }
        other => return Err(ConfigError::UnknownExperiment(other.to_string()).into()),
    };
    Ok(report)
}
