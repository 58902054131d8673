//! Batch driver around `smlab-core`: flat-file configuration, seeded
//! corpora, experiment execution, and JSON/CSV report emission.
//!
//! Reports are byte-deterministic for a fixed configuration and seed:
//! every corpus is a pure function of the SplitMix64 seed, collections
//! iterate in sorted order, and wall-clock timing goes to the console
//! rather than into `report.json`.

pub mod config;
pub mod corpus;
pub mod experiments;
pub mod report;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{Check, Report};

/// The experiments the driver knows about, in execution order for `all`.
pub const EXPERIMENTS: &[&str] = &[
    "zmetric",
    "transport",
    "crossed",
    "bundle",
    "catmap",
    "cantor",
    "nctorus",
    "codes",
];
