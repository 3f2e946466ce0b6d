//! Reproducible evaluation pipeline.

pub mod commands;
pub mod config;
pub mod csv;
pub mod study;
pub mod summary;
pub mod trial;

pub use config::{config_hash, load_config, parse_config, RunConfig, SceneConfig};
pub use summary::{batch_summary, BatchSummary};
pub use trial::{rho_metric, run_batch, run_trial, TrialResult};
