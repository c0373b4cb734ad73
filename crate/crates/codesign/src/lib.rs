//! File formats, caching, parallel evaluation and the command line around
//! `codesign-core`.

pub mod calibration;
pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod enumerate;
pub mod error;
pub mod evaluator;
pub mod formats;
pub mod kv;
pub mod report;
pub mod sampling;
pub mod steplog;

pub use commands::{cmd_eval, cmd_pareto, cmd_report, cmd_search, load_config, Overrides};
pub use config::RunConfig;
pub use error::CliError;
pub use evaluator::{CacheStats, CachedEvaluator};
