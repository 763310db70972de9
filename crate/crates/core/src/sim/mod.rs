//! Config-driven runs and trajectory comparison.

mod compare;
mod config;
mod run;

pub use compare::{centroid_y_deviation, compare_runs, ComparisonReport, PairComparison};
pub use config::{keys_help, parse_config, parse_config_str, Method, SimConfig, KEYS};
pub use run::{run_simulation, RunSummary};
