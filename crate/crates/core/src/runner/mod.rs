//! Config-driven batch runs: parse, dispatch to the engines, emit tables.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{parse_config, ExperimentConfig, ExperimentKind, OutputFormat};
pub use experiment::{run_experiment, summarize, ResultTable, TableMetadata, BUILD_ID};
pub use output::{emit, from_json, render, to_csv, to_json};
