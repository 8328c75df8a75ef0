//! Configuration parsing and output writers behind the `abflux` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_json, ConfigError, Format, Output, RunConfig};
pub use run::{run, RunReport, SCHEMA};
