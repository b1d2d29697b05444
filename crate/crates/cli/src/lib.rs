//! Configuration, presets, sweep execution and validation behind the
//! `nmqsd` command.

pub mod app;
pub mod config;
pub mod presets;
pub mod runner;
pub mod validate;

pub use config::{parse_config, Config, ConfigError, RunConfig, SweepAxis, SweepConfig};
pub use presets::preset;
pub use runner::{execute, RunSummary, SweepReport};
