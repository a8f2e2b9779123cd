//! Command-line front end for hyperboloid GP-LVM experiments: configuration,
//! artifact writing, scoring and Poincaré-disk rendering.

pub mod commands;
pub mod config;
pub mod embedding;
pub mod error;
pub mod experiment;
pub mod svg;

pub use config::{DatasetConfig, RawConfig, RunConfig};
pub use embedding::Embedding;
pub use error::{CliError, Result};
pub use experiment::{run_experiment, RunManifest, Scores};
