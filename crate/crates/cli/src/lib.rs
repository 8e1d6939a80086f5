//! Command-line front end for the landslide-susceptibility toolkit: feature
//! screening, exhaustive model search, Shapley explanations, and
//! SHAP-guided feature reduction, each persisting reproducible JSON/CSV
//! artifacts into an output directory.

pub mod config;
pub mod error;
pub mod render;
pub mod stage;

pub use config::{load_config, resolve, FlagOverrides, PipelineConfig, RunConfig};
pub use error::CliError;
