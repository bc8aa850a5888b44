//! Declarative runs of the `sdqsim-core` experiments: TOML run files, the
//! figure presets, and deterministic CSV/JSON output with a checksummed
//! manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{load_config, parse_config, Experiment, RunConfig};
pub use error::CliError;
pub use output::{RunManifest, MANIFEST};
pub use presets::{list_presets, preset};
pub use run::run_experiment;
