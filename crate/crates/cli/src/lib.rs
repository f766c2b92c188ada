//! Batch front end for `adw-core`: TOML configuration, mode runners, CSV/JSON
//! exporters with a reproducibility manifest, and polarization rendering.

pub mod config;
pub mod error;
pub mod io;
pub mod render;
pub mod run;
pub mod sources;

pub use config::{Mode, RunConfig};
pub use error::CliError;
pub use io::{Manifest, RunStatus};
pub use run::execute;
