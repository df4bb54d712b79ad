//! Files and command line around `handoff-core`: TOML scenario files, CSV
//! traces and samples, CSV/JSON reports, bundled presets and parallel
//! parameter sweeps.

pub mod cli;
pub mod csvio;
pub mod error;
pub mod fmt;
pub mod presets;
pub mod report;
pub mod scenario_file;
pub mod sweep;

pub use error::{AppError, Result};
