//! Command-line front end for the platoon simulator: configuration files,
//! scenario runs, reproducible sweeps, stability reports, and the CSV/SVG
//! output formats. All numerics live in `platoon-core`; this crate only
//! parses, orchestrates, and writes files.

pub mod config;
pub mod csvio;
pub mod error;
pub mod run;
pub mod stability_cmd;
pub mod summary;
pub mod svg;
pub mod sweep;

pub use config::RunConfig;
pub use error::CliError;
