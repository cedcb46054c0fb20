//! Batch driver for the `rabuild` workbench: building descriptions in TOML,
//! check suites with JSON reports, and DOT exports.

pub mod commands;
pub mod dot;
pub mod specfile;

pub use commands::{Exit, SCHEMA_VERSION};
pub use specfile::SpecFile;
