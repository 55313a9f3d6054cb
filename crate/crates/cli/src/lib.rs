//! Command-line front end: model files, reports and the built-in checks.

pub mod commands;
pub mod error;
pub mod report;
pub mod schema;
pub mod verify;
