//! Scenario ingestion and command runners for the `koenigs` binary.

pub mod commands;
pub mod scenario;
