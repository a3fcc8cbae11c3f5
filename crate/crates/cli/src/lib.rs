//! Configuration and execution behind the `verify` binary.

pub mod config;
pub mod runner;
