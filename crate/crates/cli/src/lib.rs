//! Scenario-driven front end for the fold-dynamics library: configuration
//! files, batch execution and CSV/JSON emission.

pub mod commands;
pub mod config;
pub mod failure;
pub mod output;

pub use config::Scenario;
pub use failure::Failure;
