//! Lemma checkers, theorem sweeps, reports and the command-line front end.

pub mod cli;
pub mod config;
pub mod corollary;
pub mod corpus;
pub mod lemma;
pub mod report;
pub mod theorem;

pub use cli::run_cli;
pub use config::{ExperimentConfig, TheoremId};
pub use theorem::{sweep, RatioReport};
