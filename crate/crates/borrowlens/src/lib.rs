//! Command-line front end: runs cargo, writes diagrams, and keeps a ledger
//! of build snapshots for measuring how long errors take to fix.
//!
//! The data model, interpretation, layout and cost accounting live in
//! `borrowlens-core`.

pub mod build;
pub mod cli;
pub mod config;
pub mod ledger;
pub mod report;

pub use build::{run_build, BuildError, BuildRunner};
pub use config::{Config, Flags};
