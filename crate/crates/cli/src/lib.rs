//! The `defii` command-line tool.

pub mod app;
pub mod config;
pub mod thread;

pub use app::{execute, Cli, CliError};
pub use thread::{run_thread, ThreadOptions, ThreadOutcome, ThreadReport};
