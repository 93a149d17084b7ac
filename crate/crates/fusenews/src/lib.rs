//! File formats, wall-clock timing, parallel fold execution and the
//! `fusenews` command-line tool built on [`fusenews_core`].

pub mod cli;
pub mod clock;
pub mod config;
pub mod dataset;
pub mod embeddings;
pub mod error;
pub mod export;
pub mod lexicon;
pub mod parallel;
pub mod reports;
pub mod weights;

pub use error::{CliError, ExitCode};
