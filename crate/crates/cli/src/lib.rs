//! Command implementations behind the `stc` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifact;
pub mod commands;
pub mod config;
pub mod error;
pub mod sampling;

pub use artifact::SynthesisArtifact;
pub use config::ProblemConfig;
pub use error::{CliError, CliResult};
