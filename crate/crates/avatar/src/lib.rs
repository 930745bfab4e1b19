//! Std-side plumbing for `avatar-core`: run configuration, zero files,
//! the parallel experiment runner and JSON rendering of reports.

use std::path::PathBuf;

use avatar_core::eta_engine::EtaError;
use avatar_core::tracer::TraceError;
use avatar_core::treepath::TreeError;
use avatar_core::zeta::ZetaError;
use thiserror::Error;

pub mod config;
pub mod experiment;
pub mod report;
pub mod zeros;

pub use config::{Config, ZeroSource};
pub use experiment::{run_parallel, ExperimentRun, TimedTrace};
pub use zeros::{compare_zeros, load_zeros, ZeroComparison};

#[derive(Debug, Error)]
pub enum AvatarError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    ZeroFile {
        path: PathBuf,
        #[source]
        source: ZetaError,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("need {needed} zeros but only {available} are available")]
    TooFewZeros { needed: usize, available: usize },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Eta(#[from] EtaError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}
