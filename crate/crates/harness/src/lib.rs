//! Experiment plumbing around the `castfeat` estimators: sweeps against the
//! flood-fill oracle, CSV tables, overlay renders and work benchmarks.

pub mod bench;
pub mod experiment;
pub mod render;
pub mod results;

use std::path::Path;

use thiserror::Error;

pub use bench::{bench, BenchRow};
pub use experiment::{run_experiment, ExperimentSpec, SweepOptions};
pub use render::{build_overlay, render_overlay, Overlay};
pub use results::{read_csv, write_csv, ResultRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Invalid spec, arguments or input contents.
    #[error("{0}")]
    Spec(String),
    #[error("{0}")]
    Io(String),
}

impl HarnessError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        HarnessError::Io(format!("{}: {err}", path.display()))
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Spec(_) => 2,
            HarnessError::Io(_) => 3,
        }
    }
}
