//! Job files, report documents and their on-disk form.

mod config;
mod document;
mod run;

pub use config::{parse_config, GridConfig, JobConfig, JobKind, NumberFnKind, QDeformConfig};
pub use document::{serialize_report, JobResults, ReportDocument, TableRow, Timings, Verdict};
pub use run::{run_job, DEFAULT_TAUS};

/// Failures of the job pipeline, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run error: {0}")]
    Run(#[from] crate::Error),
    #[error("io error: {0}")]
    Io(String),
}

impl ReportError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Run(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

/// Exit code when `--assert` is given and a verdict fails.
pub const EXIT_ASSERT_FAILED: i32 = 1;
