use std::path::PathBuf;

use thiserror::Error;

use crate::csvio::CsvError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] phasespace::Error),
    #[error("{0}")]
    Csv(#[from] CsvError),
    #[error("config: {0}")]
    Config(String),
    #[error("failed checks: {0}")]
    Check(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use phasespace::Error as E;
        match self {
            CliError::Usage(_) | CliError::Csv(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Core(E::BoundaryLeak { .. } | E::StepTooLarge { .. }) => EXIT_GUARD,
            CliError::Core(
                E::NonPowerOfTwo(_)
                | E::DegenerateInterval { .. }
                | E::InvalidConstants(_)
                | E::InvalidSpec(_)
                | E::InvalidPotential(_)
                | E::InvalidConfig(_)
                | E::WrongKind { .. }
                | E::GridMismatch(_)
                | E::WeightMismatch(_),
            ) => EXIT_USAGE,
            CliError::Core(_) | CliError::Check(_) | CliError::Io { .. } => EXIT_CHECK,
        }
    }
}

pub fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
