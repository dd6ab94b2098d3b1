use thiserror::Error;

use crate::distribution::DistributionKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    NonPowerOfTwo(usize),

    #[error("degenerate interval [{q_min}, {q_max})")]
    DegenerateInterval { q_min: f64, q_max: f64 },

    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("invalid state specification: {0}")]
    InvalidSpec(String),

    #[error("boundary leak ({what}): residual {residual:.3e} exceeds {tolerance:.1e}")]
    BoundaryLeak {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("state is not normalized: norm {norm:.12}")]
    NotNormalized { norm: f64 },

    #[error("density matrix invalid ({what}): residual {residual:.3e}")]
    InvalidDensity { what: &'static str, residual: f64 },

    #[error("mixture weights invalid: {0}")]
    WeightMismatch(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("expected a {expected:?} distribution, got {found:?}")]
    WrongKind {
        expected: DistributionKind,
        found: DistributionKind,
    },

    #[error("time step {dt:e} exceeds the {what} bound {bound:e}")]
    StepTooLarge { what: &'static str, dt: f64, bound: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
}
