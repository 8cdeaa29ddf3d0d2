//! Error type shared by all modules.

use crate::group::PhasePoint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("modulus {0} is smaller than 2")]
    ModulusTooSmall(u32),

    #[error("a group needs at least one cyclic factor")]
    EmptyModuli,

    #[error("{what}: expected length {expected}, got {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{what}: expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace must be 1, got {trace:.12}")]
    TraceNotUnit { trace: f64 },

    #[error("vector must have unit norm, got {norm:.12}")]
    NormNotUnit { norm: f64 },

    #[error("probabilities must sum to 1, got {sum:.12}")]
    ProbabilitiesNotNormalized { sum: f64 },

    #[error("density is negative at phase point {index}: {value:.3e}")]
    NegativeDensity { index: usize, value: f64 },

    #[error(
        "fiducial is not informationally complete: its Weyl transform vanishes \
         (|F| < {tolerance:.1e}) at {} of {total} phase points, first at {first}",
        vanishing.len()
    )]
    NotInformationallyComplete {
        tolerance: f64,
        total: usize,
        first: PhasePoint,
        vanishing: Vec<PhasePoint>,
    },

    #[error(
        "scalar phase relation fails on the comparison block (residual {residual:.3e} > {limit:.1e}); \
         the truncation dimension is too small for these arguments"
    )]
    PhaseRelationBreakdown { residual: f64, limit: f64 },

    #[error("truncation dimension {dim} is too small, need at least {min}")]
    TruncationTooSmall { dim: usize, min: usize },

    #[error("quadrature grid needs positive radius and step, got radius {radius}, step {step}")]
    InvalidQuadrature { radius: f64, step: f64 },

    #[error("comparison block {block} exceeds truncation dimension {dim}")]
    BlockTooLarge { block: usize, dim: usize },
}
