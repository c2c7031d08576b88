use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty matrix or vector")]
    Empty,

    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },

    #[error("operator is not hermitian: max |A - A^dag| = {deviation:e}, max |A| = {scale:e}")]
    NotHermitian { deviation: f64, scale: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("hermitian eigensolver did not converge (max |A| = {norm:e})")]
    EigenNoConvergence { norm: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("level {level} out of range for dimension {dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("parameter index {index} out of range for {count} perturbations")]
    ParameterOutOfRange { index: usize, count: usize },

    #[error("perturbation needs at least one operator")]
    NoPerturbations,

    #[error(
        "level {level} is degenerate with level {other} (gap {gap:e}) and coupled by perturbation {parameter} \
         (|<m|H|n>| = {coupling:e}); degenerate perturbation theory is not supported"
    )]
    Degeneracy {
        level: usize,
        other: usize,
        parameter: usize,
        gap: f64,
        coupling: f64,
    },

    #[error("first-order correction for parameter {index} vanishes")]
    ZeroCorrection { index: usize },

    #[error("first-order corrections are parallel (|omega| = {overlap_modulus})")]
    ParallelCorrections { overlap_modulus: f64 },

    #[error("quantum Fisher information matrix is singular (rank {rank} of {dim})")]
    SingularQfim { rank: usize, dim: usize },

    #[error("quadrature integrand is not finite at s = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("could not track level {level} along the coupling path at step {step}")]
    LevelTracking { level: usize, step: usize },

    #[error("finite-difference step {eps:e} is unreliable: step-halving disagreement {disagreement:.3}")]
    StepTooSmall { eps: f64, disagreement: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
