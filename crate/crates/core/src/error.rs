use thiserror::Error;

/// Errors raised by the matrix-polynomial toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically singular (rank {rank} < {dim})")]
    SingularMatrix { rank: usize, dim: usize },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix polynomial has no nonzero coefficient")]
    ZeroPolynomialInput,

    #[error("matrix polynomial is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix polynomial is not regular (det P(λ) vanishes identically)")]
    NotRegular,

    #[error("pencil is singular; Kronecker null indices are not supported")]
    SingularPencil,

    #[error("{0} is not an eigenvalue (P(a) is numerically invertible)")]
    NotAnEigenvalue(String),

    #[error("pair has no Jordan block structure; operation needs a Jordan pair")]
    NotJordan,

    #[error("zero eigenvalues cannot be spectrally inverted")]
    ZeroEigenvalueInversion,

    #[error("eigenvalue {0} is not present on the source side of the pair")]
    EigenvalueNotPresent(String),

    #[error("pair is rank deficient: left nullspace has dimension {found}, expected {expected}")]
    RankDeficientPair { found: usize, expected: usize },

    #[error("selection is inadmissible: Q0 is singular")]
    SingularQ0,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("factor pencil is degenerate (det F(λ) vanishes identically)")]
    DegenerateFactor,

    #[error("pencil does not divide the polynomial (relative residual {residual:.3e})")]
    NotADivisor { residual: f64 },

    #[error("could not find sample points avoiding the spectrum of the factor")]
    SpectrumAvoidanceFailed,

    #[error("pencil is not a regular right factor candidate: {0}")]
    NotRegularFactor(String),

    #[error("eigenvalues of the polynomial are not semisimple")]
    NotSemisimple,

    #[error("spectral plan is infeasible: {0}")]
    PlanInfeasible(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
