//! Error type shared by every module in the crate.

use num_complex::Complex64;

/// Errors produced by the algebraic and numerical operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("undefined resultant: both polynomials are zero")]
    UndefinedResultant,

    #[error("degree must be at least {min}, got {got}")]
    DegreeTooSmall { min: usize, got: usize },

    #[error("root finding did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<Complex64>,
    },

    #[error("polynomial must be monic")]
    NotMonic,

    #[error("transformation has degree {deg_phi} >= source degree {deg_f}: reduce modulo f")]
    ReduceModulo { deg_phi: usize, deg_f: usize },

    #[error("no preimage within tolerance (closest image distance {closest:.3e})")]
    NoPreimage { closest: f64 },

    #[error("ambiguous preimage: {count} roots map within tolerance of the same image")]
    AmbiguousPreimage { count: usize },

    #[error("degenerate quintic: discriminant is zero")]
    DegenerateQuintic,

    #[error("already one-parameter: y^5 + p*y = y*(y^4 + p)")]
    ZeroQ,

    #[error("transformation residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("group too large: order exceeds {max_order}")]
    GroupTooLarge { max_order: usize },

    #[error("near-critical path at parameter point {point:?}")]
    NearCriticalPath { point: Vec<Complex64> },

    #[error("line lies in discriminant locus; retry with a different seed")]
    LineInDiscriminantLocus,

    #[error("radius too small or degenerate stratum near {point:?}")]
    RadiusTooSmall { point: Vec<Complex64> },

    #[error("refine tolerance: root clusters separated by less than 10x the clustering scale")]
    AmbiguousClustering,

    #[error("stratum not realizable in this family")]
    StratumNotRealizable,

    #[error("evaluation-only: group order {order} exceeds expansion limit {limit}")]
    EvaluationOnly { order: usize, limit: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors caused by malformed input data rather than by the
    /// mathematics of an operation. The CLI maps these to a different exit code.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Invalid(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
