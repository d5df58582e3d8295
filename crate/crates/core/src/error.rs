use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric (relative defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e}, max {max_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial frames differ")]
    FrameMismatch,

    #[error("point {x} lies outside the open interval ({a}, {b})")]
    OutsideInterval { x: f64, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown catalog weight `{0}`")]
    UnknownWeight(String),

    #[error("loss of positivity at index {index}: {source}")]
    Positivity {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("quadrature rule exact to degree {available} but degree {needed} requested")]
    QuadratureDegree { needed: usize, available: usize },

    #[error("truncated quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("operator is not of classical shape (deg F2 <= 2, deg F1 <= 1, deg F0 = 0)")]
    NotClassicalShape,

    #[error("symmetry condition on M inconclusive: normalized residual {residual:.3e} lies between the existence and non-existence thresholds")]
    HypInconclusive { residual: f64 },

    #[error("M does not make (M - x(Λ_N+1 + Λ_N))W symmetric: pointwise residual {residual:.3e}")]
    HypNotSatisfied { residual: f64 },

    #[error("cross-check `{check}` failed: defect {defect:.3e} exceeds {tolerance:.1e}")]
    CrossCheck { check: String, defect: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
