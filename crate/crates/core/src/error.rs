use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("insufficient labels: {labels} labels for {objects} objects")]
    InsufficientLabels { labels: usize, objects: usize },

    #[error("label set carries no order")]
    UnsupportedOrder,

    #[error("family does not generate an order ideal: {x} ~ {y} and {y} ~ {z} but not {x} ~ {z}")]
    NonIdealFamily { x: String, y: String, z: String },

    #[error("vector lies outside the operator domain (residual {residual:.3e})")]
    OutsideDomain { residual: f64 },

    #[error("subspace is not invariant: image of basis vector {witness} leaves the span (residual {residual:.3e})")]
    NotInvariant { witness: usize, residual: f64 },

    #[error("operators are not commeasurable")]
    NotCommeasurable,

    #[error("function returned a non-finite value {value} at {at:?}")]
    NonFinite { value: f64, at: Vec<f64> },

    #[error("matrix is not transposition-equivariant outside any support of size <= {max_support}")]
    NotEquivariant { max_support: usize },

    #[error("inconsistent functional samples: {0}")]
    Inconsistent(String),

    #[error("numerical tolerance exceeded in {context}: {value:.3e} > {bound:.3e}")]
    Tolerance {
        context: String,
        value: f64,
        bound: f64,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Numerical failures map to a distinct CLI exit status.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Tolerance { .. })
    }
}
