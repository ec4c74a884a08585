//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero quaternion is not invertible")]
    NotInvertible,

    #[error("polar decomposition of the zero vector is undefined")]
    ZeroPolar,

    #[error("geometry mismatch: {0}")]
    Geometry(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),

    #[error("wavelet insufficiently vanishing at DC: psi_hat(0) = {0:.3e} exceeds 1e-6")]
    NotAdmissible(f64),

    #[error("scale grid is empty (j_min > j_max)")]
    EmptyScaleGrid,

    #[error("trimmed field would be {0}x{1}; the minimum is 8x8")]
    TrimTooSmall(usize, usize),

    #[error("MSE reference field has zero norm")]
    ZeroReference,

    #[error("directional grid has {requested} cells, exceeding the budget of {budget}")]
    BinBudget { requested: usize, budget: usize },

    #[error("malformed file `{path}`: {reason}")]
    Format { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn format(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
