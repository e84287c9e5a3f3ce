use thiserror::Error;

/// Errors produced by grid construction, field arithmetic and the numerical
/// guards of the propagation and operator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LgError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field layout mismatch: {0}")]
    Mismatch(String),

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("field contains non-finite samples")]
    NonFinite,

    #[error(
        "aliasing guard: edge intensity {edge_ratio:.3e} of peak exceeds {limit:.0e}; \
         enlarge the window extent or the padding factor"
    )]
    AliasingGuard { edge_ratio: f64, limit: f64 },

    #[error("mode order {order} exceeds the supported maximum {max}")]
    OrderGuard { order: u32, max: u32 },

    #[error("expectation value has imaginary part {0:.3e}; operator is not Hermitian on this field")]
    NonHermitian(f64),
}

pub type Result<T> = std::result::Result<T, LgError>;
