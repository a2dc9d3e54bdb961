use thiserror::Error;

/// Errors raised by the numerical and symbolic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision {got} bits is below the minimum of {min} bits")]
    Precision { got: u32, min: u32 },

    #[error("series is not invertible: constant term is zero")]
    NotInvertible,

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point outside the convergence region: {0}")]
    OutsideRegion(String),

    #[error("cannot determine vanishing order within {depth} Taylor terms")]
    VanishingOrder { depth: u32 },

    #[error("expression contains a reciprocal; use a Laurent expansion instead")]
    ReciprocalInTaylor,

    #[error("nonconvergent parameter regime: weight {weight}, j = {j}")]
    Nonconvergent { weight: u32, j: u32 },

    #[error("pole order {order} at {point} violates the congruence n = 1 - k mod {omega} for k = {k}")]
    Congruence { point: String, order: u32, k: i64, omega: u32 },

    #[error("principal part at {point} inconsistent with basis tails at order {order}")]
    InconsistentTails { point: String, order: u32 },

    #[error("pole of order {order} at {point} where a simple pole was required")]
    NotSimplePole { point: String, order: u32 },

    #[error("basis normalizer vanishes at {point} for weight {weight}")]
    VanishingNormalizer { point: String, weight: i64 },

    #[error("representation terms have inconsistent weights ({0} and {1})")]
    MixedWeights(i64, i64),
}

impl Error {
    /// True for errors caused by malformed user input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::InvalidArgument(_) | Error::Precision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
