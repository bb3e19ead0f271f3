use alloc::string::String;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested Fock cutoff drops more probability mass than allowed.
    #[error("truncation error: tail mass {tail:e} beyond cutoff {cutoff} exceeds tolerance {tolerance:e}")]
    Truncation {
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("density matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("state norm {0} exceeds 1")]
    Overnormalized(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
