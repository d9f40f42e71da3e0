use thiserror::Error;

use crate::quadrature::QuadratureError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error(
        "could not bracket the positive root of A = theta*g(A) for gamma={gamma}, theta={theta}: \
         f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e}"
    )]
    Bracket {
        gamma: f64,
        theta: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("gamma={gamma}: no closed near-critical law for 3 < gamma <= 4 (g''(0) = -inf)")]
    UnsupportedRegime { gamma: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("allocation failed: {0}")]
    Capacity(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the command-line front end: 2 for numeric
    /// failures, 3 for I/O and file-format failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Quadrature(_)
            | Error::Bracket { .. }
            | Error::UnsupportedRegime { .. }
            | Error::Capacity(_)
            | Error::Fit(_) => 2,
            Error::Parse { .. }
            | Error::Integrity(_)
            | Error::Schema(_)
            | Error::Csv(_)
            | Error::Io(_) => 3,
        }
    }
}
