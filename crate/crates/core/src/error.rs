use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite Bessel evaluation: order {order}, argument {x}")]
    NonFinite { order: u32, x: f64 },
    #[error("Bessel order {0} exceeds the supported maximum")]
    OrderTooLarge(u32),
    #[error("no resonance root for p = {p} in the scan window (found {found})")]
    NoRootInBracket { p: u32, found: usize },
    #[error("field vanishes at r = {0}")]
    ZeroField(f64),
    #[error("invalid angular momenta: {0}")]
    InvalidAngularMomenta(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("steady-state solve did not converge (residual {residual:.3e})")]
    NonConvergence { residual: f64 },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sweep grid too large: {0}")]
    GridTooLarge(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
