use thiserror::Error;

/// Errors raised by the numerical kernels, the analytic engine and the
/// experiment front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A finite real input produced a result outside the f64 range.
    #[error("overflow in {func}: {detail}")]
    Overflow { func: &'static str, detail: String },

    /// A truncated series had not started to decay at its cutoff.
    #[error("series did not converge in {func}: {detail}")]
    Convergence { func: &'static str, detail: String },

    /// The complex accumulation of a d_j coefficient left an imaginary part
    /// above the accepted residue.
    #[error("d_{j} has imaginary residue {imag:e} against real part {real:e}")]
    ImaginaryResidue { j: usize, real: f64, imag: f64 },

    /// A probability came out negative by more than round-off.
    #[error("{quantity} = {value:e} is negative beyond the truncation residue")]
    NegativeProbability { quantity: &'static str, value: f64 },

    /// Invalid parameters or a malformed configuration file.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn overflow(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Overflow {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn convergence(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            func,
            detail: detail.into(),
        }
    }

    /// True for the errors that the CLI reports with the convergence exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Overflow { .. }
                | Error::ImaginaryResidue { .. }
                | Error::NegativeProbability { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
