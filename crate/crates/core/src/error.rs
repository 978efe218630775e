use alloc::string::String;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or vector shapes disagree.
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },

    /// Two spectral values are closer than the gap tolerance.
    #[error("degenerate spectrum: |{a} - {b}| below gap tolerance {tol}")]
    Degenerate { a: f64, b: f64, tol: f64 },

    /// A stepper could not make progress.
    #[error("integration failure at step {step}: {reason} ({bisections} bisections)")]
    Integration {
        step: usize,
        bisections: usize,
        reason: String,
    },

    /// Maximum-likelihood fitting failed; carries the moment estimates.
    #[error("fit failed: {reason} (moment shape {moment_shape}, moment rate {moment_rate})")]
    Fit {
        reason: String,
        moment_shape: f64,
        moment_rate: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
