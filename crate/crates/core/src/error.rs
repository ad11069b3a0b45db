use thiserror::Error;

/// Everything that can go wrong anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("partner quality failure: best candidate {best:?} has |<k',w>| = {value:.6e}, below |k|/8 = {threshold:.6e}")]
    PartnerQuality {
        best: Vec<i64>,
        value: f64,
        threshold: f64,
    },

    #[error("approximation quality: {0}; increase M or kappa")]
    ApproximationQuality(String),

    #[error("insufficient sequence: {usable} usable points, need at least 3")]
    InsufficientSequence { usable: usize },

    #[error("boundary value problem failed: {message}")]
    Bvp { message: String, scan: Vec<(f64, f64)> },

    #[error("minimization did not converge after {iterations} iterations (residual {residual:.3e})")]
    Minimization {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("integration error at t = {time}: {message}")]
    Integration { time: f64, message: String },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
