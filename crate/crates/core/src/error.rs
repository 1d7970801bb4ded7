use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at {at_ghz} GHz ({kind})")]
    Pole { kind: &'static str, at_ghz: f64 },
    #[error("no sign change in [{lo}, {hi}] GHz; poles at {poles:?} GHz")]
    NoRoot { lo: f64, hi: f64, poles: Vec<f64> },
    #[error("fit failed: {reason} (residual {residual:.3e})")]
    Fit { reason: String, residual: f64 },
    #[error("degenerate extraction: {0}")]
    Degenerate(String),
    #[error("computation failed: {0}")]
    Computation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
