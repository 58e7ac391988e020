use thiserror::Error;

/// Errors raised by the core library.
///
/// Outcomes that are part of a normal answer (an infeasible search, a lemma
/// whose hypothesis is not met) are reported through status enums instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid function table: {0}")]
    InvalidFunction(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}

pub(crate) fn check_open_probability(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!(
            "{name} = {p} must lie strictly inside (0, 1)"
        )));
    }
    Ok(())
}
