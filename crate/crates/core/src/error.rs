use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("mixed logarithms (log z and log z-bar in one monomial) produced by {0}")]
    MixedLog(&'static str),
    #[error("angle {theta} lies outside the {sector} sector (omega = {omega})")]
    Domain {
        theta: f64,
        sector: &'static str,
        omega: f64,
    },
    #[error("singular evaluation at r = {0}")]
    Singular(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
