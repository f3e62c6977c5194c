use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("retarded time did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("field point lies on the source worldline (distance {0:.3e})")]
    Singular(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("time step {dt} violates the CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("non-finite field value after step {0}")]
    NonFinite(usize),
    #[error("divergent integrand: {0}")]
    Divergent(String),
    #[error("field vanishes, guidance direction undefined")]
    ZeroField,
    #[error("wave function node at the evaluation point")]
    Node,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
