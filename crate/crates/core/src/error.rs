use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact O(n) evaluation was requested above the configured vertex cap.
    #[error("n = {n} exceeds the exact-mode cap of {cap}")]
    CapExceeded { n: u64, cap: u64 },

    /// An iterative evaluation did not reach its tolerance.
    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("evaluation grid is empty")]
    EmptyGrid,

    /// Input too large for a brute-force oracle.
    #[error("size error: {0}")]
    Size(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
