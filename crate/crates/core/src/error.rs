//! Error taxonomy shared by every module.

use num_complex::Complex64;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A function was evaluated at (or on) one of its poles.
    #[error("pole error: {0}")]
    Pole(String),
    /// An argument lies outside the domain where a formula or bound is valid.
    #[error("domain error: {0}")]
    Domain(String),
    /// A side point sits on an edge/corner where the normal is ill-defined.
    #[error("edge error: {0}")]
    Edge(String),
    /// A solver bracket does not isolate a root/extremum.
    #[error("bracket error: {0}")]
    Bracket(String),
    /// A least-squares fit is too ill-conditioned to trust.
    #[error("fit error: {0}")]
    Fit(String),
    /// Bad run configuration (CLI / config file level).
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn pole(s: Complex64, what: &str) -> Self {
        Error::Pole(format!("{what} at s = {s}"))
    }
}
