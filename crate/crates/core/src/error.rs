use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants map onto the process exit codes used by the CLI:
/// configuration, precondition and input problems are usage errors,
/// `NonFinite`/`Numerical` are numerical failures and `Resource` is a
/// capacity limit (codebook or search size).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("non-finite value produced at sample {index}")]
    NonFinite { index: u64 },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::Numerical(_))
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
