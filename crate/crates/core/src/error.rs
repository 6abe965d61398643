use std::io;

/// Errors produced anywhere in the library.
///
/// Each variant maps onto one process exit code in the CLI (see [`Error::exit_code`]).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A request exceeds a configured size, memory or precision budget.
    #[error("resource error: {0}")]
    Resource(String),
    /// Inconsistent configuration, e.g. a resume checkpoint beyond the limit.
    #[error("config error: {0}")]
    Config(String),
    /// A caller broke a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Checked counter arithmetic overflowed.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    /// A numerical routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Input data is missing or malformed.
    #[error("data error: {0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Exit code used by the command-line driver: 2 for usage or domain
    /// problems, 3 for resource and I/O failures, 1 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Data(_) | Error::Precondition(_) => 2,
            Error::Resource(_) | Error::Io(_) | Error::Csv(_) => 3,
            Error::Overflow(_) | Error::Numeric(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
