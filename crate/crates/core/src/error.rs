use thiserror::Error;

/// Errors raised across the library.
///
/// Variants fall into two families that the command-line front end maps to
/// distinct exit codes: precondition failures (bad inputs, out-of-range
/// parameters) and invariant failures (an exact identity did not hold).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{n} lies outside the table range [1, {limit}]")]
    OutOfRange { n: u64, limit: u64 },
    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: u64, found: u64 },
    #[error("no value supplied for prime {0}")]
    MissingPrimeValue(u64),
    #[error("{what} = {value} exceeds the guard {limit}")]
    TooLarge {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("cannot parse function spec {0:?}")]
    Parse(String),
    #[error("residue {b} not reached within depth {depth} (deepest coverage {covered}/{group_order})")]
    NotReachable {
        b: u64,
        depth: usize,
        covered: usize,
        group_order: usize,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by a failed check.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Invariant(_) | Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
