//! Error conditions shared across the crate.

use std::fmt;

/// Errors surfaced by certified evaluations.
///
/// Variants carry enough context to tell a caller whether retrying at a
/// higher precision can help (`PrecisionExceeded`, `IntegerBoundary`) or
/// whether the input itself is outside the supported domain.
#[derive(Debug, Clone)]
pub enum Error {
    /// An input violates a mathematical precondition (division by an interval
    /// containing zero, log of a non-positive interval, `li` at 1, ...).
    Domain { op: &'static str, msg: String },

    /// A refinement loop would need more significant digits than the
    /// configured `max_refine_digits`.
    PrecisionExceeded { requested: u32, max: u32 },

    /// A prime-count query above the sieve cap.
    LimitExceeded { value: u64, cap: u64 },

    /// An enclosure still straddles an integer at maximum precision, so a
    /// floor or ceiling cannot be certified.
    IntegerBoundary { what: String },

    /// A derivative-sign search found no certified interior maximum on the
    /// bracket.
    NoInteriorMax { n: u64 },

    /// Invalid precision or sieve configuration.
    InvalidConfig { msg: String },

    /// A persistent cache file is missing, malformed, or fails its checksum.
    Cache { msg: String },

    /// Underlying I/O failure while reading or writing a cache or report.
    Io { msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { op, msg } => write!(f, "domain error in {op}: {msg}"),
            Error::PrecisionExceeded { requested, max } => {
                write!(
                    f,
                    "requested {requested} digits exceeds max_refine_digits {max}"
                )
            }
            Error::LimitExceeded { value, cap } => {
                write!(f, "prime count requested at {value} exceeds cap {cap}")
            }
            Error::IntegerBoundary { what } => {
                write!(
                    f,
                    "enclosure of {what} straddles an integer at maximum precision"
                )
            }
            Error::NoInteriorMax { n } => {
                write!(
                    f,
                    "beta_{n} has no certified interior maximum on the bracket"
                )
            }
            Error::InvalidConfig { msg } => write!(f, "invalid configuration: {msg}"),
            Error::Cache { msg } => write!(f, "cache error: {msg}"),
            Error::Io { msg } => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io { msg: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
