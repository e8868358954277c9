use thiserror::Error;

/// Errors produced by the library's fallible operations.
///
/// Contract violations on pure numeric helpers (`fib(0)`, significand of
/// zero) panic instead; see the individual function docs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An index sequence is not a legal Zeckendorf set (unsorted, duplicated,
    /// adjacent, or containing an index below 1).
    #[error("illegal Zeckendorf index set: {0}")]
    IllegalDecomposition(String),

    /// An exhaustive oracle was asked to run above its configured bound.
    #[error("{what} requested at n = {n}, above the exhaustive bound {max}")]
    OracleBoundExceeded {
        what: &'static str,
        n: u32,
        max: u32,
    },

    /// A value lies outside the interval required by a probability law.
    #[error("m = {m} is outside [{lo}, {hi}) required for n = {n}")]
    ValueOutOfRange {
        n: u32,
        m: String,
        lo: String,
        hi: String,
    },

    /// A parameter failed validation (base, block, probability, modulus, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A statistic was requested over an empty observation vector.
    #[error("chi-square statistic requires at least one observation")]
    EmptyObservations,

    /// An experiment sweep would exceed its configured size guard.
    #[error("sweep over [F_{lo}, F_{hi}) covers {count} integers, above the limit {max}")]
    SweepTooLarge {
        lo: u32,
        hi: u32,
        count: String,
        max: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
