use thiserror::Error;

/// Errors raised by graph construction, the exact searches and the counting engine.
///
/// Every search limit is a hard error: no routine ever returns a truncated answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("part size {side}={size} outside 1..={max}")]
    PartSize { side: char, size: usize, max: usize },

    #[error("vertex {side}{index} out of range (part has {size} vertices)")]
    IndexOutOfRange {
        side: char,
        index: usize,
        size: usize,
    },

    #[error("neighborhood mask {mask:#x} has bits outside the {m} X-vertices")]
    MaskOutOfRange { mask: u64, m: usize },

    #[error("malformed graph text at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("graph has an isolated vertex ({side}{index})")]
    IsolatedVertex { side: char, index: usize },

    #[error("{what} limit exceeded: {actual} > {limit}")]
    SearchLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid k-sequence {terms:?}: {reason}")]
    InvalidKSequence {
        terms: Vec<u32>,
        reason: &'static str,
    },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn check_limit(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::SearchLimit {
            what,
            actual,
            limit,
        })
    } else {
        Ok(())
    }
}
