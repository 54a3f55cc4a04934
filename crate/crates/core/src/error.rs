use thiserror::Error;

/// Errors produced by field construction, ideal arithmetic and the
/// verification pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bounded search ran out of budget before reaching a decision.
    /// Carries the bound that was exhausted.
    #[error("inconclusive: {what} (search bound {bound} exhausted)")]
    Inconclusive { what: String, bound: u64 },

    /// An unconditional theorem failed to hold for a computed object.
    /// This always indicates an implementation bug, never a mathematical
    /// event; callers should abort and dump diagnostics.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn inconclusive(what: impl Into<String>, bound: u64) -> Self {
        Error::Inconclusive {
            what: what.into(),
            bound,
        }
    }

    pub fn theorem(msg: impl Into<String>) -> Self {
        Error::TheoremViolation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
