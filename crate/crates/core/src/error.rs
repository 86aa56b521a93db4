use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),

    /// Scheme sizes are not whole bits for this file size.
    #[error("file size f={f} does not give whole-bit segments ({detail}); least valid multiple is {base}")]
    Indivisible { f: u64, base: u64, detail: String },

    #[error("alpha {alpha} above first-branch breakpoint {breakpoint}")]
    AboveFirstBreakpoint { alpha: Rational, breakpoint: Rational },

    #[error("rate budget violated in phase {phase}: {detail}")]
    RateBudget { phase: usize, detail: String },

    #[error("user {user}: missing {what}")]
    MissingUnit { user: usize, what: String },

    #[error("invalid request vector: {0}")]
    InvalidRequests(String),
}

pub type Result<T> = std::result::Result<T, Error>;
