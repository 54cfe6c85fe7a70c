use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid range [{lo}, {hi})")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("window of {len} elements exceeds segment cap {cap}; split the range")]
    WindowTooLarge { len: u64, cap: usize },
    #[error("value {value} exceeds configured maximum {max}")]
    RangeCap { value: u64, max: u64 },
    #[error("no sieve channel requested")]
    NoChannels,
    #[error("d={d} and t={t} are not coprime")]
    NotCoprime { d: u64, t: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("alpha must be irrational: {0}")]
    NotIrrational(String),
    #[error("alpha must be positive: {0}")]
    NonPositive(String),
    #[error("precision exhausted after {bits} bits")]
    PrecisionExhausted { bits: u64 },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("z={z} outside [2, {max}]")]
    ZOutOfRange { z: f64, max: f64 },
    #[error("budget exceeded: {needed} terms requested, budget {budget}; shrink the blocks")]
    Budget { needed: u64, budget: u64 },
    #[error("invalid interval ({a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("point {0} outside [0, 1)")]
    ValueOutOfRange(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for errors that signal a cap or budget was hit rather than a bad input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::WindowTooLarge { .. }
                | Error::RangeCap { .. }
                | Error::Budget { .. }
                | Error::PrecisionExhausted { .. }
                | Error::Overflow(_)
        )
    }
}
