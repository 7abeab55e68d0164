use alloc::string::String;

/// Errors raised by the codec, channel and analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("constraint length {0} outside supported range 2..=16")]
    InvalidConstraintLength(u8),
    #[error("need at least 2 generators, got {0}")]
    TooFewGenerators(usize),
    #[error("at most {max} generators supported, got {got}")]
    TooManyGenerators { got: usize, max: usize },
    #[error("invalid octal generator {0:?}")]
    InvalidOctal(String),
    #[error("generator {octal} needs more than K={k} bits")]
    OctalOverflow { octal: String, k: u8 },
    #[error("effective constraint length is below K={0}: no generator taps the current or the oldest input")]
    DegenerateCode(u8),
    #[error("malformed code string {0:?}, expected K:1/n:g1,g2,...")]
    InvalidCodeString(String),
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("no registry code for K={0}, supported range is 3..=9")]
    UnsupportedK(u8),
    #[error("message is empty")]
    EmptyMessage,
    #[error("received length {len} is not a multiple of n={n}")]
    LengthNotMultipleOfN { len: usize, n: usize },
    #[error("terminated block of {len} symbols is shorter than the {tail}-symbol tail")]
    BlockTooShort { len: usize, tail: usize },
    #[error("window {window} is smaller than K={k}")]
    WindowTooSmall { window: usize, k: u8 },
    #[error("MAP decoding requires a terminated block")]
    UnterminatedBlock,
    #[error("non-finite LLR at position {0}")]
    NonFiniteLlr(usize),
    #[error("invalid puncture pattern: {0}")]
    InvalidPuncture(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid interleaver {rows}x{cols}: both dimensions must be at least 2")]
    InvalidInterleaver { rows: usize, cols: usize },
    #[error("length {len} is not a multiple of the interleaver block {block}")]
    LengthNotMultipleOfBlock { len: usize, block: usize },
    #[error("probability {0} out of range")]
    InvalidProbability(f64),
    #[error("code rate {0} must lie in (0, 1]")]
    InvalidRate(f64),
    #[error("code is catastrophic")]
    CatastrophicCode,
    #[error("exhaustive search over K={k}, n={n} is too large")]
    SearchSpaceTooLarge { k: u8, n: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
