use alloc::string::String;
use core::fmt;

/// Closed-form hypotheses that can fail before a closed form is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    /// `x1...xm` lies in `M2 M1^(l-1)`.
    FullMonomialReachable,
    /// `M1^(l-1) == M1^(l-2)`: the product chain stalled.
    ProductChainStalled,
    /// `x1...xm` lies in `M2` or in `M1^l \ M1`.
    FullMonomialInProducts,
    /// `M1^l == M1^(l-1)`.
    PowerChainStalled,
    /// A set of monomials is not closed under divisibility.
    NotDecreasing,
    /// `|M2 M1^(l-1)| == 2^m` at the minimal level.
    ProductSetIsEverything,
    /// The full monomial is never reached by `M2 M1^s`.
    FullMonomialUnreachable,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Hypothesis::FullMonomialReachable => "x1...xm lies in M2*M1^(l-1)",
            Hypothesis::ProductChainStalled => "M1^(l-1) equals M1^(l-2)",
            Hypothesis::FullMonomialInProducts => "x1...xm lies in M2 or in M1^l \\ M1",
            Hypothesis::PowerChainStalled => "M1^l equals M1^(l-1)",
            Hypothesis::NotDecreasing => "monomial set is not closed under divisibility",
            Hypothesis::ProductSetIsEverything => "M2*M1^(l-1) contains every monomial",
            Hypothesis::FullMonomialUnreachable => "x1...xm is never reached by M2*M1^s",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Vectors or codes of different lengths were combined.
    LengthMismatch { expected: usize, found: usize },
    /// Modules or vectors at different levels were combined.
    LevelMismatch { expected: u32, found: u32 },
    /// The level `l` of `N = 2^l` is outside `1..=30`.
    LevelOutOfRange(u32),
    /// `C2` is not contained in `C1`.
    NotNested,
    /// A supplied basis is linearly dependent.
    DependentBasis,
    /// A change-of-basis matrix is singular over GF(2).
    Singular,
    /// A closed form was requested but its hypotheses fail.
    Hypothesis(Hypothesis),
    /// An exhaustive computation would exceed its size envelope.
    TooLarge { what: &'static str, limit: u64 },
    /// Two routes to the same object disagree. Always a bug.
    Inconsistent(&'static str),
    /// Malformed text input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::LevelMismatch { expected, found } => {
                write!(f, "level mismatch: expected {expected}, found {found}")
            }
            Error::LevelOutOfRange(l) => write!(f, "level {l} outside 1..=30"),
            Error::NotNested => f.write_str("C2 is not a subcode of C1"),
            Error::DependentBasis => f.write_str("basis vectors are linearly dependent"),
            Error::Singular => f.write_str("matrix is singular over GF(2)"),
            Error::Hypothesis(h) => write!(f, "closed form not applicable: {h}"),
            Error::TooLarge { what, limit } => write!(f, "{what} exceeds limit {limit}"),
            Error::Inconsistent(what) => write!(f, "internal consistency failure: {what}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
