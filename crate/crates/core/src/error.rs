use alloc::string::String;
use core::fmt;

use crate::subset::Subset;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    EmptyBases,
    UnequalCardinality { expected: usize, found: Subset },
    ExchangeAxiomViolated { b1: Subset, b2: Subset, x: usize },
    ElementOutOfRange { n: usize, subset: Subset },
    GroundSetTooLarge(usize),
    RankOutOfRange { r: usize, n: usize },
    RankZero,
    LoopyMatroid { loops: Subset },
    NotAChain,
    InvalidBisubset { s: Subset, t: Subset },
    NotABiflag,
    NotSimplicial { cone: usize },
    NotPure,
    ConeNotInFan,
    DimensionMismatch { expected: usize, found: usize },
    FanMismatch,
    DegreeMismatch { expected: usize, found: usize },
    NonzeroOnLineality,
    UnsupportedFan,
    UnbalancedInput { cone: usize },
    NotASubfan,
    IndexOutOfRange { index: usize, len: usize },
    NotLexDecreasing { index: usize },
    DyckViolation { index: usize },
    InvalidFirstComponent(String),
    SingularGram { degree: usize },
    DegreeTooLow { degree: usize, min: usize },
    AllSegreZero,
    MissingConvexClass,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyBases => write!(f, "matroid has no bases"),
            Error::UnequalCardinality { expected, found } => {
                write!(f, "basis {found} does not have cardinality {expected}")
            }
            Error::ExchangeAxiomViolated { b1, b2, x } => {
                write!(f, "basis exchange fails for {b1}, {b2} at element {x}")
            }
            Error::ElementOutOfRange { n, subset } => {
                write!(f, "subset {subset} is not contained in [{n}]")
            }
            Error::GroundSetTooLarge(n) => write!(f, "ground set of size {n} is too large"),
            Error::RankOutOfRange { r, n } => write!(f, "rank {r} out of range for ground set [{n}]"),
            Error::RankZero => write!(f, "matroid has rank zero"),
            Error::LoopyMatroid { loops } => write!(f, "matroid has loops {loops}"),
            Error::NotAChain => write!(f, "input is not a strictly increasing chain"),
            Error::InvalidBisubset { s, t } => write!(f, "{s}|{t} is not a proper bisubset"),
            Error::NotABiflag => write!(f, "chain has no gap index"),
            Error::NotSimplicial { cone } => write!(f, "cone {cone} is not simplicial"),
            Error::NotPure => write!(f, "fan is not pure"),
            Error::ConeNotInFan => write!(f, "cone is not in the fan"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::FanMismatch => write!(f, "operands live on different fans"),
            Error::DegreeMismatch { expected, found } => {
                write!(f, "degree mismatch: expected {expected}, found {found}")
            }
            Error::NonzeroOnLineality => write!(f, "functional does not vanish on the lineality space"),
            Error::UnsupportedFan => write!(f, "operation requires a fan with Poincare duality"),
            Error::UnbalancedInput { cone } => write!(f, "weight is unbalanced at cone {cone}"),
            Error::NotASubfan => write!(f, "not a subfan"),
            Error::IndexOutOfRange { index, len } => write!(f, "index {index} out of range 0..={len}"),
            Error::NotLexDecreasing { index } => {
                write!(f, "biflag is not lexicographically decreasing at {index}")
            }
            Error::DyckViolation { index } => write!(f, "rank profile inequality fails at {index}"),
            Error::InvalidFirstComponent(why) => write!(f, "invalid first component: {why}"),
            Error::SingularGram { degree } => write!(f, "pairing in degree {degree} is singular"),
            Error::DegreeTooLow { degree, min } => {
                write!(f, "degree {degree} is below the minimum {min}")
            }
            Error::AllSegreZero => write!(f, "every Segre class vanishes"),
            Error::MissingConvexClass => write!(f, "no strictly convex base class available"),
        }
    }
}

impl core::error::Error for Error {}
