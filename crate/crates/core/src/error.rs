use thiserror::Error;

use crate::congruence::ResidueClass;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid residue class: offset {offset} is not in [0, {modulus})")]
    InvalidClass { offset: u64, modulus: u64 },

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("a covering system needs at least one class")]
    EmptySystem,

    #[error("duplicate residue class {0}")]
    DuplicateClass(ResidueClass),

    #[error("class {0} is not part of the system")]
    ClassNotFound(ResidueClass),

    #[error("split factor must be at least 2, got {0}")]
    SplitTooSmall(u64),

    #[error("{n} does not divide the gcd {gcd} of the system")]
    NotDivisor { n: u64, gcd: u64 },

    #[error("not a covering system: the classes do not partition the integers")]
    NotExact,

    #[error("tree root has up-degree {found}, expected {expected}")]
    RootDegree { found: usize, expected: usize },

    #[error("tree is not of the form G(a, b)")]
    NotGrouped,

    #[error("tree has a vertex with exactly one child")]
    UnaryVertex,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("series constant term must be zero")]
    NonZeroConstant,

    #[error("series linear coefficient must be +1 or -1")]
    NonUnitLinear,

    #[error("series constant term must be +1 or -1 to invert")]
    NonUnitConstant,

    #[error("argument {0} is outside the supported domain |x| <= 0.71")]
    OutOfDomain(String),

    #[error("could not certify a root bracket: {0}")]
    Certification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
