use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("matrix has {got} entries, expected {rows}x{cols}")]
    MatrixShape { rows: usize, cols: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("ray {index} is not primitive: {ray:?}")]
    NonPrimitiveRay { index: usize, ray: Vec<i64> },
    #[error("rays {first} and {second} coincide")]
    DuplicateRay { first: usize, second: usize },
    #[error("fan is not complete: {0}")]
    IncompleteFan(String),
    #[error("invalid cone {index}: {reason}")]
    InvalidCone { index: usize, reason: String },
    #[error("polytope is unbounded along coordinate {coordinate}")]
    UnboundedPolytope { coordinate: usize },
    #[error("grading is not positive on generator {ray} (degree {degree})")]
    NonPositiveGrading { ray: usize, degree: BigInt },
    #[error("grading has length {got}, class group has rank {rank}")]
    GradingLength { got: usize, rank: usize },
    #[error("class has no effective representative")]
    NotEffective,

    #[error("insufficient samples for residue {residue}: need {needed}, have {have}")]
    InsufficientSamples { residue: usize, needed: usize, have: usize },
    #[error("samples inconsistent with a degree {degree} quasi-polynomial of period {period} at n = {n}")]
    InconsistentSamples { period: usize, degree: usize, n: i64 },
    #[error("no period up to {max_period} fits the samples")]
    NoPeriod { max_period: usize },
    #[error("held-out validation failed at {point:?}: expected {expected}, fitted {fitted}")]
    HeldOutMismatch { point: Vec<i64>, expected: String, fitted: String },

    #[error("invalid prime {0}")]
    InvalidPrime(u64),
    #[error("q = {q} is not a positive power of p = {p}")]
    NotPrimePower { q: u64, p: u64 },
    #[error("precision mismatch: {0}")]
    Precision(String),
    #[error("division by a p-adic number indistinguishable from zero")]
    DivisionByZero,
    #[error("division by a non-unit (valuation {valuation})")]
    NonUnitDivision { valuation: i64 },
    #[error("series has no nonzero coefficient")]
    ZeroSeries,
    #[error("quadratic bound requires c > 0")]
    NonPositiveBound,
    #[error("series carries no Newton polygon bound")]
    MissingBound,
    #[error("truncation {have} is below the certified cutoff {needed}")]
    InsufficientTruncation { have: usize, needed: usize },

    #[error("polynomial is not increasing: forward difference in x{var} is {value} at {point:?}")]
    NotIncreasing { var: usize, point: Vec<i64>, value: String },
    #[error("polynomial is not integer valued at {point:?}")]
    NotIntegerValued { point: Vec<i64> },
    #[error("polynomial takes the negative value {value} at the origin")]
    NegativeExponent { value: String },
    #[error("degree vector has length {got}, polynomial has {vars} variables")]
    DegreeCount { got: usize, vars: usize },
    #[error("threshold search for variable k{var} exceeded {cap} on {poly}")]
    ThresholdSearch { var: usize, cap: u64, poly: String },
    #[error("unsupported lattice sum shape: {0}")]
    UnsupportedShape(String),
    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("class-count numerator does not terminate by degree {dmax}")]
    NumeratorNotTerminated { dmax: usize },
    #[error("effective monoid is not simplicial: {0}")]
    NonSimplicialMonoid(String),
    #[error("dmax = {dmax} too small: {reason}")]
    DmaxInsufficient { dmax: usize, reason: String },
}

pub type Result<T> = core::result::Result<T, Error>;
