use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed number `{0}`")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by an enclosure that contains zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("floor is not determined by the enclosure")]
    AmbiguousFloor,
    #[error("comparison is not decided by the enclosure")]
    Ambiguous,
    #[error("precision cap of {0} bits exhausted")]
    PrecisionExhausted(u32),
    #[error("value {0} is outside the admissible range")]
    OutOfRange(String),
    #[error("N must be at least 1")]
    InvalidN,
    #[error("digit {digit} is below N = {n}")]
    DigitBelowN { digit: String, n: u64 },
    #[error("empty digit sequence")]
    EmptyDigits,
    #[error("index {0} is out of range")]
    IndexOutOfRange(i64),
    #[error("the orbit reaches zero before index {0}")]
    OrbitBlocked(i64),
    #[error("the point does not carry the given digits")]
    DigitMismatch,
    #[error("fraction is not in lowest terms")]
    NotIrreducible,
    #[error("no representation of the required parity")]
    ParityUnreachable,
    #[error("density vanishes at x = {0}")]
    SingularDensity(f64),
    #[error("density does not integrate to one (integral {0})")]
    NotNormalized(f64),
    #[error("function is not monotone on the grid")]
    NotMonotone,
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
