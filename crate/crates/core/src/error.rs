use thiserror::Error;

/// Domain errors raised by the algebra kernels and the front-end.
///
/// The `Display` form of every variant starts with the variant name so the
/// CLI can emit it verbatim as a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ZeroDivisor: division by the zero polynomial")]
    ZeroDivisor,
    #[error("UndefinedGcd: gcd of two zero polynomials")]
    UndefinedGcd,
    #[error("InvalidOrder: {0}")]
    InvalidOrder(String),
    #[error("InvalidModulus: {0}")]
    InvalidModulus(String),
    #[error("NotInvertibleModulus: denominator shares a factor with the modulus")]
    NotInvertibleModulus,
    #[error("ConstantModulus: eval needs a non-constant modulus")]
    ConstantModulus,
    #[error("NotCoprime: {0}")]
    NotCoprime(String),
    #[error("ImproperFraction: numerator degree {numerator} >= denominator degree {denominator}")]
    ImproperFraction {
        numerator: usize,
        denominator: usize,
    },
    #[error("DegreeOverflow: degree {degree} not below {bound}")]
    DegreeOverflow { degree: usize, bound: usize },
    #[error("IndexOutOfRange: {0}")]
    IndexOutOfRange(String),
    #[error("NeedMoreSamples: need at least {needed} distinct sample points, got {got}")]
    NeedMoreSamples { needed: usize, got: usize },
    #[error("NonCoprimeTuple: gcd of the parts is {0}")]
    NonCoprimeTuple(u64),
    #[error("InvalidTuple: {0}")]
    InvalidTuple(String),
    #[error("InvalidForm: {0}")]
    InvalidForm(String),
    #[error("DecompositionCorrupt: {0}")]
    DecompositionCorrupt(String),
    #[error("OddArityRequired: got {0} moduli")]
    OddArityRequired(usize),
    #[error("InsufficientM: lambda = {0} must be positive")]
    InsufficientM(i64),
    #[error("InvalidRange: {0}")]
    InvalidRange(String),
    #[error("DegreeLimitExceeded: degree {degree} exceeds QPF_MAX_DEGREE = {limit}")]
    DegreeLimitExceeded { degree: usize, limit: usize },
    #[error("VerificationFailed: {0}")]
    VerificationFailed(String),
    #[error("Io: {0}")]
    Io(String),
    #[error("ParseError: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
