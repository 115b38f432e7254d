use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus is not irreducible over F_{0}")]
    NotIrreducible(u64),
    #[error("modulus is irreducible but its root is not primitive")]
    NotPrimitive,
    #[error("field of order {order} exceeds the table budget of {budget} elements")]
    TableBudgetExceeded { order: u64, budget: u64 },
    #[error("malformed modulus: {0}")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not in the subfield of order {0}")]
    NotInSubfield(u64),
    #[error("field has no subfield of order {0}")]
    NoSuchSubfield(u64),
    #[error("power equation with zero right-hand side")]
    ZeroRightHandSide,
    #[error("elements do not form a basis")]
    NotABasis,
    #[error("element is not in the span of the basis")]
    NotInSpan,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not have full row rank")]
    RankDeficient,
    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("{0} does not divide {1}")]
    NotDivisor(u64, u64),
    #[error("enumeration of {requested} items exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },
    #[error("entry is not in the base field (internal inconsistency)")]
    EntryNotInField,
    #[error("matrix does not have the circulant pattern (internal inconsistency)")]
    NotCirculant,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("transpose is only defined for square forms")]
    TransposeOnRectangular,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("invalid mu: {0}")]
    InvalidMu(String),
    #[error("evaluation points are not linearly independent")]
    NotIndependent,
    #[error("element is not primitive in its subfield")]
    ElementNotPrimitive,
    #[error("constraints are unsatisfiable: {0}")]
    ConstraintUnsatisfiable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown configuration key: {0}")]
    UnknownKey(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
