use std::fmt;

/// Crate-wide error type.
///
/// Variants carry enough context to print a useful diagnostic without
/// chasing the call site: witnesses for algebra-table failures, sizes for
/// cap violations, positions for parse failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The requested modulus is not prime.
    NotPrime(u64),
    /// Multiplicative inverse of zero requested.
    ZeroInverse,
    /// An evaluation point is shorter than the highest variable index used.
    ArityMismatch { needed: usize, got: usize },
    /// A symbolic expansion exceeded the configured monomial cap.
    ExpansionTooLarge { monomials: usize, cap: usize },
    /// A sequence matrix that must be upper triangular is not.
    NotUpperTriangular { index: usize },
    /// A matrix does not fit any layer shape the transformation supports.
    UnsupportedShape { index: usize },
    /// Text input could not be parsed.
    Parse { line: usize, col: usize, msg: String },
    /// A multiplication table fails associativity at the given basis triple.
    NotAssociative { i: usize, j: usize, m: usize },
    /// The claimed identity element does not fix the given basis element.
    BadIdentity { i: usize },
    /// A coordinate vector has the wrong length for its algebra.
    DimensionMismatch { expected: usize, got: usize },
    /// An idempotent was requested from an element that is not a
    /// zero divisor (it is invertible or nilpotent instead).
    NotAZeroDivisor,
    /// The idempotent search exhausted all powers without a certified hit;
    /// indicates an inconsistent multiplication table rather than bad input.
    NoIdempotentFound { detail: String },
    /// Splitting was attempted at an element with v*v != v.
    NotIdempotent,
    /// Splitting was attempted at 0 or 1, which yields no decomposition.
    TrivialIdempotent,
    /// An operation that needs a commutative algebra got a non-commutative one.
    NotCommutative,
    /// The deterministic identity test refuses products beyond this many terms.
    DimensionTooLarge { dim: usize, max: usize },
    /// The pair search would exceed the configured pair budget.
    BudgetExceeded { pairs: u64, budget: u64 },
    /// The operation only supports a restricted set of moduli.
    UnsupportedField { p: u64 },
    /// Input document does not contain what the operation needs.
    WrongInput { msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
            Error::ArityMismatch { needed, got } => {
                write!(f, "evaluation point has {got} coordinates, need {needed}")
            }
            Error::ExpansionTooLarge { monomials, cap } => {
                write!(f, "expansion reached {monomials} monomials, cap is {cap}")
            }
            Error::NotUpperTriangular { index } => {
                write!(f, "matrix {index} is not upper triangular")
            }
            Error::UnsupportedShape { index } => {
                write!(f, "matrix {index} fits no supported layer shape")
            }
            Error::Parse { line, col, msg } => write!(f, "parse error at {line}:{col}: {msg}"),
            Error::NotAssociative { i, j, m } => {
                write!(f, "multiplication table not associative at (e{i}*e{j})*e{m}")
            }
            Error::BadIdentity { i } => {
                write!(f, "claimed identity does not fix basis element e{i}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "coordinate vector has length {got}, algebra dimension is {expected}")
            }
            Error::NotAZeroDivisor => {
                write!(f, "element is invertible or nilpotent, not a proper zero divisor")
            }
            Error::NoIdempotentFound { detail } => {
                write!(f, "no nontrivial idempotent found: {detail}")
            }
            Error::NotIdempotent => write!(f, "element is not idempotent"),
            Error::TrivialIdempotent => write!(f, "idempotent is 0 or 1 and does not split"),
            Error::NotCommutative => write!(f, "algebra is not commutative"),
            Error::DimensionTooLarge { dim, max } => {
                write!(f, "deterministic test supports at most {max} product terms, got {dim}")
            }
            Error::BudgetExceeded { pairs, budget } => {
                write!(f, "search needs {pairs} pair reductions, budget is {budget}")
            }
            Error::UnsupportedField { p } => write!(f, "modulus {p} not supported here"),
            Error::WrongInput { msg } => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Outcome marker for reductions modulo an inconsistent linear system:
/// the constant 1 lies in the ideal, so every polynomial reduces to
/// every other and no canonical representative exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent;

impl fmt::Display for Inconsistent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "the two linear constraints are inconsistent (1 lies in the ideal)")
    }
}
