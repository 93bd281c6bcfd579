//! Exact polynomial identity testing over prime fields and small
//! finite-dimensional algebras.
//!
//! The crate provides:
//!
//! * sparse multivariate polynomial and linear-function arithmetic over
//!   `F_p` ([`poly`], [`field`]);
//! * circuit representations with dual expand/eval semantics: depth-3
//!   sum-of-products circuits, fan-in-2 formulas, products of matrices
//!   with linear entries, and width-2 branching programs ([`circuit`]);
//! * structure-constant algebras with classification of elements into
//!   invertible / nilpotent / proper zero divisor, idempotent discovery,
//!   and algebra splitting ([`algebra`]);
//! * the circuit transformations that connect the representations:
//!   depth-3 to depth-2 over 2x2 upper-triangular matrices, homogenized
//!   branching-program form, 3x3 transvection sequences for formulas, and
//!   the local-ring term circuit ([`transforms`]);
//! * identity-testing engines: a deterministic test for term products
//!   over commutative algebras, brute-force expansion, seeded random
//!   evaluation, and an exhaustive robustness search ([`pit`]);
//! * a text format for every representation ([`parse`]) and the seeded
//!   verification suites the command-line tool exposes ([`suite`]).

pub mod algebra;
pub mod circuit;
pub mod error;
pub mod field;
pub mod linalg;
pub mod parse;
pub mod pit;
pub mod poly;
pub mod rng;
pub mod suite;
pub mod transforms;

pub use circuit::{Abp, DepthThreeCircuit, Formula, LinearMatrix, LinearMatrixSequence};
pub use error::{Error, Inconsistent};
pub use field::{Field, DEFAULT_PRIME};
pub use poly::{LinearFunction, Monomial, SparsePoly};
