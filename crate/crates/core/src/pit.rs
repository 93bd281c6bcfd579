//! Identity testing: decides whether a circuit computes the zero
//! polynomial.
//!
//! Three routes with different trust profiles:
//!
//! * [`commutative_pit`] -- deterministic and exact for a single product
//!   of linear terms with coefficients in a small commutative algebra.
//!   Proper zero divisors among the coefficients split the algebra into
//!   strictly smaller pieces; once every coefficient is a unit or
//!   nilpotent, terms carrying a unit coefficient are deleted (such a
//!   term is never a zero divisor in the polynomial ring), a surplus of
//!   all-nilpotent terms forces the product to zero outright, and a short
//!   remainder is multiplied out symbolically.
//! * [`brute_force_zero`] -- expands any supported source into an explicit
//!   polynomial under a monomial cap. Exact but potentially exponential.
//! * [`schwartz_zippel`] -- seeded random evaluation. A reported witness
//!   is a proof of nonzeroness; all-zero samples are only evidence.
//!
//! [`robustness_search`] is a separate exhaustive tool: it hunts for pairs
//! of linear constraints that collapse a polynomial to degree at most one.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraBasis, AlgebraElement, AlgebraTermCircuit, ElementClass};
use crate::circuit::{Abp, DepthThreeCircuit, Formula, FormulaNode, LinearMatrixSequence};
use crate::error::Error;
use crate::field::Field;
use crate::poly::{reduce_mod_two_linears, LinearFunction, Monomial, SparsePoly};
use crate::rng::SplitMix64;

// ---------------------------------------------------------------------------
// Configuration and reporting
// ---------------------------------------------------------------------------

/// Knobs for the deterministic test.
#[derive(Debug, Clone)]
pub struct PitConfig {
    /// Monomial cap for any symbolic expansion.
    pub expansion_cap: usize,
    /// Largest surviving factor count the symbolic product will take on.
    pub max_product_terms: usize,
}

impl Default for PitConfig {
    fn default() -> PitConfig {
        PitConfig {
            expansion_cap: crate::circuit::DEFAULT_EXPANSION_CAP,
            max_product_terms: 8,
        }
    }
}

/// Work counters, accumulated across split branches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PitStats {
    /// Number of algebra splits performed.
    pub splits: usize,
    /// Terms deleted because they carried an invertible coefficient.
    pub terms_deleted: usize,
    /// Monomials held by the final symbolic products.
    pub product_monomials: usize,
}

/// Outcome of the deterministic test.
#[derive(Debug, Clone)]
pub struct PitVerdict {
    pub is_zero: bool,
    pub stats: PitStats,
    /// Human-readable log of the decisions taken.
    pub trace: Vec<String>,
}

// ---------------------------------------------------------------------------
// Polynomials with algebra coefficients
// ---------------------------------------------------------------------------

/// A multivariate polynomial whose coefficients are algebra elements.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPoly {
    basis: AlgebraBasis,
    terms: BTreeMap<Monomial, AlgebraElement>,
}

impl AlgebraPoly {
    pub fn zero(basis: AlgebraBasis) -> AlgebraPoly {
        AlgebraPoly { basis, terms: BTreeMap::new() }
    }

    /// The constant polynomial 1 (the algebra's identity element).
    pub fn one(basis: AlgebraBasis) -> AlgebraPoly {
        let mut p = AlgebraPoly::zero(basis);
        let one = p.basis.one();
        p.add_term(Monomial::unit(), one);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_monomials(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> AlgebraElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.basis.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &AlgebraElement)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, a: AlgebraElement) {
        if a.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(a);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = self.basis.add(e.get(), &a);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Multiplies by the affine term `coeffs[0] + sum_v coeffs[v] * x_v`.
    /// Right-multiplication, which matters only for a non-commutative
    /// coefficient algebra.
    pub fn mul_affine(&self, coeffs: &[AlgebraElement], cap: usize) -> Result<AlgebraPoly, Error> {
        let mut out = AlgebraPoly::zero(self.basis.clone());
        for (m, a) in &self.terms {
            for (v, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let prod = self.basis.mul(a, c);
                let monomial =
                    if v == 0 { m.clone() } else { m.mul(&Monomial::var(v as u32)) };
                out.add_term(monomial, prod);
            }
            if out.terms.len() > cap {
                return Err(Error::ExpansionTooLarge { monomials: out.terms.len(), cap });
            }
        }
        Ok(out)
    }
}

/// Expands a term-product circuit into an explicit [`AlgebraPoly`]. The
/// cap bounds the monomial count after every factor.
pub fn expand_algebra_circuit(
    circuit: &AlgebraTermCircuit,
    cap: usize,
) -> Result<AlgebraPoly, Error> {
    let mut poly = AlgebraPoly::one(circuit.basis.clone());
    for term in &circuit.terms {
        poly = poly.mul_affine(term, cap)?;
    }
    Ok(poly)
}

// ---------------------------------------------------------------------------
// The deterministic test
// ---------------------------------------------------------------------------

/// Decides, deterministically and exactly, whether a product of linear
/// terms with coefficients in a commutative algebra is the zero
/// polynomial. Errors with [`Error::NotCommutative`] for non-commutative
/// coefficient algebras and [`Error::DimensionTooLarge`] when more
/// all-nilpotent terms survive than the configuration lets the symbolic
/// product handle.
pub fn commutative_pit(
    circuit: &AlgebraTermCircuit,
    config: &PitConfig,
) -> Result<PitVerdict, Error> {
    if !circuit.basis.is_commutative() {
        return Err(Error::NotCommutative);
    }
    run(circuit, config)
}

fn run(circuit: &AlgebraTermCircuit, config: &PitConfig) -> Result<PitVerdict, Error> {
    let ring = &circuit.basis;
    let k = ring.dim();

    // A proper zero divisor among the coefficients yields an idempotent,
    // and the algebra factors through it. The polynomial is zero exactly
    // when both projections are zero.
    for (j, term) in circuit.terms.iter().enumerate() {
        for (v, a) in term.iter().enumerate() {
            if ring.classify(a) != ElementClass::ZeroDivisorNonNilpotent {
                continue;
            }
            let idem = ring.find_idempotent(a)?;
            let split = ring.split(&idem)?;
            let (dl, dr) = (split.left.algebra.dim(), split.right.algebra.dim());
            assert!(dl < k && dr < k, "split components must shrink");
            let left = run(&circuit.project(ring, &split.left), config)?;
            let right = run(&circuit.project(ring, &split.right), config)?;
            let mut trace =
                vec![format!("split at term {j}, slot {v}: dimension {k} -> {dl} + {dr}")];
            trace.extend(left.trace.into_iter().map(|t| format!("left: {t}")));
            trace.extend(right.trace.into_iter().map(|t| format!("right: {t}")));
            return Ok(PitVerdict {
                is_zero: left.is_zero && right.is_zero,
                stats: PitStats {
                    splits: 1 + left.stats.splits + right.stats.splits,
                    terms_deleted: left.stats.terms_deleted + right.stats.terms_deleted,
                    product_monomials: left.stats.product_monomials
                        + right.stats.product_monomials,
                },
                trace,
            });
        }
    }

    // Every coefficient is now a unit or nilpotent. A term carrying a
    // unit coefficient is not a zero divisor in the polynomial ring, so
    // removing it cannot change zeroness.
    let mut trace = Vec::new();
    let surviving: Vec<&Vec<AlgebraElement>> = circuit
        .terms
        .iter()
        .filter(|term| {
            term.iter().all(|a| ring.classify(a) != ElementClass::Invertible)
        })
        .collect();
    let terms_deleted = circuit.terms.len() - surviving.len();
    if terms_deleted > 0 {
        trace.push(format!("deleted {terms_deleted} term(s) carrying a unit coefficient"));
    }

    // All-nilpotent terms take values in the nilradical, whose k-th power
    // vanishes; more than k of them force the product to zero without any
    // expansion.
    if surviving.len() > k {
        trace.push(format!(
            "count rule: {} all-nilpotent terms exceed the dimension {k}",
            surviving.len()
        ));
        return Ok(PitVerdict {
            is_zero: true,
            stats: PitStats { splits: 0, terms_deleted, product_monomials: 0 },
            trace,
        });
    }

    if surviving.len() > config.max_product_terms {
        return Err(Error::DimensionTooLarge {
            dim: surviving.len(),
            max: config.max_product_terms,
        });
    }

    let mut poly = AlgebraPoly::one(ring.clone());
    for term in &surviving {
        poly = poly.mul_affine(term, config.expansion_cap)?;
    }
    trace.push(format!(
        "symbolic product of {} term(s): {} monomial(s)",
        surviving.len(),
        poly.num_monomials()
    ));
    Ok(PitVerdict {
        is_zero: poly.is_zero(),
        stats: PitStats { splits: 0, terms_deleted, product_monomials: poly.num_monomials() },
        trace,
    })
}

// ---------------------------------------------------------------------------
// Sources: anything that evaluates to field elements
// ---------------------------------------------------------------------------

/// The circuit shapes the zero test accepts. A matrix sequence counts as
/// zero when every entry of its (masked) product grid is zero; an algebra
/// circuit when its product evaluates to the zero element.
#[derive(Debug, Clone)]
pub enum Source {
    Poly(SparsePoly),
    Sps(DepthThreeCircuit),
    Seq(LinearMatrixSequence),
    Abp(Abp),
    Formula(Formula),
    AlgebraCircuit(AlgebraTermCircuit),
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::Poly(_) => "poly",
            Source::Sps(_) => "sps",
            Source::Seq(_) => "seq",
            Source::Abp(_) => "abp",
            Source::Formula(_) => "formula",
            Source::AlgebraCircuit(_) => "algebra",
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Source::Poly(p) => p.field(),
            Source::Sps(c) => c.field,
            Source::Seq(s) => s.field,
            Source::Abp(a) => a.field,
            Source::Formula(f) => f.field,
            Source::AlgebraCircuit(c) => c.basis.field(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        match self {
            Source::Poly(p) => p.num_vars(),
            Source::Sps(c) => c.num_vars(),
            Source::Seq(s) => s.num_vars(),
            Source::Abp(a) => a.num_vars(),
            Source::Formula(f) => f.num_vars(),
            Source::AlgebraCircuit(c) => c.n,
        }
    }

    pub fn uses_z(&self) -> bool {
        match self {
            Source::Poly(p) => p.uses_z(),
            Source::Sps(c) => c.uses_z(),
            Source::Seq(s) => s.uses_z(),
            Source::Abp(a) => a.uses_z(),
            Source::Formula(f) => f.uses_z(),
            Source::AlgebraCircuit(_) => false,
        }
    }

    /// An upper bound on the total degree, cheap to compute.
    pub fn degree_bound(&self) -> u32 {
        match self {
            Source::Poly(p) => p.total_degree(),
            Source::Sps(c) => c.degree() as u32,
            Source::Seq(s) => s.len() as u32,
            Source::Abp(a) => a.gaps.len() as u32,
            Source::Formula(f) => {
                fn go(node: &FormulaNode) -> u32 {
                    match node {
                        FormulaNode::Leaf { var, .. } => u32::from(var.is_some()),
                        FormulaNode::Add(a, b) => go(a).max(go(b)),
                        FormulaNode::Mul(a, b) => go(a).saturating_add(go(b)),
                    }
                }
                go(&f.root)
            }
            Source::AlgebraCircuit(c) => c.terms.len() as u32,
        }
    }

    /// Whether the source evaluates to zero at one point.
    pub fn is_zero_at(&self, xs: &[u64], z: u64) -> Result<bool, Error> {
        Ok(match self {
            Source::Poly(p) => p.eval_at(xs, z)? == 0,
            Source::Sps(c) => c.eval_at(xs, z)? == 0,
            Source::Seq(s) => s.eval_at(xs, z)?.iter().all(|&e| e == 0),
            Source::Abp(a) => a.eval_at(xs, z)? == 0,
            Source::Formula(f) => f.eval_at(xs, z)? == 0,
            Source::AlgebraCircuit(c) => c.eval(xs)?.is_zero(),
        })
    }
}

/// Expands the source completely and reports exact zeroness. The cap
/// bounds intermediate monomial counts; overruns surface as
/// [`Error::ExpansionTooLarge`].
pub fn brute_force_zero(src: &Source, cap: usize) -> Result<bool, Error> {
    Ok(match src {
        Source::Poly(p) => p.is_zero(),
        Source::Sps(c) => c.expand(cap)?.is_zero(),
        Source::Seq(s) => s.expand(cap)?.iter().all(|p| p.is_zero()),
        Source::Abp(a) => a.expand(cap)?.is_zero(),
        Source::Formula(f) => f.expand(cap)?.is_zero(),
        Source::AlgebraCircuit(c) => expand_algebra_circuit(c, cap)?.is_zero(),
    })
}

// ---------------------------------------------------------------------------
// Random evaluation
// ---------------------------------------------------------------------------

/// Outcome of seeded random point sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SzResult {
    /// A point where the source is nonzero, if one was found: variable
    /// values `x_1..x_n` plus the value used for `z`.
    pub witness: Option<(Vec<u64>, u64)>,
    pub seed: u64,
    pub trials: u64,
    /// Set when the field is no larger than the degree bound, in which
    /// case a zero run carries little evidence.
    pub degree_warning: bool,
}

impl SzResult {
    pub fn zero_at_all_samples(&self) -> bool {
        self.witness.is_none()
    }
}

/// Evaluates the source at `trials` uniform points of the coefficient
/// field (coordinates drawn variable by variable, then `z` if the source
/// uses it). Stops at the first nonzero value.
pub fn schwartz_zippel(src: &Source, seed: u64, trials: u64) -> Result<SzResult, Error> {
    let p = src.field().modulus();
    let n = src.num_vars();
    let degree_warning = u128::from(p) <= u128::from(src.degree_bound());
    let mut rng = SplitMix64::new(seed);
    for _ in 0..trials {
        let xs: Vec<u64> = (0..n).map(|_| rng.next_below(p)).collect();
        let z = if src.uses_z() { rng.next_below(p) } else { 1 };
        if !src.is_zero_at(&xs, z)? {
            return Ok(SzResult { witness: Some((xs, z)), seed, trials, degree_warning });
        }
    }
    Ok(SzResult { witness: None, seed, trials, degree_warning })
}

// ---------------------------------------------------------------------------
// Exhaustive search for fragile zero reductions
// ---------------------------------------------------------------------------

/// Enumerates every normalized nonzero linear function over `x_1..x_n`
/// plus a constant: the first nonzero coefficient -- in the order
/// `x_1, .., x_n`, constant last -- is scaled to 1.
fn normalized_lines(field: Field, n: u32) -> Vec<LinearFunction> {
    let p = field.modulus();
    let slots = n as usize + 1;
    let total = p.checked_pow(slots as u32).expect("tiny fields only");
    let mut out = Vec::new();
    for code in 1..total {
        let mut digits = Vec::with_capacity(slots);
        let mut rest = code;
        for _ in 0..slots {
            digits.push(rest % p);
            rest /= p;
        }
        // digits[0..n] are x_1..x_n, digits[n] is the constant
        let lead = digits.iter().find(|&&c| c != 0).copied().unwrap();
        if lead != 1 {
            continue;
        }
        let pairs: Vec<(u32, u64)> = (0..n as usize)
            .filter(|&i| digits[i] != 0)
            .map(|i| (i as u32 + 1, digits[i]))
            .collect();
        out.push(LinearFunction::from_parts(field, digits[n as usize], &pairs));
    }
    out
}

/// Exhaustively searches for unordered pairs of linear constraints
/// `l1 = 0, l2 = 0` (equal pairs included) whose reduction collapses `f`
/// to total degree at most 1. Inconsistent constraint pairs are skipped.
/// Only the tiny fields `F_2`, `F_3`, `F_5` are accepted, and `budget`
/// bounds the number of pairs examined.
pub fn robustness_search(
    f: &SparsePoly,
    budget: u64,
) -> Result<Vec<(LinearFunction, LinearFunction)>, Error> {
    let field = f.field();
    let p = field.modulus();
    if !matches!(p, 2 | 3 | 5) {
        return Err(Error::UnsupportedField { p });
    }
    let lines = normalized_lines(field, f.num_vars());
    let mut pairs = 0u64;
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i..lines.len() {
            pairs += 1;
            if pairs > budget {
                return Err(Error::BudgetExceeded { pairs, budget });
            }
            let Ok(reduced) = reduce_mod_two_linears(f, &lines[i], &lines[j]) else {
                continue;
            };
            if reduced.total_degree() <= 1 {
                out.push((lines[i].clone(), lines[j].clone()));
            }
        }
    }
    Ok(out)
}
