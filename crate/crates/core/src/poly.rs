//! Sparse multivariate polynomials and affine linear functions over `F_p`.
//!
//! Variables are `x1, x2, ...` (1-based). Index 0 is reserved for the
//! homogenizing variable `z`, which only appears after a homogenization
//! step; everywhere else the constant term is stored separately.
//!
//! Evaluation convention: a point is a slice `xs` with `xs[i-1]` the value
//! of `x_i`. The homogenizing variable gets its own argument in
//! [`SparsePoly::eval_at`]; the plain [`SparsePoly::eval`] fixes `z = 1`,
//! which recovers the original polynomial from a homogenized one.

use std::collections::BTreeMap;

use crate::error::{Error, Inconsistent};
use crate::field::Field;

/// Variable index of the homogenizing variable `z`.
pub const Z_VAR: u32 = 0;

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

/// A power product, stored as `(variable, exponent)` pairs sorted by
/// variable index with all exponents positive. The unit monomial is the
/// empty list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    /// Builds from arbitrary pairs: merges duplicates, drops zero exponents.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Monomial {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for &(v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_of(&self, v: u32) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = self.0[i];
            let (vb, eb) = other.0[j];
            match va.cmp(&vb) {
                std::cmp::Ordering::Less => {
                    out.push((va, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((vb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Graded lexicographic comparison with precedence `x1 > x2 > ... > z`:
    /// higher total degree wins; ties go to the monomial with the larger
    /// exponent at the earliest variable in precedence order. The
    /// homogenizing variable ranks after every ordinary variable.
    pub fn graded_lex_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Precedence rank: x_i -> i for i >= 1, z -> +infinity.
        let rank = |v: u32| if v == Z_VAR { u64::from(u32::MAX) + 1 } else { u64::from(v) };
        let key = |m: &Monomial| {
            let mut ps: Vec<(u64, u32)> =
                m.0.iter().map(|&(v, e)| (rank(v), e)).collect();
            ps.sort_unstable();
            ps
        };
        let (a, b) = (key(self), key(other));
        let mut i = 0;
        loop {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                // Exhausted: the other still has exponents at later
                // (lower-precedence) variables; with degrees equal, the
                // side holding exponent at an EARLIER variable is larger.
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(ra, ea)), Some(&(rb, eb))) => {
                    if ra != rb {
                        // Smaller rank = earlier variable = larger monomial.
                        return rb.cmp(&ra);
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// SparsePoly
// ---------------------------------------------------------------------------

/// A polynomial stored as a map from monomials to nonzero coefficients.
/// The zero polynomial is the empty map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    field: Field,
    terms: BTreeMap<Monomial, u64>,
}

impl SparsePoly {
    pub fn zero(field: Field) -> SparsePoly {
        SparsePoly { field, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, c: u64) -> SparsePoly {
        let mut p = SparsePoly::zero(field);
        p.add_term(Monomial::unit(), field.reduce(c));
        p
    }

    pub fn variable(field: Field, v: u32) -> SparsePoly {
        let mut p = SparsePoly::zero(field);
        p.add_term(Monomial::var(v), 1);
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Adds `c * m` in place, keeping the no-zero-coefficients invariant.
    pub fn add_term(&mut self, m: Monomial, c: u64) {
        debug_assert!(c < self.field.modulus());
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        assert_eq!(self.field, other.field, "mixed fields");
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        let mut out = SparsePoly::zero(self.field);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn scale(&self, c: u64) -> SparsePoly {
        let c = self.field.reduce(c);
        let mut out = SparsePoly::zero(self.field);
        for (m, a) in self.terms() {
            out.add_term(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        assert_eq!(self.field, other.field, "mixed fields");
        let mut out = SparsePoly::zero(self.field);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.field, 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Largest ordinary variable index used (0 when constant or in `z` only).
    pub fn num_vars(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter())
            .map(|&(v, _)| v)
            .max()
            .unwrap_or(0)
    }

    pub fn uses_z(&self) -> bool {
        self.terms.keys().any(|m| m.degree_of(Z_VAR) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Evaluates at `xs` (with `xs[i-1]` the value of `x_i`) and an explicit
    /// value for the homogenizing variable. Direct monomial summation.
    pub fn eval_at(&self, xs: &[u64], z: u64) -> Result<u64, Error> {
        let needed = self.num_vars() as usize;
        if xs.len() < needed {
            return Err(Error::ArityMismatch { needed, got: xs.len() });
        }
        let f = self.field;
        let z = f.reduce(z);
        let mut total = 0u64;
        for (m, c) in self.terms() {
            let mut v = c;
            for &(var, e) in m.pairs() {
                let base = if var == Z_VAR { z } else { f.reduce(xs[(var - 1) as usize]) };
                v = f.mul(v, f.pow(base, e as u64));
            }
            total = f.add(total, v);
        }
        Ok(total)
    }

    /// Evaluates with `z = 1`, the common case for unhomogenized input.
    pub fn eval(&self, xs: &[u64]) -> Result<u64, Error> {
        self.eval_at(xs, 1)
    }

    /// The degree-`d` homogeneous component.
    pub fn homogeneous_part(&self, d: u32) -> SparsePoly {
        let mut out = SparsePoly::zero(self.field);
        for (m, c) in self.terms() {
            if m.total_degree() == d {
                out.add_term(m.clone(), c);
            }
        }
        out
    }

    /// Substitutes polynomials for variables; variables absent from the map
    /// stay themselves.
    pub fn substitute(&self, map: &BTreeMap<u32, SparsePoly>) -> SparsePoly {
        let f = self.field;
        let mut out = SparsePoly::zero(f);
        for (m, c) in self.terms() {
            let mut term = SparsePoly::constant(f, c);
            for &(v, e) in m.pairs() {
                let base = match map.get(&v) {
                    Some(p) => p.clone(),
                    None => SparsePoly::variable(f, v),
                };
                term = term.mul(&base.pow(e));
            }
            out = out.add(&term);
        }
        out
    }

    /// Monomials with coefficients, largest first in graded lex order.
    /// This is the order the text serializer emits.
    pub fn terms_graded_lex(&self) -> Vec<(&Monomial, u64)> {
        let mut ts: Vec<(&Monomial, u64)> = self.terms().collect();
        ts.sort_by(|a, b| b.0.graded_lex_cmp(a.0));
        ts
    }
}

// ---------------------------------------------------------------------------
// LinearFunction
// ---------------------------------------------------------------------------

/// An affine linear function `a0 + a1*x1 + ... + an*xn`.
///
/// The constant is stored separately; the coefficient map never holds
/// zeros. After homogenization the map may contain the reserved index 0
/// (the `z` variable) and the constant is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFunction {
    field: Field,
    constant: u64,
    coeffs: BTreeMap<u32, u64>,
}

impl LinearFunction {
    pub fn zero(field: Field) -> LinearFunction {
        LinearFunction { field, constant: 0, coeffs: BTreeMap::new() }
    }

    pub fn constant(field: Field, c: u64) -> LinearFunction {
        LinearFunction { field, constant: field.reduce(c), coeffs: BTreeMap::new() }
    }

    /// The single term `c * x_v` (or `c * z` for index 0).
    pub fn term(field: Field, c: u64, v: u32) -> LinearFunction {
        let mut l = LinearFunction::zero(field);
        l.set_coeff(v, field.reduce(c));
        l
    }

    /// Builds `a0 + sum c_v x_v` from a constant and coefficient pairs.
    pub fn from_parts(field: Field, constant: u64, pairs: &[(u32, u64)]) -> LinearFunction {
        let mut l = LinearFunction::constant(field, constant);
        for &(v, c) in pairs {
            let cur = l.coeff(v);
            l.set_coeff(v, field.add(cur, field.reduce(c)));
        }
        l
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn constant_term(&self) -> u64 {
        self.constant
    }

    pub fn coeff(&self, v: u32) -> u64 {
        self.coeffs.get(&v).copied().unwrap_or(0)
    }

    pub fn set_constant(&mut self, c: u64) {
        self.constant = self.field.reduce(c);
    }

    pub fn set_coeff(&mut self, v: u32, c: u64) {
        let c = self.field.reduce(c);
        if c == 0 {
            self.coeffs.remove(&v);
        } else {
            self.coeffs.insert(v, c);
        }
    }

    /// Coefficient pairs in ascending variable order.
    pub fn coeff_pairs(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.coeffs.iter().map(|(&v, &c)| (v, c))
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.coeffs.is_empty()
    }

    /// `Some(c)` when the function is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<u64> {
        if self.coeffs.is_empty() {
            Some(self.constant)
        } else {
            None
        }
    }

    /// When the function is a single term, returns `(coefficient, variable)`
    /// with `None` standing for the constant slot. Zero is not a single term.
    pub fn single_term(&self) -> Option<(u64, Option<u32>)> {
        match (self.constant, self.coeffs.len()) {
            (c, 0) if c != 0 => Some((c, None)),
            (0, 1) => {
                let (&v, &c) = self.coeffs.iter().next().unwrap();
                Some((c, Some(v)))
            }
            _ => None,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.coeffs.keys().copied().max().unwrap_or(0)
    }

    pub fn uses_z(&self) -> bool {
        self.coeffs.contains_key(&Z_VAR)
    }

    pub fn neg(&self) -> LinearFunction {
        self.scale(self.field.neg(1 % self.field.modulus()))
    }

    pub fn scale(&self, c: u64) -> LinearFunction {
        let f = self.field;
        let c = f.reduce(c);
        let mut out = LinearFunction::constant(f, f.mul(self.constant, c));
        for (v, a) in self.coeff_pairs() {
            out.set_coeff(v, f.mul(a, c));
        }
        out
    }

    pub fn eval_at(&self, xs: &[u64], z: u64) -> Result<u64, Error> {
        let needed = self.num_vars() as usize;
        if xs.len() < needed {
            return Err(Error::ArityMismatch { needed, got: xs.len() });
        }
        let f = self.field;
        let mut total = self.constant;
        for (v, c) in self.coeff_pairs() {
            let val = if v == Z_VAR { f.reduce(z) } else { f.reduce(xs[(v - 1) as usize]) };
            total = f.add(total, f.mul(c, val));
        }
        Ok(total)
    }

    pub fn eval(&self, xs: &[u64]) -> Result<u64, Error> {
        self.eval_at(xs, 1)
    }

    pub fn to_poly(&self) -> SparsePoly {
        let mut p = SparsePoly::zero(self.field);
        p.add_term(Monomial::unit(), self.constant);
        for (v, c) in self.coeff_pairs() {
            p.add_term(Monomial::var(v), c);
        }
        p
    }

    /// Replaces the constant `a0` by `a0 * z`, making the function
    /// homogeneous of degree one in the variables including `z`.
    pub fn homogenize(&self) -> LinearFunction {
        let mut out = self.clone();
        if out.constant != 0 {
            let c = out.constant;
            let prev = out.coeff(Z_VAR);
            out.set_coeff(Z_VAR, out.field.add(prev, c));
            out.constant = 0;
        }
        out
    }

    /// True when the constant term is zero (every term carries a variable).
    pub fn is_homogeneous(&self) -> bool {
        self.constant == 0
    }
}

// ---------------------------------------------------------------------------
// Reduction modulo two linear constraints
// ---------------------------------------------------------------------------

/// Reduces `f` modulo the ideal `(l1, l2)` by solving the linear system
/// `l1 = l2 = 0` and substituting the solved variables into `f`.
///
/// Pivots are chosen deterministically: `l1` first, each row pivoting on
/// its lowest-index variable with a nonzero coefficient, then back
/// substitution so each pivot is expressed in free variables only. This
/// makes the result a canonical representative for the pivot choice.
///
/// Returns `Err(Inconsistent)` when the constraints force `1 = 0`, i.e.
/// the constant 1 lies in the ideal.
pub fn reduce_mod_two_linears(
    f: &SparsePoly,
    l1: &LinearFunction,
    l2: &LinearFunction,
) -> Result<SparsePoly, Inconsistent> {
    assert_eq!(f.field(), l1.field(), "mixed fields");
    assert_eq!(f.field(), l2.field(), "mixed fields");
    let fld = f.field();

    // A row is (coeffs, constant) meaning sum(coeffs) + constant = 0.
    let mut rows: Vec<(BTreeMap<u32, u64>, u64)> = [l1, l2]
        .iter()
        .map(|l| (l.coeff_pairs().collect(), l.constant_term()))
        .collect();

    let mut pivots: Vec<(usize, u32)> = Vec::new(); // (row, pivot var)
    for r in 0..rows.len() {
        // Eliminate earlier pivots from this row.
        for &(pr, pv) in &pivots {
            let factor = rows[r].0.get(&pv).copied().unwrap_or(0);
            if factor == 0 {
                continue;
            }
            let (prow_coeffs, prow_const) = rows[pr].clone();
            let row = &mut rows[r];
            for (v, c) in prow_coeffs {
                let cur = row.0.get(&v).copied().unwrap_or(0);
                let nv = fld.sub(cur, fld.mul(factor, c));
                if nv == 0 {
                    row.0.remove(&v);
                } else {
                    row.0.insert(v, nv);
                }
            }
            row.1 = fld.sub(row.1, fld.mul(factor, prow_const));
        }
        // Pick the lowest-index variable with a nonzero coefficient.
        let pivot_var = rows[r].0.keys().next().copied();
        match pivot_var {
            None => {
                if rows[r].1 != 0 {
                    return Err(Inconsistent);
                }
                // 0 = 0: row imposes nothing.
            }
            Some(pv) => {
                let inv = fld.inv(rows[r].0[&pv]).expect("pivot coefficient is nonzero");
                let row = &mut rows[r];
                let keys: Vec<u32> = row.0.keys().copied().collect();
                for v in keys {
                    let c = fld.mul(row.0[&v], inv);
                    row.0.insert(v, c);
                }
                row.1 = fld.mul(row.1, inv);
                pivots.push((r, pv));
            }
        }
    }

    // Back substitution: remove later pivots from earlier rows.
    for idx in (0..pivots.len()).rev() {
        let (pr, pv) = pivots[idx];
        for &(er, _) in pivots.iter().take(idx) {
            let factor = rows[er].0.get(&pv).copied().unwrap_or(0);
            if factor == 0 {
                continue;
            }
            let (prow_coeffs, prow_const) = rows[pr].clone();
            let row = &mut rows[er];
            for (v, c) in prow_coeffs {
                let cur = row.0.get(&v).copied().unwrap_or(0);
                let nv = fld.sub(cur, fld.mul(factor, c));
                if nv == 0 {
                    row.0.remove(&v);
                } else {
                    row.0.insert(v, nv);
                }
            }
            row.1 = fld.sub(row.1, fld.mul(factor, prow_const));
        }
    }

    // pivot = -(constant + sum of free-variable terms)
    let mut substitution: BTreeMap<u32, SparsePoly> = BTreeMap::new();
    for &(r, pv) in &pivots {
        let mut expr = SparsePoly::constant(fld, fld.neg(rows[r].1));
        for (&v, &c) in &rows[r].0 {
            if v == pv {
                continue;
            }
            let mut t = SparsePoly::zero(fld);
            t.add_term(Monomial::var(v), fld.neg(c));
            expr = expr.add(&t);
        }
        substitution.insert(pv, expr);
    }

    Ok(f.substitute(&substitution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f101() -> Field {
        Field::new(101).unwrap()
    }

    fn f5() -> Field {
        Field::new(5).unwrap()
    }

    #[test]
    fn monomial_canonical_form() {
        let m = Monomial::from_pairs(&[(3, 1), (1, 2), (3, 1), (2, 0)]);
        assert_eq!(m.pairs(), &[(1, 2), (3, 2)]);
        assert_eq!(m.total_degree(), 4);
        assert_eq!(m.degree_of(3), 2);
        assert_eq!(m.degree_of(2), 0);
        assert!(Monomial::unit().is_unit());
    }

    #[test]
    fn graded_lex_order() {
        use std::cmp::Ordering::*;
        let x1 = Monomial::var(1);
        let x2 = Monomial::var(2);
        let x1x1 = x1.mul(&x1);
        let z = Monomial::var(Z_VAR);
        // degree first
        assert_eq!(x1x1.graded_lex_cmp(&x2), Greater);
        // x1 > x2 at equal degree
        assert_eq!(x1.graded_lex_cmp(&x2), Greater);
        // z ranks below every ordinary variable
        assert_eq!(x2.graded_lex_cmp(&z), Greater);
        assert_eq!(x1.graded_lex_cmp(&x1), Equal);
        // x1*x2 vs x2^2: first difference at x1
        let x1x2 = x1.mul(&x2);
        let x2x2 = x2.mul(&x2);
        assert_eq!(x1x2.graded_lex_cmp(&x2x2), Greater);
    }

    #[test]
    fn product_of_conjugates() {
        // (x1 + 1)(x1 - 1) = x1^2 - 1 = x1^2 + 4 over F_5
        let f = f5();
        let a = LinearFunction::from_parts(f, 1, &[(1, 1)]).to_poly();
        let b = LinearFunction::from_parts(f, f.from_i64(-1), &[(1, 1)]).to_poly();
        let prod = a.mul(&b);
        let mut expect = SparsePoly::zero(f);
        expect.add_term(Monomial::from_pairs(&[(1, 2)]), 1);
        expect.add_term(Monomial::unit(), 4);
        assert_eq!(prod, expect);
    }

    #[test]
    fn cancellation_yields_zero() {
        let f = f101();
        let p = SparsePoly::variable(f, 1);
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.add(&p.neg()), SparsePoly::zero(f));
    }

    #[test]
    fn eval_examples() {
        let f = f101();
        // x1 at (7)
        assert_eq!(SparsePoly::variable(f, 1).eval(&[7]).unwrap(), 7);
        // arity error
        let p = SparsePoly::variable(f, 3);
        assert_eq!(p.eval(&[1, 2]), Err(Error::ArityMismatch { needed: 3, got: 2 }));
        // z defaults to 1, explicit value overrides
        let hz = LinearFunction::from_parts(f, 5, &[(1, 2)]).homogenize();
        assert_eq!(hz.eval(&[3]).unwrap(), 11); // 5*1 + 2*3
        assert_eq!(hz.eval_at(&[3], 0).unwrap(), 6); // 5*0 + 2*3
    }

    #[test]
    fn homogeneous_parts_partition() {
        let f = f101();
        let x1 = SparsePoly::variable(f, 1);
        let p = x1.mul(&x1).add(&x1).add(&SparsePoly::constant(f, 9));
        assert_eq!(p.homogeneous_part(0), SparsePoly::constant(f, 9));
        assert_eq!(p.homogeneous_part(1), x1);
        assert_eq!(p.homogeneous_part(2), x1.mul(&x1));
        assert!(p.homogeneous_part(3).is_zero());
    }

    #[test]
    fn linear_function_invariants() {
        let f = f101();
        let mut l = LinearFunction::from_parts(f, 3, &[(1, 2), (3, 100)]);
        assert_eq!(l.coeff(2), 0);
        l.set_coeff(3, f.add(l.coeff(3), 1)); // 100 + 1 = 0: entry must vanish
        assert_eq!(l.coeff_pairs().count(), 1);
        assert_eq!(l.single_term(), None);
        let t = LinearFunction::term(f, 7, 2);
        assert_eq!(t.single_term(), Some((7, Some(2))));
        let c = LinearFunction::constant(f, 9);
        assert_eq!(c.single_term(), Some((9, None)));
        assert!(LinearFunction::zero(f).single_term().is_none());
    }

    #[test]
    fn homogenize_moves_constant_to_z() {
        let f = f101();
        let l = LinearFunction::from_parts(f, 7, &[(2, 3)]);
        let h = l.homogenize();
        assert!(h.is_homogeneous());
        assert_eq!(h.coeff(Z_VAR), 7);
        assert_eq!(h.coeff(2), 3);
        assert!(h.uses_z());
        // z = 1 recovers the original value
        assert_eq!(h.eval(&[0, 4]).unwrap(), l.eval(&[0, 4]).unwrap());
    }

    #[test]
    fn reduce_simple_substitution() {
        // f = x1*x2, l1 = x1 - 1, l2 = x2 - 2  =>  f mod (l1,l2) = 2
        let f = f101();
        let p = SparsePoly::variable(f, 1).mul(&SparsePoly::variable(f, 2));
        let l1 = LinearFunction::from_parts(f, f.from_i64(-1), &[(1, 1)]);
        let l2 = LinearFunction::from_parts(f, f.from_i64(-2), &[(2, 1)]);
        let r = reduce_mod_two_linears(&p, &l1, &l2).unwrap();
        assert_eq!(r, SparsePoly::constant(f, 2));
    }

    #[test]
    fn reduce_detects_inconsistency() {
        // l1 = x1, l2 = x1 + 1: the ideal contains 1.
        let f = f101();
        let p = SparsePoly::variable(f, 1);
        let l1 = LinearFunction::term(f, 1, 1);
        let l2 = LinearFunction::from_parts(f, 1, &[(1, 1)]);
        assert_eq!(reduce_mod_two_linears(&p, &l1, &l2), Err(Inconsistent));
        // A nonzero constant alone is already inconsistent.
        let c = LinearFunction::constant(f, 5);
        assert_eq!(reduce_mod_two_linears(&p, &c, &l1), Err(Inconsistent));
    }

    #[test]
    fn reduce_with_dependent_rows() {
        // l2 a multiple of l1 contributes nothing extra.
        let f = f101();
        let p = SparsePoly::variable(f, 1).mul(&SparsePoly::variable(f, 2));
        let l1 = LinearFunction::from_parts(f, 0, &[(1, 1), (2, 100)]); // x1 - x2
        let l2 = l1.scale(3);
        let r = reduce_mod_two_linears(&p, &l1, &l2).unwrap();
        // x1 = x2, so f reduces to x2^2
        let x2 = SparsePoly::variable(f, 2);
        assert_eq!(r, x2.mul(&x2));
    }

    #[test]
    fn reduce_chained_pivots() {
        // l1 = x1 - x2, l2 = x2 - 3: x1 and x2 both pinned after back
        // substitution; f = x1*x2 reduces to the constant 9.
        let f = f101();
        let p = SparsePoly::variable(f, 1).mul(&SparsePoly::variable(f, 2));
        let l1 = LinearFunction::from_parts(f, 0, &[(1, 1), (2, f.from_i64(-1))]);
        let l2 = LinearFunction::from_parts(f, f.from_i64(-3), &[(2, 1)]);
        let r = reduce_mod_two_linears(&p, &l1, &l2).unwrap();
        assert_eq!(r, SparsePoly::constant(f, 9));
    }

    /// Exhaustive check that reduction agrees with `f` on the zero set of
    /// the constraints, over tiny fields where we can afford all points.
    #[test]
    fn reduce_agrees_on_solutions_exhaustively() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(0x5EED_0001);
        for &p in &[2u64, 3] {
            let fld = Field::new(p).unwrap();
            for _case in 0..60 {
                let n = rng.next_in(2, 4) as u32;
                let rand_lin = |rng: &mut SplitMix64| {
                    let mut l = LinearFunction::constant(fld, rng.next_below(p));
                    for v in 1..=n {
                        l.set_coeff(v, rng.next_below(p));
                    }
                    l
                };
                let l1 = rand_lin(&mut rng);
                let l2 = rand_lin(&mut rng);
                // random polynomial: up to 4 monomials of degree <= 3
                let mut f = SparsePoly::zero(fld);
                for _ in 0..rng.next_in(1, 4) {
                    let mut pairs = Vec::new();
                    for _ in 0..rng.next_in(0, 3) {
                        pairs.push((rng.next_in(1, n as u64) as u32, 1));
                    }
                    f.add_term(Monomial::from_pairs(&pairs), rng.next_below(p));
                }
                let reduced = match reduce_mod_two_linears(&f, &l1, &l2) {
                    Ok(r) => r,
                    Err(Inconsistent) => continue,
                };
                // enumerate all points of F_p^n
                let total = p.pow(n);
                for code in 0..total {
                    let mut xs = Vec::with_capacity(n as usize);
                    let mut c = code;
                    for _ in 0..n {
                        xs.push(c % p);
                        c /= p;
                    }
                    if l1.eval(&xs).unwrap() != 0 || l2.eval(&xs).unwrap() != 0 {
                        continue;
                    }
                    assert_eq!(
                        reduced.eval(&xs).unwrap(),
                        f.eval(&xs).unwrap(),
                        "reduction changed a value on the solution set"
                    );
                }
            }
        }
    }

    // ---- property tests ----

    fn arb_poly(p: u64, nvars: u32, max_terms: usize) -> impl Strategy<Value = SparsePoly> {
        let field = Field::new(p).unwrap();
        proptest::collection::vec(
            (
                proptest::collection::vec((1..=nvars, 1..3u32), 0..3),
                0..p,
            ),
            0..=max_terms,
        )
        .prop_map(move |terms| {
            let mut poly = SparsePoly::zero(field);
            for (pairs, c) in terms {
                poly.add_term(Monomial::from_pairs(&pairs), field.reduce(c));
            }
            poly
        })
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(
            a in arb_poly(101, 4, 4),
            b in arb_poly(101, 4, 4),
            c in arb_poly(101, 4, 4),
        ) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn eval_is_ring_homomorphism(
            a in arb_poly(101, 3, 4),
            b in arb_poly(101, 3, 4),
            xs in proptest::collection::vec(0u64..101, 3),
        ) {
            let f = Field::new(101).unwrap();
            let va = a.eval(&xs).unwrap();
            let vb = b.eval(&xs).unwrap();
            prop_assert_eq!(a.add(&b).eval(&xs).unwrap(), f.add(va, vb));
            prop_assert_eq!(a.mul(&b).eval(&xs).unwrap(), f.mul(va, vb));
        }

        #[test]
        fn homogeneous_parts_sum_to_poly(a in arb_poly(101, 4, 6)) {
            let mut sum = SparsePoly::zero(a.field());
            for d in 0..=a.total_degree() {
                sum = sum.add(&a.homogeneous_part(d));
            }
            prop_assert_eq!(sum, a);
        }

        #[test]
        fn field_inverse_cancels(a in 1u64..101) {
            let f = Field::new(101).unwrap();
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }
}
