//! Finite-dimensional associative algebras given by structure constants.
//!
//! An algebra is a basis `e_1 .. e_k` over `F_p` together with the
//! coordinates of every product `e_i * e_j` and of the identity element.
//! Construction validates the table: bilinearity is free, associativity
//! and the identity law are checked on all basis triples/elements, and a
//! commutativity flag is recorded.
//!
//! The element-level tools implement the trichotomy that drives the
//! deterministic identity test: under the left-regular matrix
//! representation an element is invertible (nonzero determinant),
//! nilpotent (some power of the matrix vanishes; by Cayley-Hamilton the
//! k-th power suffices), or a proper zero divisor. A proper zero divisor
//! in a commutative algebra yields a nontrivial idempotent, and an
//! idempotent splits the algebra into two strictly smaller components.

use crate::error::Error;
use crate::field::Field;
use crate::linalg::{solve, Mat};

/// Element of an algebra: a coordinate vector in the algebra's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub coords: Vec<u64>,
}

impl AlgebraElement {
    pub fn new(coords: Vec<u64>) -> AlgebraElement {
        AlgebraElement { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// How an element sits inside its algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    /// The regular representation is nonsingular.
    Invertible,
    /// Some power vanishes.
    Nilpotent,
    /// Singular but no power vanishes; splits the algebra.
    ZeroDivisorNonNilpotent,
}

/// A validated structure-constant algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraBasis {
    field: Field,
    dim: usize,
    /// `structure[i * dim + j]` = coordinates of `e_i * e_j`.
    structure: Vec<Vec<u64>>,
    identity: Vec<u64>,
    commutative: bool,
}

impl AlgebraBasis {
    /// Builds and validates an algebra. `structure[i * dim + j]` must hold
    /// the coordinates of `e_i * e_j` (0-based, row-major over pairs).
    pub fn new(
        field: Field,
        dim: usize,
        structure: Vec<Vec<u64>>,
        identity: Vec<u64>,
    ) -> Result<AlgebraBasis, Error> {
        assert!(dim >= 1, "algebra dimension must be positive");
        if structure.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: structure.len() });
        }
        for v in structure.iter().chain(std::iter::once(&identity)) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        let mut a = AlgebraBasis {
            field,
            dim,
            structure: structure
                .into_iter()
                .map(|v| v.into_iter().map(|c| field.reduce(c)).collect())
                .collect(),
            identity: identity.into_iter().map(|c| field.reduce(c)).collect(),
            commutative: true,
        };
        a.validate()?;
        Ok(a)
    }

    /// Identity law on every basis element; associativity on every basis
    /// triple; sets the commutativity flag.
    fn validate(&mut self) -> Result<(), Error> {
        let one = AlgebraElement::new(self.identity.clone());
        for i in 0..self.dim {
            let ei = self.basis_element(i);
            if self.mul(&one, &ei) != ei || self.mul(&ei, &one) != ei {
                return Err(Error::BadIdentity { i });
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                for m in 0..self.dim {
                    let ij = AlgebraElement::new(self.structure[i * self.dim + j].clone());
                    let jm = AlgebraElement::new(self.structure[j * self.dim + m].clone());
                    let left = self.mul(&ij, &self.basis_element(m));
                    let right = self.mul(&self.basis_element(i), &jm);
                    if left != right {
                        return Err(Error::NotAssociative { i, j, m });
                    }
                }
            }
        }
        self.commutative = (0..self.dim).all(|i| {
            (0..self.dim)
                .all(|j| self.structure[i * self.dim + j] == self.structure[j * self.dim + i])
        });
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn structure_row(&self, i: usize, j: usize) -> &[u64] {
        &self.structure[i * self.dim + j]
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::new(vec![0; self.dim])
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::new(self.identity.clone())
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        let mut c = vec![0; self.dim];
        c[i] = 1 % self.field.modulus();
        AlgebraElement::new(c)
    }

    pub fn add(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        debug_assert_eq!(x.coords.len(), self.dim);
        debug_assert_eq!(y.coords.len(), self.dim);
        AlgebraElement::new(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(&a, &b)| self.field.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(&a, &b)| self.field.sub(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, x: &AlgebraElement, c: u64) -> AlgebraElement {
        let c = self.field.reduce(c);
        AlgebraElement::new(x.coords.iter().map(|&a| self.field.mul(a, c)).collect())
    }

    /// Bilinear product through the structure table.
    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        debug_assert_eq!(x.coords.len(), self.dim);
        debug_assert_eq!(y.coords.len(), self.dim);
        let f = self.field;
        let mut out = vec![0u64; self.dim];
        for i in 0..self.dim {
            let xi = x.coords[i];
            if xi == 0 {
                continue;
            }
            for j in 0..self.dim {
                let yj = y.coords[j];
                if yj == 0 {
                    continue;
                }
                let c = f.mul(xi, yj);
                for (o, &s) in out.iter_mut().zip(&self.structure[i * self.dim + j]) {
                    *o = f.add(*o, f.mul(c, s));
                }
            }
        }
        AlgebraElement::new(out)
    }

    pub fn pow(&self, x: &AlgebraElement, mut e: u64) -> AlgebraElement {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Left-regular representation: column `j` holds the coordinates of
    /// `a * e_j`.
    pub fn regular_rep(&self, a: &AlgebraElement) -> Mat {
        let mut m = Mat::zero(self.field, self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.mul(a, &self.basis_element(j));
            for i in 0..self.dim {
                m[(i, j)] = col.coords[i];
            }
        }
        m
    }

    /// Invertible / nilpotent / proper-zero-divisor trichotomy, decided on
    /// the regular representation. Nilpotency is checked at the k-th power,
    /// which suffices by Cayley-Hamilton.
    pub fn classify(&self, a: &AlgebraElement) -> ElementClass {
        let rep = self.regular_rep(a);
        if rep.det() != 0 {
            ElementClass::Invertible
        } else if rep.pow(self.dim as u64).is_zero() {
            ElementClass::Nilpotent
        } else {
            ElementClass::ZeroDivisorNonNilpotent
        }
    }

    /// Row-reduced basis of the ideal `R * w`, as RREF rows with their
    /// pivot columns.
    fn ideal_basis(&self, w: &AlgebraElement) -> (Vec<Vec<u64>>, Vec<usize>) {
        let rows: Vec<Vec<u64>> =
            (0..self.dim).map(|i| self.mul(&self.basis_element(i), w).coords).collect();
        let (red, pivots) = Mat::from_rows(self.field, &rows).rref();
        let basis = (0..pivots.len()).map(|r| red.row(r).to_vec()).collect();
        (basis, pivots)
    }

    /// Finds a nontrivial idempotent from a proper zero divisor `z` in a
    /// commutative algebra.
    ///
    /// For `t = 1, 2, ...` the ideal `R * z^t` is computed; once `t`
    /// exceeds the nilpotency index of the singular part of `z`, the ideal
    /// has an identity element `v`, found by solving the linear system
    /// `v * b_i = b_i` over the ideal's basis. Each candidate is verified
    /// (`v * v = v`, `v` not 0 or 1) before being returned, so a wrong `t`
    /// is skipped rather than trusted; some `t < k` must succeed.
    pub fn find_idempotent(&self, z: &AlgebraElement) -> Result<AlgebraElement, Error> {
        if !self.commutative {
            return Err(Error::NotCommutative);
        }
        if self.classify(z) != ElementClass::ZeroDivisorNonNilpotent {
            return Err(Error::NotAZeroDivisor);
        }
        let f = self.field;
        let mut w = z.clone();
        for _t in 1..self.dim.max(2) {
            let (basis, _) = self.ideal_basis(&w);
            let kp = basis.len();
            if kp > 0 {
                // unknowns nu_1..nu_kp; equations (sum nu_l b_l) * b_i = b_i
                let b_elems: Vec<AlgebraElement> =
                    basis.iter().map(|r| AlgebraElement::new(r.clone())).collect();
                let mut rows = Vec::with_capacity(kp * self.dim);
                let mut rhs = Vec::with_capacity(kp * self.dim);
                for bi in &b_elems {
                    // coordinate rows of the maps nu_l -> (b_l * b_i)
                    let prods: Vec<AlgebraElement> =
                        b_elems.iter().map(|bl| self.mul(bl, bi)).collect();
                    for coord in 0..self.dim {
                        rows.push(prods.iter().map(|p| p.coords[coord]).collect::<Vec<u64>>());
                        rhs.push(bi.coords[coord]);
                    }
                }
                if let Some(nu) = solve(&Mat::from_rows(f, &rows), &rhs) {
                    let mut v = self.zero();
                    for (l, b) in b_elems.iter().enumerate() {
                        v = self.add(&v, &self.scale(b, nu[l]));
                    }
                    let ok = self.mul(&v, &v) == v && !v.is_zero() && v != self.one();
                    if ok {
                        return Ok(v);
                    }
                }
            }
            w = self.mul(&w, z);
        }
        Err(Error::NoIdempotentFound {
            detail: "exhausted powers of the zero divisor".to_string(),
        })
    }

    /// Splits the algebra at a nontrivial idempotent `v` into the two
    /// ideals `R*v` and `R*(1-v)`, each packaged as a standalone algebra
    /// with projection/lifting data.
    pub fn split(&self, v: &AlgebraElement) -> Result<SplitResult, Error> {
        if !self.commutative {
            return Err(Error::NotCommutative);
        }
        if self.mul(v, v) != *v {
            return Err(Error::NotIdempotent);
        }
        if v.is_zero() || *v == self.one() {
            return Err(Error::TrivialIdempotent);
        }
        let complement = self.sub(&self.one(), v);
        let left = self.component(v)?;
        let right = self.component(&complement)?;
        assert_eq!(
            left.algebra.dim + right.algebra.dim,
            self.dim,
            "split components must partition the dimension"
        );
        Ok(SplitResult { v: v.clone(), left, right })
    }

    /// Packages the ideal generated by an idempotent as an algebra in its
    /// own right, with the RREF ideal basis as the canonical sub-basis.
    fn component(&self, e: &AlgebraElement) -> Result<SubAlgebra, Error> {
        let (basis, pivots) = self.ideal_basis(e);
        let r = basis.len();
        assert!(r > 0, "idempotent component cannot be zero-dimensional");
        let b_elems: Vec<AlgebraElement> =
            basis.iter().map(|row| AlgebraElement::new(row.clone())).collect();
        // Because the basis is in reduced row echelon form, coordinates in
        // the sub-basis can be read off at the pivot columns.
        let extract = |x: &AlgebraElement| -> Vec<u64> {
            pivots.iter().map(|&c| x.coords[c]).collect()
        };
        let mut structure = Vec::with_capacity(r * r);
        for bi in &b_elems {
            for bj in &b_elems {
                let prod = self.mul(bi, bj);
                let sub = extract(&prod);
                let mut lift = self.zero();
                for (l, b) in b_elems.iter().enumerate() {
                    lift = self.add(&lift, &self.scale(b, sub[l]));
                }
                assert_eq!(lift, prod, "ideal span must be multiplicatively closed");
                structure.push(sub);
            }
        }
        let identity = extract(e);
        let algebra = AlgebraBasis::new(self.field, r, structure, identity)?;
        Ok(SubAlgebra { algebra, embedding: basis, pivots, unit: e.clone() })
    }
}

/// One side of a split: the ideal as a standalone algebra plus the data
/// needed to move elements across.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubAlgebra {
    pub algebra: AlgebraBasis,
    /// Sub-basis vectors in parent coordinates (RREF rows).
    pub embedding: Vec<Vec<u64>>,
    /// Pivot columns of the RREF basis; sub-coordinates live here.
    pub pivots: Vec<usize>,
    /// The idempotent that is this component's identity, in parent coords.
    pub unit: AlgebraElement,
}

impl SubAlgebra {
    /// Parent coordinates of a sub-algebra element.
    pub fn lift(&self, y: &AlgebraElement) -> AlgebraElement {
        let f = self.algebra.field();
        let dim_parent = self.embedding[0].len();
        let mut out = vec![0u64; dim_parent];
        for (l, row) in self.embedding.iter().enumerate() {
            let c = y.coords[l];
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, b));
            }
        }
        AlgebraElement::new(out)
    }

    /// Projects a parent element into this component: multiply by the
    /// component's idempotent, then read off the RREF pivot coordinates.
    pub fn project(&self, parent: &AlgebraBasis, x: &AlgebraElement) -> AlgebraElement {
        let prod = parent.mul(x, &self.unit);
        AlgebraElement::new(self.pivots.iter().map(|&c| prod.coords[c]).collect())
    }
}

/// Result of splitting an algebra at an idempotent `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub v: AlgebraElement,
    pub left: SubAlgebra,
    pub right: SubAlgebra,
}

// ---------------------------------------------------------------------------
// Term circuits with algebra coefficients
// ---------------------------------------------------------------------------

/// A product of linear terms whose coefficients are algebra elements:
/// `P = T_1 * ... * T_d` with `T_i = A_i0 + A_i1 x_1 + ... + A_in x_n`.
/// An empty product denotes the identity element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraTermCircuit {
    pub basis: AlgebraBasis,
    pub n: u32,
    /// `terms[i][v]` is the coefficient of `x_v` in term `i` (`v = 0` is
    /// the constant slot). Each inner vector has length `n + 1`.
    pub terms: Vec<Vec<AlgebraElement>>,
}

impl AlgebraTermCircuit {
    pub fn new(basis: AlgebraBasis, n: u32, terms: Vec<Vec<AlgebraElement>>) -> AlgebraTermCircuit {
        for t in &terms {
            assert_eq!(t.len(), n as usize + 1, "term needs n+1 coefficients");
            for a in t {
                assert_eq!(a.coords.len(), basis.dim(), "coefficient has wrong dimension");
            }
        }
        AlgebraTermCircuit { basis, n, terms }
    }

    pub fn degree(&self) -> usize {
        self.terms.len()
    }

    /// Evaluates the product at a scalar point.
    pub fn eval(&self, xs: &[u64]) -> Result<AlgebraElement, Error> {
        if xs.len() < self.n as usize {
            return Err(Error::ArityMismatch { needed: self.n as usize, got: xs.len() });
        }
        let b = &self.basis;
        let f = b.field();
        let mut acc = b.one();
        for term in &self.terms {
            let mut t = term[0].clone();
            for v in 1..=self.n as usize {
                t = b.add(&t, &b.scale(&term[v], f.reduce(xs[v - 1])));
            }
            acc = b.mul(&acc, &t);
        }
        Ok(acc)
    }

    /// Moves the circuit into a split component coefficient-wise.
    pub fn project(&self, parent: &AlgebraBasis, component: &SubAlgebra) -> AlgebraTermCircuit {
        let terms = self
            .terms
            .iter()
            .map(|t| t.iter().map(|a| component.project(parent, a)).collect())
            .collect();
        AlgebraTermCircuit::new(component.algebra.clone(), self.n, terms)
    }
}

// ---------------------------------------------------------------------------
// Ready-made algebras
// ---------------------------------------------------------------------------

impl AlgebraBasis {
    /// The ground field itself, dimension 1.
    pub fn ground_field(field: Field) -> AlgebraBasis {
        AlgebraBasis::new(field, 1, vec![vec![1]], vec![1]).expect("table is valid")
    }

    /// `F x F` in the basis `{(1,1), (1,0)}`.
    pub fn product_of_fields(field: Field) -> AlgebraBasis {
        let e1 = vec![1, 0];
        let e2 = vec![0, 1];
        AlgebraBasis::new(
            field,
            2,
            vec![e1.clone(), e2.clone(), e2.clone(), e2],
            e1,
        )
        .expect("table is valid")
    }

    /// Truncated polynomials `F[y]/(y^t)` in the basis `{1, y, .., y^(t-1)}`.
    pub fn truncated_polynomials(field: Field, t: usize) -> AlgebraBasis {
        assert!(t >= 2, "need at least the dual numbers");
        let dim = t;
        let mut structure = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut row = vec![0u64; dim];
                if i + j < dim {
                    row[i + j] = 1;
                }
                structure.push(row);
            }
        }
        let mut identity = vec![0u64; dim];
        identity[0] = 1;
        AlgebraBasis::new(field, dim, structure, identity).expect("table is valid")
    }

    /// `F[y]/(y^2 - y)` in the basis `{1, y}`: y is idempotent.
    pub fn split_quadratic(field: Field) -> AlgebraBasis {
        AlgebraBasis::new(
            field,
            2,
            vec![vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1]],
            vec![1, 0],
        )
        .expect("table is valid")
    }

    /// 2x2 upper-triangular matrices in the basis `{E11, E12, E22}`.
    /// Non-commutative; the usual counterexample control.
    pub fn upper_triangular_2x2(field: Field) -> AlgebraBasis {
        let zero = vec![0u64, 0, 0];
        let e11 = vec![1u64, 0, 0];
        let e12 = vec![0u64, 1, 0];
        let e22 = vec![0u64, 0, 1];
        let structure = vec![
            // E11 * {E11, E12, E22}
            e11.clone(),
            e12.clone(),
            zero.clone(),
            // E12 * {E11, E12, E22}
            zero.clone(),
            zero.clone(),
            e12,
            // E22 * {E11, E12, E22}
            zero.clone(),
            zero,
            e22,
        ];
        AlgebraBasis::new(field, 3, structure, vec![1, 0, 1]).expect("table is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f101() -> Field {
        Field::new(101).unwrap()
    }

    #[test]
    fn validation_catches_bad_tables() {
        let f = f101();
        // Claimed identity fails: say e1*e1 = 0 with identity e1.
        let bad = AlgebraBasis::new(f, 1, vec![vec![0]], vec![1]);
        assert_eq!(bad, Err(Error::BadIdentity { i: 0 }));
        // Break associativity in the dual numbers by corrupting y*y.
        let broken = AlgebraBasis::new(
            f,
            2,
            vec![vec![1, 0], vec![0, 1], vec![0, 1], vec![1, 0]], // y*y = 1
            vec![1, 0],
        );
        // y*y = 1 makes {1,y} the group algebra of Z/2: still associative!
        assert!(broken.is_ok());
        // Corrupting e2*e1 breaks the identity law on the right.
        let one_sided = AlgebraBasis::new(
            f,
            2,
            vec![vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 1]],
            vec![1, 0],
        );
        assert_eq!(one_sided, Err(Error::BadIdentity { i: 1 }));
    }

    #[test]
    fn mutated_structure_constant_is_reported() {
        let f = f101();
        // Start from the valid 3-dimensional truncated table and corrupt a
        // single off-identity product: y * y^2 = 1 while y^2 * y stays 0.
        // Identity-law checks never touch that slot, so only the
        // associativity sweep can catch it: (y*y)*y = 0 but y*(y*y) = 1.
        let mut structure = Vec::new();
        for i in 0..3usize {
            for j in 0..3usize {
                let mut row = vec![0u64; 3];
                if i + j < 3 {
                    row[i + j] = 1;
                }
                structure.push(row);
            }
        }
        structure[3 + 2] = vec![1, 0, 0]; // y * y^2 = 1
        let r = AlgebraBasis::new(f, 3, structure, vec![1, 0, 0]);
        assert_eq!(r, Err(Error::NotAssociative { i: 1, j: 1, m: 1 }));
    }

    #[test]
    fn zoo_tables_validate() {
        let f = f101();
        assert_eq!(AlgebraBasis::ground_field(f).dim(), 1);
        assert!(AlgebraBasis::product_of_fields(f).is_commutative());
        assert!(AlgebraBasis::truncated_polynomials(f, 2).is_commutative());
        assert!(AlgebraBasis::truncated_polynomials(f, 3).is_commutative());
        assert!(AlgebraBasis::split_quadratic(f).is_commutative());
        let u2 = AlgebraBasis::upper_triangular_2x2(f);
        assert!(!u2.is_commutative());
    }

    #[test]
    fn regular_rep_known_matrices() {
        let f = f101();
        // Dual numbers: rep(y) shifts 1 -> y -> 0.
        let dual = AlgebraBasis::truncated_polynomials(f, 2);
        let y = dual.basis_element(1);
        let rep = dual.regular_rep(&y);
        assert_eq!((rep[(0, 0)], rep[(0, 1)], rep[(1, 0)], rep[(1, 1)]), (0, 0, 1, 0));
        // F x F with e2 = (1,0): columns are e2 twice.
        let ff = AlgebraBasis::product_of_fields(f);
        let e2 = ff.basis_element(1);
        let rep = ff.regular_rep(&e2);
        assert_eq!((rep[(0, 0)], rep[(0, 1)], rep[(1, 0)], rep[(1, 1)]), (0, 0, 1, 1));
    }

    #[test]
    fn regular_rep_is_unital_homomorphism() {
        use crate::rng::SplitMix64;
        let f = f101();
        let zoo = [
            AlgebraBasis::ground_field(f),
            AlgebraBasis::product_of_fields(f),
            AlgebraBasis::truncated_polynomials(f, 2),
            AlgebraBasis::truncated_polynomials(f, 3),
            AlgebraBasis::split_quadratic(f),
            AlgebraBasis::upper_triangular_2x2(f),
        ];
        let mut rng = SplitMix64::new(0xA1A1);
        for b in &zoo {
            assert_eq!(b.regular_rep(&b.one()), Mat::identity(f, b.dim()));
            for _ in 0..200 {
                let x = AlgebraElement::new(
                    (0..b.dim()).map(|_| rng.next_below(101)).collect(),
                );
                let y = AlgebraElement::new(
                    (0..b.dim()).map(|_| rng.next_below(101)).collect(),
                );
                let rx = b.regular_rep(&x);
                let ry = b.regular_rep(&y);
                assert_eq!(b.regular_rep(&b.mul(&x, &y)), rx.mul(&ry));
                assert_eq!(b.regular_rep(&b.add(&x, &y)), {
                    let mut s = Mat::zero(f, b.dim(), b.dim());
                    for i in 0..b.dim() {
                        for j in 0..b.dim() {
                            s[(i, j)] = f.add(rx[(i, j)], ry[(i, j)]);
                        }
                    }
                    s
                });
            }
        }
    }

    #[test]
    fn classify_trichotomy_examples() {
        let f = f101();
        let dual = AlgebraBasis::truncated_polynomials(f, 2);
        let y = dual.basis_element(1);
        assert_eq!(dual.classify(&y), ElementClass::Nilpotent);
        let one_plus_y = dual.add(&dual.one(), &y);
        assert_eq!(dual.classify(&one_plus_y), ElementClass::Invertible);
        let ff = AlgebraBasis::product_of_fields(f);
        let e2 = ff.basis_element(1);
        assert_eq!(ff.classify(&e2), ElementClass::ZeroDivisorNonNilpotent);
        assert_eq!(ff.classify(&ff.zero()), ElementClass::Nilpotent);
    }

    #[test]
    fn invertible_elements_have_inverses() {
        use crate::rng::SplitMix64;
        let f = f101();
        let zoo = [
            AlgebraBasis::product_of_fields(f),
            AlgebraBasis::truncated_polynomials(f, 3),
            AlgebraBasis::upper_triangular_2x2(f),
        ];
        let mut rng = SplitMix64::new(0xB2B2);
        for b in &zoo {
            let mut found = 0;
            while found < 30 {
                let x = AlgebraElement::new(
                    (0..b.dim()).map(|_| rng.next_below(101)).collect(),
                );
                if b.classify(&x) != ElementClass::Invertible {
                    continue;
                }
                found += 1;
                // Solve rep(x) * c = identity coordinates; then x * inv = 1.
                let rep = b.regular_rep(&x);
                let inv = solve(&rep, &b.one().coords).expect("nonsingular system");
                let inv = AlgebraElement::new(inv);
                assert_eq!(b.mul(&x, &inv), b.one());
            }
        }
    }

    #[test]
    fn nilpotents_closed_under_addition_in_local_algebras() {
        use crate::rng::SplitMix64;
        let f = f101();
        for t in [2usize, 3, 4] {
            let b = AlgebraBasis::truncated_polynomials(f, t);
            let mut rng = SplitMix64::new(0xC3C3 + t as u64);
            // The nilpotents are exactly the multiples of y: zero constant
            // coordinate. Sample that ideal and check classify agrees, and
            // that sums stay inside it.
            let sample = |rng: &mut SplitMix64| {
                let mut coords = vec![0u64];
                coords.extend((1..b.dim()).map(|_| rng.next_below(101)));
                AlgebraElement::new(coords)
            };
            let nilpotents: Vec<AlgebraElement> = (0..10).map(|_| sample(&mut rng)).collect();
            for x in &nilpotents {
                assert_eq!(b.classify(x), ElementClass::Nilpotent);
            }
            for x in &nilpotents {
                for y in &nilpotents {
                    let s = b.add(x, y);
                    assert_eq!(b.classify(&s), ElementClass::Nilpotent);
                }
            }
            // ... while adding a unit leaves the ideal.
            let u = b.add(&b.one(), &nilpotents[0]);
            assert_eq!(b.classify(&u), ElementClass::Invertible);
        }
    }

    #[test]
    fn idempotent_from_split_pair() {
        let f = f101();
        let ff = AlgebraBasis::product_of_fields(f);
        let e2 = ff.basis_element(1);
        let v = ff.find_idempotent(&e2).unwrap();
        assert_eq!(v, e2);
        // F[y]/(y^2 - y): z = y gives v = y.
        let sq = AlgebraBasis::split_quadratic(f);
        let y = sq.basis_element(1);
        let v = sq.find_idempotent(&y).unwrap();
        assert_eq!(v, y);
    }

    #[test]
    fn idempotent_rejects_units_and_nilpotents() {
        let f = f101();
        let dual = AlgebraBasis::truncated_polynomials(f, 2);
        assert_eq!(dual.find_idempotent(&dual.basis_element(1)), Err(Error::NotAZeroDivisor));
        assert_eq!(dual.find_idempotent(&dual.one()), Err(Error::NotAZeroDivisor));
        let u2 = AlgebraBasis::upper_triangular_2x2(f);
        assert_eq!(u2.find_idempotent(&u2.basis_element(0)), Err(Error::NotCommutative));
    }

    #[test]
    fn split_product_of_fields() {
        let f = f101();
        let ff = AlgebraBasis::product_of_fields(f);
        let v = ff.basis_element(1);
        let s = ff.split(&v).unwrap();
        assert_eq!(s.left.algebra.dim(), 1);
        assert_eq!(s.right.algebra.dim(), 1);
        // both components are the ground field
        assert_eq!(s.left.algebra.structure_row(0, 0), &[1]);
        assert_eq!(s.right.algebra.structure_row(0, 0), &[1]);
    }

    #[test]
    fn split_rejects_bad_idempotents() {
        let f = f101();
        let ff = AlgebraBasis::product_of_fields(f);
        let not_idem = AlgebraElement::new(vec![5, 1]);
        assert_eq!(ff.split(&not_idem), Err(Error::NotIdempotent));
        assert_eq!(ff.split(&ff.one()), Err(Error::TrivialIdempotent));
        assert_eq!(ff.split(&ff.zero()), Err(Error::TrivialIdempotent));
    }

    #[test]
    fn split_projections_reassemble_elements() {
        use crate::rng::SplitMix64;
        let f = f101();
        // y^2 = y splits at v = y into two copies of F.
        let sq = AlgebraBasis::split_quadratic(f);
        let v = sq.basis_element(1);
        let s = sq.split(&v).unwrap();
        let mut rng = SplitMix64::new(0xD4D4);
        for _ in 0..50 {
            let x = AlgebraElement::new(vec![rng.next_below(101), rng.next_below(101)]);
            let y = AlgebraElement::new(vec![rng.next_below(101), rng.next_below(101)]);
            // x = lift(project_left x) + lift(project_right x)
            let xl = s.left.lift(&s.left.project(&sq, &x));
            let xr = s.right.lift(&s.right.project(&sq, &x));
            assert_eq!(sq.add(&xl, &xr), x);
            // projections are multiplicative
            let pxy = s.left.project(&sq, &sq.mul(&x, &y));
            let px = s.left.project(&sq, &x);
            let py = s.left.project(&sq, &y);
            assert_eq!(pxy, s.left.algebra.mul(&px, &py));
        }
    }

    #[test]
    fn term_circuit_eval() {
        let f = f101();
        let dual = AlgebraBasis::truncated_polynomials(f, 2);
        let y = dual.basis_element(1);
        // (y*x1) * (y*x2) = y^2 x1 x2 = 0
        let c = AlgebraTermCircuit::new(
            dual.clone(),
            2,
            vec![
                vec![dual.zero(), y.clone(), dual.zero()],
                vec![dual.zero(), dual.zero(), y.clone()],
            ],
        );
        assert!(c.eval(&[3, 4]).unwrap().is_zero());
        // empty product is the identity
        let empty = AlgebraTermCircuit::new(dual.clone(), 0, vec![]);
        assert_eq!(empty.eval(&[]).unwrap(), dual.one());
    }
}
