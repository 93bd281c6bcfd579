//! Circuit intermediate representations and their exact semantics.
//!
//! Every representation here denotes a polynomial (or a matrix of
//! polynomials) over `F_p`, and each one supports two semantics that the
//! test suites constantly play against each other:
//!
//! * **expand**: full symbolic expansion into [`SparsePoly`], guarded by a
//!   monomial cap so a typo cannot eat the machine;
//! * **eval**: direct numeric evaluation at a point, never materializing
//!   the polynomial.
//!
//! The representations: fan-in-2 arithmetic [`Formula`]s, sum-of-products
//! [`DepthThreeCircuit`]s, products of matrices with linear-function
//! entries ([`LinearMatrixSequence`]), and layered algebraic branching
//! programs ([`Abp`]) whose path-sum semantics is computed level by level.

use crate::error::Error;
use crate::field::Field;
use crate::poly::{LinearFunction, SparsePoly, Z_VAR};

/// Default ceiling on expanded monomial counts.
pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;

fn check_cap(monomials: usize, cap: usize) -> Result<(), Error> {
    if monomials > cap {
        Err(Error::ExpansionTooLarge { monomials, cap })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Formula
// ---------------------------------------------------------------------------

/// A node of a fan-in-2 arithmetic formula. Leaves are single terms
/// `c * x_i` or bare constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaNode {
    Add(Box<FormulaNode>, Box<FormulaNode>),
    Mul(Box<FormulaNode>, Box<FormulaNode>),
    Leaf { coeff: u64, var: Option<u32> },
}

/// A formula together with its coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub field: Field,
    pub root: FormulaNode,
}

impl FormulaNode {
    /// Multiplicative depth in the fan-in-2 sense: leaves are depth 0 and
    /// every internal node counts.
    pub fn depth(&self) -> u32 {
        match self {
            FormulaNode::Leaf { .. } => 0,
            FormulaNode::Add(a, b) | FormulaNode::Mul(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn num_vars(&self) -> u32 {
        match self {
            FormulaNode::Leaf { var, .. } => var.unwrap_or(0),
            FormulaNode::Add(a, b) | FormulaNode::Mul(a, b) => a.num_vars().max(b.num_vars()),
        }
    }
}

impl Formula {
    pub fn depth(&self) -> u32 {
        self.root.depth()
    }

    pub fn num_vars(&self) -> u32 {
        self.root.num_vars()
    }

    pub fn uses_z(&self) -> bool {
        fn go(node: &FormulaNode) -> bool {
            match node {
                FormulaNode::Leaf { var, .. } => *var == Some(Z_VAR),
                FormulaNode::Add(a, b) | FormulaNode::Mul(a, b) => go(a) || go(b),
            }
        }
        go(&self.root)
    }

    /// Evaluates with an explicit value for the variable `z`.
    pub fn eval_at(&self, xs: &[u64], z: u64) -> Result<u64, Error> {
        let needed = self.num_vars() as usize;
        if xs.len() < needed {
            return Err(Error::ArityMismatch { needed, got: xs.len() });
        }
        fn go(field: Field, node: &FormulaNode, xs: &[u64], z: u64) -> u64 {
            match node {
                FormulaNode::Leaf { coeff, var } => match var {
                    None => field.reduce(*coeff),
                    Some(v) if *v == Z_VAR => field.mul(field.reduce(*coeff), field.reduce(z)),
                    Some(v) => field.mul(field.reduce(*coeff), field.reduce(xs[(*v - 1) as usize])),
                },
                FormulaNode::Add(a, b) => field.add(go(field, a, xs, z), go(field, b, xs, z)),
                FormulaNode::Mul(a, b) => field.mul(go(field, a, xs, z), go(field, b, xs, z)),
            }
        }
        Ok(go(self.field, &self.root, xs, z))
    }

    /// Evaluates with `z` fixed to 1.
    pub fn eval(&self, xs: &[u64]) -> Result<u64, Error> {
        self.eval_at(xs, 1)
    }

    pub fn expand(&self, cap: usize) -> Result<SparsePoly, Error> {
        fn go(field: Field, node: &FormulaNode, cap: usize) -> Result<SparsePoly, Error> {
            let out = match node {
                FormulaNode::Leaf { coeff, var } => match var {
                    None => SparsePoly::constant(field, *coeff),
                    Some(v) => SparsePoly::variable(field, *v).scale(*coeff),
                },
                FormulaNode::Add(a, b) => go(field, a, cap)?.add(&go(field, b, cap)?),
                FormulaNode::Mul(a, b) => go(field, a, cap)?.mul(&go(field, b, cap)?),
            };
            check_cap(out.num_terms(), cap)?;
            Ok(out)
        }
        go(self.field, &self.root, cap)
    }
}

// ---------------------------------------------------------------------------
// DepthThreeCircuit
// ---------------------------------------------------------------------------

/// A sum of products of affine linear functions. At least one summand;
/// every summand holds at least one factor. Identically-zero linear
/// functions are legal factors (a summand containing one computes zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthThreeCircuit {
    pub field: Field,
    pub products: Vec<Vec<LinearFunction>>,
}

impl DepthThreeCircuit {
    pub fn new(field: Field, products: Vec<Vec<LinearFunction>>) -> DepthThreeCircuit {
        assert!(!products.is_empty(), "circuit needs at least one summand");
        for p in &products {
            assert!(!p.is_empty(), "summand needs at least one factor");
            for l in p {
                assert_eq!(l.field(), field, "mixed fields");
            }
        }
        DepthThreeCircuit { field, products }
    }

    /// Top fan-in.
    pub fn fanin(&self) -> usize {
        self.products.len()
    }

    /// Formal degree: the longest summand.
    pub fn degree(&self) -> usize {
        self.products.iter().map(|p| p.len()).max().unwrap()
    }

    pub fn num_vars(&self) -> u32 {
        self.products
            .iter()
            .flat_map(|p| p.iter())
            .map(|l| l.num_vars())
            .max()
            .unwrap_or(0)
    }

    pub fn is_degree_normalized(&self) -> bool {
        let d = self.degree();
        self.products.iter().all(|p| p.len() == d)
    }

    /// Pads every summand to the common degree with constant-1 factors.
    /// The computed polynomial is unchanged.
    pub fn normalize_degree(&self) -> DepthThreeCircuit {
        let d = self.degree();
        let one = LinearFunction::constant(self.field, 1);
        let products = self
            .products
            .iter()
            .map(|p| {
                let mut q = p.clone();
                while q.len() < d {
                    q.push(one.clone());
                }
                q
            })
            .collect();
        DepthThreeCircuit { field: self.field, products }
    }

    pub fn uses_z(&self) -> bool {
        self.products.iter().flatten().any(|l| l.uses_z())
    }

    /// Evaluates with an explicit value for the variable `z`.
    pub fn eval_at(&self, xs: &[u64], z: u64) -> Result<u64, Error> {
        let f = self.field;
        let mut total = 0;
        for p in &self.products {
            let mut prod = 1 % f.modulus();
            for l in p {
                prod = f.mul(prod, l.eval_at(xs, z)?);
            }
            total = f.add(total, prod);
        }
        Ok(total)
    }

    /// Evaluates with `z` fixed to 1.
    pub fn eval(&self, xs: &[u64]) -> Result<u64, Error> {
        self.eval_at(xs, 1)
    }

    pub fn expand(&self, cap: usize) -> Result<SparsePoly, Error> {
        let mut total = SparsePoly::zero(self.field);
        for p in &self.products {
            let mut prod = SparsePoly::constant(self.field, 1);
            for l in p {
                prod = prod.mul(&l.to_poly());
                check_cap(prod.num_terms(), cap)?;
            }
            total = total.add(&prod);
            check_cap(total.num_terms(), cap)?;
        }
        Ok(total)
    }
}

// ---------------------------------------------------------------------------
// LinearMatrix / LinearMatrixSequence
// ---------------------------------------------------------------------------

/// A square matrix whose entries are affine linear functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatrix {
    pub k: usize,
    pub entries: Vec<LinearFunction>, // row-major, k*k
}

impl LinearMatrix {
    pub fn new(k: usize, entries: Vec<LinearFunction>) -> LinearMatrix {
        assert!(k >= 1, "matrix dimension must be positive");
        assert_eq!(entries.len(), k * k, "entry count must be k*k");
        LinearMatrix { k, entries }
    }

    pub fn identity(field: Field, k: usize) -> LinearMatrix {
        let mut entries = vec![LinearFunction::zero(field); k * k];
        for i in 0..k {
            entries[i * k + i] = LinearFunction::constant(field, 1);
        }
        LinearMatrix::new(k, entries)
    }

    /// Identity plus a single entry at `(row, col)` (0-based, off-diagonal).
    pub fn transvection(field: Field, k: usize, row: usize, col: usize, l: LinearFunction) -> LinearMatrix {
        assert_ne!(row, col, "transvection entry must be off the diagonal");
        let mut m = LinearMatrix::identity(field, k);
        *m.get_mut(row, col) = l;
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &LinearFunction {
        &self.entries[r * self.k + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut LinearFunction {
        &mut self.entries[r * self.k + c]
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.k).all(|r| (0..r).all(|c| self.get(r, c).is_zero()))
    }

    /// Identity on the diagonal, at most one nonzero off-diagonal entry,
    /// and that entry a single term `c` or `c * x_i`.
    pub fn is_transvection(&self) -> bool {
        let mut off = 0;
        for r in 0..self.k {
            for c in 0..self.k {
                let e = self.get(r, c);
                if r == c {
                    if e.as_constant() != Some(1) {
                        return false;
                    }
                } else if !e.is_zero() {
                    if e.single_term().is_none() {
                        return false;
                    }
                    off += 1;
                }
            }
        }
        off <= 1
    }

    pub fn num_vars(&self) -> u32 {
        self.entries.iter().map(|l| l.num_vars()).max().unwrap_or(0)
    }

    pub fn uses_z(&self) -> bool {
        self.entries.iter().any(|l| l.uses_z())
    }
}

/// An ordered product `M_1 * M_2 * ... * M_t` of linear matrices, with
/// optional constant masks multiplied on the outside (left mask on the
/// left, right mask on the right). Masks are row-major `k*k` scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatrixSequence {
    pub field: Field,
    pub k: usize,
    pub matrices: Vec<LinearMatrix>,
    pub left_mask: Option<Vec<u64>>,
    pub right_mask: Option<Vec<u64>>,
}

impl LinearMatrixSequence {
    pub fn new(field: Field, k: usize, matrices: Vec<LinearMatrix>) -> LinearMatrixSequence {
        assert!(!matrices.is_empty(), "sequence needs at least one matrix");
        for m in &matrices {
            assert_eq!(m.k, k, "mixed matrix dimensions");
        }
        LinearMatrixSequence { field, k, matrices, left_mask: None, right_mask: None }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn num_vars(&self) -> u32 {
        self.matrices.iter().map(|m| m.num_vars()).max().unwrap_or(0)
    }

    pub fn uses_z(&self) -> bool {
        self.matrices.iter().any(|m| m.uses_z())
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.matrices.iter().all(|m| m.is_upper_triangular())
    }

    fn mask_to_polys(&self, mask: &[u64]) -> Vec<SparsePoly> {
        assert_eq!(mask.len(), self.k * self.k, "mask must be k*k scalars");
        mask.iter().map(|&c| SparsePoly::constant(self.field, c)).collect()
    }

    /// Symbolic product with masks applied; the result is the row-major
    /// `k*k` grid of entry polynomials. The cap bounds the total monomial
    /// count across entries at every intermediate step.
    pub fn expand(&self, cap: usize) -> Result<Vec<SparsePoly>, Error> {
        let k = self.k;
        let field = self.field;
        let ident: Vec<SparsePoly> = {
            let mut g = vec![SparsePoly::zero(field); k * k];
            for i in 0..k {
                g[i * k + i] = SparsePoly::constant(field, 1);
            }
            g
        };
        let mut acc = match &self.left_mask {
            Some(m) => self.mask_to_polys(m),
            None => ident.clone(),
        };
        let mul_into = |acc: &Vec<SparsePoly>, rhs_at: &dyn Fn(usize, usize) -> SparsePoly| {
            let mut out = vec![SparsePoly::zero(field); k * k];
            for i in 0..k {
                for l in 0..k {
                    let a = &acc[i * k + l];
                    if a.is_zero() {
                        continue;
                    }
                    for j in 0..k {
                        let b = rhs_at(l, j);
                        if b.is_zero() {
                            continue;
                        }
                        out[i * k + j] = out[i * k + j].add(&a.mul(&b));
                    }
                }
            }
            out
        };
        for m in &self.matrices {
            acc = mul_into(&acc, &|l, j| m.get(l, j).to_poly());
            let total: usize = acc.iter().map(|e| e.num_terms()).sum();
            check_cap(total, cap)?;
        }
        if let Some(mask) = &self.right_mask {
            let mp = self.mask_to_polys(mask);
            acc = mul_into(&acc, &|l, j| mp[l * k + j].clone());
            let total: usize = acc.iter().map(|e| e.num_terms()).sum();
            check_cap(total, cap)?;
        }
        Ok(acc)
    }

    /// Numeric product of the evaluated matrices, masks applied. Returns
    /// the row-major `k*k` grid of values.
    pub fn eval_at(&self, xs: &[u64], z: u64) -> Result<Vec<u64>, Error> {
        let k = self.k;
        let f = self.field;
        let mut acc: Vec<u64> = match &self.left_mask {
            Some(m) => m.iter().map(|&c| f.reduce(c)).collect(),
            None => {
                let mut g = vec![0; k * k];
                for i in 0..k {
                    g[i * k + i] = 1 % f.modulus();
                }
                g
            }
        };
        let step = |acc: &[u64], rhs: &[u64]| {
            let mut out = vec![0u64; k * k];
            for i in 0..k {
                for l in 0..k {
                    let a = acc[i * k + l];
                    if a == 0 {
                        continue;
                    }
                    for j in 0..k {
                        out[i * k + j] = f.add(out[i * k + j], f.mul(a, rhs[l * k + j]));
                    }
                }
            }
            out
        };
        for m in &self.matrices {
            let mut vals = Vec::with_capacity(k * k);
            for e in &m.entries {
                vals.push(e.eval_at(xs, z)?);
            }
            acc = step(&acc, &vals);
        }
        if let Some(mask) = &self.right_mask {
            let vals: Vec<u64> = mask.iter().map(|&c| f.reduce(c)).collect();
            acc = step(&acc, &vals);
        }
        Ok(acc)
    }

    pub fn eval(&self, xs: &[u64]) -> Result<Vec<u64>, Error> {
        self.eval_at(xs, 1)
    }

    /// Degrees of the suffix products `P_t = M_t * ... * M_len`, reported
    /// as the maximum total degree over matrix entries, for `t = 1..=len`
    /// (index 0 is the full product). Masks are ignored: this measures the
    /// raw sequence. Entry polynomials are expanded, so the cap applies.
    pub fn partial_product_degrees(&self, cap: usize) -> Result<Vec<u32>, Error> {
        let k = self.k;
        let field = self.field;
        let mut suffix: Vec<SparsePoly> = {
            let mut g = vec![SparsePoly::zero(field); k * k];
            for i in 0..k {
                g[i * k + i] = SparsePoly::constant(field, 1);
            }
            g
        };
        let mut degs = vec![0u32; self.len()];
        for (t, m) in self.matrices.iter().enumerate().rev() {
            let mut out = vec![SparsePoly::zero(field); k * k];
            for i in 0..k {
                for l in 0..k {
                    let a = m.get(i, l);
                    if a.is_zero() {
                        continue;
                    }
                    let ap = a.to_poly();
                    for j in 0..k {
                        let b = &suffix[l * k + j];
                        if b.is_zero() {
                            continue;
                        }
                        out[i * k + j] = out[i * k + j].add(&ap.mul(b));
                    }
                }
            }
            suffix = out;
            let total: usize = suffix.iter().map(|e| e.num_terms()).sum();
            check_cap(total, cap)?;
            degs[t] = suffix.iter().map(|e| e.total_degree()).max().unwrap_or(0);
        }
        Ok(degs)
    }
}

// ---------------------------------------------------------------------------
// Abp
// ---------------------------------------------------------------------------

/// One labeled edge between consecutive levels of a branching program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbpEdge {
    pub from: usize,
    pub to: usize,
    pub label: LinearFunction,
}

/// A layered algebraic branching program. `levels[i]` is the vertex count
/// of level `i`; `gaps[g]` holds the edges between level `g` and `g + 1`.
/// The first and last levels hold exactly one vertex (source and sink) and
/// every edge label is homogeneous (no constant term; the homogenizing
/// variable `z` is an ordinary variable here).
///
/// The program computes the sum over all source-to-sink paths of the
/// product of edge labels, which [`Abp::eval_at`] computes level by level
/// as vector-matrix products -- never by enumerating paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abp {
    pub field: Field,
    pub levels: Vec<usize>,
    pub gaps: Vec<Vec<AbpEdge>>,
}

impl Abp {
    pub fn new(field: Field, levels: Vec<usize>, gaps: Vec<Vec<AbpEdge>>) -> Abp {
        assert!(levels.len() >= 2, "a branching program needs source and sink levels");
        assert_eq!(gaps.len(), levels.len() - 1, "one edge set per level gap");
        assert!(levels.iter().all(|&c| c >= 1), "levels cannot be empty");
        assert_eq!(levels[0], 1, "source level must hold exactly one vertex");
        assert_eq!(*levels.last().unwrap(), 1, "sink level must hold exactly one vertex");
        for (g, edges) in gaps.iter().enumerate() {
            for e in edges {
                assert!(e.from < levels[g] && e.to < levels[g + 1], "edge endpoint out of range");
                assert!(e.label.is_homogeneous(), "edge labels must be homogeneous");
                assert_eq!(e.label.field(), field, "mixed fields");
            }
        }
        Abp { field, levels, gaps }
    }

    /// Maximum level width.
    pub fn width(&self) -> usize {
        self.levels.iter().copied().max().unwrap()
    }

    pub fn num_vars(&self) -> u32 {
        self.gaps
            .iter()
            .flat_map(|g| g.iter())
            .map(|e| e.label.num_vars())
            .max()
            .unwrap_or(0)
    }

    pub fn uses_z(&self) -> bool {
        self.gaps.iter().flat_map(|g| g.iter()).any(|e| e.label.uses_z())
    }

    /// Pattern test for planarity of the layered drawing: within each gap,
    /// no two edges may cross under the fixed vertical vertex order, i.e.
    /// there is no pair with `from_a < from_b` and `to_a > to_b`.
    pub fn is_planar(&self) -> bool {
        for edges in &self.gaps {
            for (i, a) in edges.iter().enumerate() {
                for b in &edges[i + 1..] {
                    if (a.from < b.from && a.to > b.to) || (b.from < a.from && b.to > a.to) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Path-sum value at a point, computed with one vector per level.
    pub fn eval_at(&self, xs: &[u64], z: u64) -> Result<u64, Error> {
        let f = self.field;
        let mut vec = vec![1 % f.modulus()];
        for (g, edges) in self.gaps.iter().enumerate() {
            let mut next = vec![0u64; self.levels[g + 1]];
            for e in edges {
                let v = f.mul(vec[e.from], e.label.eval_at(xs, z)?);
                next[e.to] = f.add(next[e.to], v);
            }
            vec = next;
        }
        Ok(vec[0])
    }

    pub fn eval(&self, xs: &[u64]) -> Result<u64, Error> {
        self.eval_at(xs, 1)
    }

    /// Symbolic path-sum polynomial, same level-by-level scheme.
    pub fn expand(&self, cap: usize) -> Result<SparsePoly, Error> {
        let f = self.field;
        let mut vec = vec![SparsePoly::constant(f, 1)];
        for (g, edges) in self.gaps.iter().enumerate() {
            let mut next = vec![SparsePoly::zero(f); self.levels[g + 1]];
            for e in edges {
                if vec[e.from].is_zero() {
                    continue;
                }
                let v = vec[e.from].mul(&e.label.to_poly());
                next[e.to] = next[e.to].add(&v);
            }
            let total: usize = next.iter().map(|p| p.num_terms()).sum();
            check_cap(total, cap)?;
            vec = next;
        }
        Ok(vec.swap_remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    fn f101() -> Field {
        Field::new(101).unwrap()
    }

    fn lf(field: Field, constant: i64, pairs: &[(u32, i64)]) -> LinearFunction {
        let ps: Vec<(u32, u64)> = pairs.iter().map(|&(v, c)| (v, field.from_i64(c))).collect();
        LinearFunction::from_parts(field, field.from_i64(constant), &ps)
    }

    #[test]
    fn formula_depth_eval_expand() {
        let f = f101();
        // (x1 * x2) + 3
        let fm = Formula {
            field: f,
            root: FormulaNode::Add(
                Box::new(FormulaNode::Mul(
                    Box::new(FormulaNode::Leaf { coeff: 1, var: Some(1) }),
                    Box::new(FormulaNode::Leaf { coeff: 1, var: Some(2) }),
                )),
                Box::new(FormulaNode::Leaf { coeff: 3, var: None }),
            ),
        };
        assert_eq!(fm.depth(), 2);
        assert_eq!(fm.eval(&[4, 5]).unwrap(), 23);
        let p = fm.expand(1000).unwrap();
        assert_eq!(p.eval(&[4, 5]).unwrap(), 23);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn normalize_degree_pads_with_ones() {
        let f = f101();
        let c = DepthThreeCircuit::new(
            f,
            vec![
                vec![lf(f, 0, &[(1, 1)]), lf(f, 0, &[(2, 1)])],
                vec![lf(f, 0, &[(3, 1)])],
            ],
        );
        assert!(!c.is_degree_normalized());
        let n = c.normalize_degree();
        assert!(n.is_degree_normalized());
        assert_eq!(n.degree(), 2);
        assert_eq!(n.products[1][1].as_constant(), Some(1));
        // same polynomial
        assert_eq!(n.expand(100).unwrap(), c.expand(100).unwrap());
    }

    #[test]
    fn depth3_expand_with_cancellation() {
        let f = f101();
        // x1*x2 - x1*x2 = 0
        let l1 = lf(f, 0, &[(1, 1)]);
        let l2 = lf(f, 0, &[(2, 1)]);
        let c = DepthThreeCircuit::new(
            f,
            vec![vec![l1.clone(), l2.clone()], vec![l1.neg(), l2]],
        );
        assert!(c.expand(100).unwrap().is_zero());
        assert_eq!(c.eval(&[10, 20]).unwrap(), 0);
    }

    #[test]
    fn expansion_cap_enforced() {
        let f = f101();
        // (1+x1)(1+x2)...(1+x20) has 2^20 monomials; cap far below.
        let prod: Vec<LinearFunction> = (1..=20).map(|v| lf(f, 1, &[(v, 1)])).collect();
        let c = DepthThreeCircuit::new(f, vec![prod]);
        match c.expand(1000) {
            Err(Error::ExpansionTooLarge { cap: 1000, .. }) => {}
            other => panic!("expected cap violation, got {other:?}"),
        }
    }

    #[test]
    fn sequence_expand_matches_hand_product() {
        let f = f101();
        // [[x1, 0],[0,1]] * [[1, x2],[0,1]] = [[x1, x1*x2],[0,1]]
        let m1 = LinearMatrix::new(
            2,
            vec![
                lf(f, 0, &[(1, 1)]),
                LinearFunction::zero(f),
                LinearFunction::zero(f),
                LinearFunction::constant(f, 1),
            ],
        );
        let m2 = LinearMatrix::new(
            2,
            vec![
                LinearFunction::constant(f, 1),
                lf(f, 0, &[(2, 1)]),
                LinearFunction::zero(f),
                LinearFunction::constant(f, 1),
            ],
        );
        let seq = LinearMatrixSequence::new(f, 2, vec![m1, m2]);
        let grid = seq.expand(1000).unwrap();
        assert_eq!(grid[0], SparsePoly::variable(f, 1));
        let mut x1x2 = SparsePoly::zero(f);
        x1x2.add_term(Monomial::from_pairs(&[(1, 1), (2, 1)]), 1);
        assert_eq!(grid[1], x1x2);
        assert!(grid[2].is_zero());
        assert_eq!(grid[3], SparsePoly::constant(f, 1));
        // eval agrees entry-wise
        let vals = seq.eval(&[7, 9]).unwrap();
        assert_eq!(vals, vec![7, 63, 0, 1]);
    }

    #[test]
    fn masks_select_offdiagonal_block() {
        let f = f101();
        let m = LinearMatrix::new(
            2,
            vec![
                lf(f, 0, &[(1, 1)]),
                lf(f, 0, &[(2, 1)]),
                LinearFunction::zero(f),
                LinearFunction::constant(f, 1),
            ],
        );
        let mut seq = LinearMatrixSequence::new(f, 2, vec![m]);
        seq.left_mask = Some(vec![1, 0, 0, 0]);
        seq.right_mask = Some(vec![0, 0, 0, 1]);
        let grid = seq.expand(1000).unwrap();
        assert!(grid[0].is_zero());
        assert_eq!(grid[1], SparsePoly::variable(f, 2));
        assert!(grid[2].is_zero());
        assert!(grid[3].is_zero());
    }

    #[test]
    fn partial_product_degrees_all_linear() {
        let f = f101();
        let mk = |v: u32| {
            LinearMatrix::new(
                2,
                vec![
                    lf(f, 0, &[(v, 1)]),
                    lf(f, 1, &[]),
                    lf(f, 0, &[(v, 1)]),
                    lf(f, 2, &[(v, 1)]),
                ],
            )
        };
        let seq = LinearMatrixSequence::new(f, 2, vec![mk(1), mk(2)]);
        let degs = seq.partial_product_degrees(10_000).unwrap();
        assert_eq!(degs, vec![2, 1]);
    }

    #[test]
    fn partial_degrees_grow_by_at_most_one() {
        use crate::rng::SplitMix64;
        let f = f101();
        let mut rng = SplitMix64::new(0xABCD);
        for _ in 0..20 {
            let len = rng.next_in(1, 5) as usize;
            let mats: Vec<LinearMatrix> = (0..len)
                .map(|_| {
                    let entries = (0..4)
                        .map(|_| {
                            let mut l = LinearFunction::constant(f, rng.next_below(101));
                            for v in 1..=2 {
                                l.set_coeff(v, rng.next_below(101));
                            }
                            l
                        })
                        .collect();
                    LinearMatrix::new(2, entries)
                })
                .collect();
            let seq = LinearMatrixSequence::new(f, 2, mats);
            let degs = seq.partial_product_degrees(100_000).unwrap();
            for t in 0..degs.len() - 1 {
                assert!(degs[t] <= degs[t + 1] + 1, "suffix degree jumped by more than one");
            }
        }
    }

    #[test]
    fn upper_triangular_diagonal_factorization() {
        use crate::rng::SplitMix64;
        let f = f101();
        let mut rng = SplitMix64::new(0x1234);
        for _ in 0..20 {
            let len = rng.next_in(1, 4) as usize;
            let mats: Vec<LinearMatrix> = (0..len)
                .map(|_| {
                    let rand_lf = |rng: &mut SplitMix64| {
                        let mut l = LinearFunction::constant(f, rng.next_below(101));
                        for v in 1..=2 {
                            l.set_coeff(v, rng.next_below(101));
                        }
                        l
                    };
                    let e00 = rand_lf(&mut rng);
                    let e01 = rand_lf(&mut rng);
                    let e11 = rand_lf(&mut rng);
                    LinearMatrix::new(2, vec![e00, e01, LinearFunction::zero(f), e11])
                })
                .collect();
            let seq = LinearMatrixSequence::new(f, 2, mats.clone());
            let grid = seq.expand(100_000).unwrap();
            // stays upper triangular
            assert!(grid[2].is_zero());
            // each diagonal is the product of the matching diagonals
            let mut d0 = SparsePoly::constant(f, 1);
            let mut d1 = SparsePoly::constant(f, 1);
            for m in &mats {
                d0 = d0.mul(&m.get(0, 0).to_poly());
                d1 = d1.mul(&m.get(1, 1).to_poly());
            }
            assert_eq!(grid[0], d0);
            assert_eq!(grid[3], d1);
        }
    }

    #[test]
    fn transvection_shape_check() {
        let f = f101();
        let t = LinearMatrix::transvection(f, 3, 2, 0, lf(f, 0, &[(1, 5)]));
        assert!(t.is_transvection());
        assert!(LinearMatrix::identity(f, 3).is_transvection());
        let mut bad = LinearMatrix::identity(f, 3);
        *bad.get_mut(0, 1) = lf(f, 1, &[(1, 1)]); // two terms: not single-term
        assert!(!bad.is_transvection());
    }

    #[test]
    fn abp_eval_matches_expand() {
        let f = f101();
        // source -> {a, b} -> sink with labels x1, x2 (top) and z, x1 (bottom)
        let abp = Abp::new(
            f,
            vec![1, 2, 1],
            vec![
                vec![
                    AbpEdge { from: 0, to: 0, label: lf(f, 0, &[(1, 1)]) },
                    AbpEdge { from: 0, to: 1, label: lf(f, 0, &[(0, 1)]) },
                ],
                vec![
                    AbpEdge { from: 0, to: 0, label: lf(f, 0, &[(2, 1)]) },
                    AbpEdge { from: 1, to: 0, label: lf(f, 0, &[(1, 1)]) },
                ],
            ],
        );
        assert_eq!(abp.width(), 2);
        assert!(abp.is_planar());
        assert!(abp.uses_z());
        let p = abp.expand(1000).unwrap();
        for (xs, z) in [([2u64, 3], 1u64), ([5, 7], 4), ([0, 9], 2)] {
            assert_eq!(abp.eval_at(&xs, z).unwrap(), p.eval_at(&xs, z).unwrap());
        }
        // x1*x2 + z*x1 at (2,3,z=1) = 6 + 2 = 8
        assert_eq!(abp.eval(&[2, 3]).unwrap(), 8);
    }

    #[test]
    fn crossing_edges_fail_pattern_test() {
        let f = f101();
        let abp = Abp::new(
            f,
            vec![1, 2, 2, 1],
            vec![
                vec![
                    AbpEdge { from: 0, to: 0, label: lf(f, 0, &[(1, 1)]) },
                    AbpEdge { from: 0, to: 1, label: lf(f, 0, &[(1, 1)]) },
                ],
                vec![
                    AbpEdge { from: 0, to: 1, label: lf(f, 0, &[(1, 1)]) },
                    AbpEdge { from: 1, to: 0, label: lf(f, 0, &[(2, 1)]) },
                ],
                vec![AbpEdge { from: 0, to: 0, label: lf(f, 0, &[(1, 1)]) }],
            ],
        );
        assert!(!abp.is_planar());
    }

    #[test]
    fn expand_then_eval_agrees_across_representations() {
        use crate::rng::SplitMix64;
        let f = f101();
        let mut rng = SplitMix64::new(0xFEED);
        for _ in 0..30 {
            let s = rng.next_in(1, 3) as usize;
            let d = rng.next_in(1, 3) as usize;
            let n = rng.next_in(1, 3) as u32;
            let products: Vec<Vec<LinearFunction>> = (0..s)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            let mut l = LinearFunction::constant(f, rng.next_below(101));
                            for v in 1..=n {
                                l.set_coeff(v, rng.next_below(101));
                            }
                            l
                        })
                        .collect()
                })
                .collect();
            let c = DepthThreeCircuit::new(f, products);
            let p = c.expand(100_000).unwrap();
            for _ in 0..20 {
                let xs: Vec<u64> = (0..n).map(|_| rng.next_below(101)).collect();
                assert_eq!(c.eval(&xs).unwrap(), p.eval(&xs).unwrap());
            }
        }
    }
}
