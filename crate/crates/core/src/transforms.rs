//! Structure-preserving rewrites between circuit shapes.
//!
//! The centerpiece lowers a sum of products of linear forms into a single
//! product of 2x2 upper-triangular matrices with linear entries, such that
//! the (1,2) entry of the product is `L * f` for an explicit product of
//! linear forms `L`. Around it sit the reverse translation (reading the
//! entries of an upper-triangular product back as depth-three circuits),
//! homogenization of such a product into a planar width-2 branching
//! program, a simulation of arbitrary fan-in-2 formulas by 3x3 elementary
//! matrices, and a reduction that re-expresses a depth-three circuit as a
//! single product of linear terms with coefficients in a small local ring.

use crate::algebra::{AlgebraBasis, AlgebraTermCircuit};
use crate::circuit::{
    Abp, AbpEdge, DepthThreeCircuit, Formula, FormulaNode, LinearMatrix, LinearMatrixSequence,
};
use crate::error::Error;
use crate::field::Field;
use crate::poly::{LinearFunction, SparsePoly};

// ---------------------------------------------------------------------------
// Depth-three circuit -> 2x2 upper-triangular product
// ---------------------------------------------------------------------------

/// Output of [`sps_to_u2`]: a matrix product whose (1,2) entry equals
/// `(product of l_factors) * f`, where `f` is the polynomial computed by
/// the source circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredU2 {
    /// The 2x2 matrix product (no masks set).
    pub seq: LinearMatrixSequence,
    /// The multiplier `L` as an explicit list of linear forms.
    pub l_factors: Vec<LinearFunction>,
    /// Variable count of the source circuit.
    pub n: u32,
    /// Degree of the source circuit (longest product).
    pub d: usize,
    /// Summand count of the source circuit.
    pub s: usize,
    /// True when every summand contained a zero linear form, so the source
    /// is syntactically the zero polynomial and `seq` is just the identity.
    pub syntactic_zero: bool,
}

impl LoweredU2 {
    /// `L` as a polynomial (the empty product is 1).
    pub fn l_product(&self) -> SparsePoly {
        let mut p = SparsePoly::constant(self.seq.field, 1);
        for l in &self.l_factors {
            p = p.mul(&l.to_poly());
        }
        p
    }

    /// The sequence with the off-diagonal masks applied, so the product
    /// grid is zero except for `L * f` in the (1,2) slot.
    pub fn masked(&self) -> LinearMatrixSequence {
        mask_offdiagonal(&self.seq)
    }
}

/// One operand of the pairwise merge: a list of already-emitted factor
/// matrices whose product is
///
/// ```text
/// [ prod(l1)   prod(l2) * g ]
/// [    0         prod(l3)   ]
/// ```
///
/// where `g` is the sum of the original summands folded in so far. Only
/// the factor lists are tracked; `g` is implied.
struct Partial {
    matrices: Vec<LinearMatrix>,
    l1: Vec<LinearFunction>,
    l2: Vec<LinearFunction>,
    l3: Vec<LinearFunction>,
}

fn diag(field: Field, a: LinearFunction, b: LinearFunction) -> LinearMatrix {
    LinearMatrix::new(2, vec![a, LinearFunction::zero(field), LinearFunction::zero(field), b])
}

/// Base emission for one summand `l_1 * ... * l_d` (all nonzero):
/// `diag(l_1,1) .. diag(l_(d-1),1)` followed by `[[1, l_d],[0,1]]`, the
/// latter expanded term by term so every factor is either diagonal or a
/// single-term elementary matrix. The product is
/// `[[L', L' * l_d],[0, 1]]` with `L' = l_1 .. l_(d-1)`.
fn base_partial(field: Field, factors: &[LinearFunction]) -> Partial {
    let one = LinearFunction::constant(field, 1);
    let d = factors.len();
    let mut matrices = Vec::new();
    let mut l1 = Vec::new();
    for l in &factors[..d - 1] {
        matrices.push(diag(field, l.clone(), one.clone()));
        l1.push(l.clone());
    }
    let last = &factors[d - 1];
    debug_assert!(!last.is_zero(), "zero summands are deleted before lowering");
    let c = last.constant_term();
    if c != 0 {
        matrices.push(LinearMatrix::transvection(field, 2, 0, 1, LinearFunction::constant(field, c)));
    }
    for (v, cv) in last.coeff_pairs() {
        matrices.push(LinearMatrix::transvection(field, 2, 0, 1, LinearFunction::term(field, cv, v)));
    }
    Partial { matrices, l1, l2: Vec::new(), l3: Vec::new() }
}

/// Merges two partial products into one. A run of diagonal correction
/// matrices `diag(A_t, B_t)` is inserted between them, where the `A` list
/// is `x.l2 + y.l3` and the `B` list is `x.l1 + y.l2`, padded with 1 to
/// the longer length (and omitted entirely when both are empty). This
/// makes both halves of the new off-diagonal entry share the common
/// factor `prod(x.l1 + x.l2 + y.l2 + y.l3)`, so the tracked sums add.
fn merge(field: Field, x: Partial, y: Partial) -> Partial {
    let one = LinearFunction::constant(field, 1);
    let a: Vec<&LinearFunction> = x.l2.iter().chain(y.l3.iter()).collect();
    let b: Vec<&LinearFunction> = x.l1.iter().chain(y.l2.iter()).collect();
    let mut matrices = x.matrices;
    for t in 0..a.len().max(b.len()) {
        let top = a.get(t).map_or_else(|| one.clone(), |l| (*l).clone());
        let bot = b.get(t).map_or_else(|| one.clone(), |l| (*l).clone());
        matrices.push(diag(field, top, bot));
    }
    matrices.extend(y.matrices);
    let cat = |parts: [&[LinearFunction]; 4]| -> Vec<LinearFunction> {
        parts.concat()
    };
    let l1 = cat([&x.l1, &x.l2, &y.l1, &y.l3]);
    let l2 = cat([&x.l1, &x.l2, &y.l2, &y.l3]);
    let l3 = cat([&x.l1, &x.l3, &y.l2, &y.l3]);
    Partial { matrices, l1, l2, l3 }
}

/// Lowers a depth-three circuit to a product of 2x2 upper-triangular
/// matrices, each either diagonal or an elementary matrix with a single
/// term off the diagonal.
///
/// Summands containing a zero linear form are deleted first (they compute
/// zero); if nothing survives, the result is flagged `syntactic_zero` and
/// the sequence is a lone identity matrix. Survivors are padded with
/// constant-1 factors to a common degree, emitted individually, and then
/// folded pairwise left to right in `ceil(log2 s)` rounds, carrying an
/// unpaired operand to the next round. The resulting (1,2) entry is
/// `prod(l_factors) * f` exactly, and the factor count stays within
/// `(d + n) * 4^ceil(log2 s)`.
pub fn sps_to_u2(circuit: &DepthThreeCircuit) -> LoweredU2 {
    let field = circuit.field;
    let n = circuit.num_vars();
    let d = circuit.degree();
    let s = circuit.fanin();
    let survivors: Vec<Vec<LinearFunction>> = circuit
        .products
        .iter()
        .filter(|p| p.iter().all(|l| !l.is_zero()))
        .cloned()
        .collect();
    if survivors.is_empty() {
        let seq = LinearMatrixSequence::new(field, 2, vec![LinearMatrix::identity(field, 2)]);
        return LoweredU2 { seq, l_factors: Vec::new(), n, d, s, syntactic_zero: true };
    }
    let normalized = DepthThreeCircuit::new(field, survivors).normalize_degree();
    let mut layer: Vec<Partial> =
        normalized.products.iter().map(|p| base_partial(field, p)).collect();
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(merge(field, x, y)),
                None => next.push(x),
            }
        }
        layer = next;
    }
    let result = layer.pop().expect("at least one summand survived");
    let seq = LinearMatrixSequence::new(field, 2, result.matrices);
    LoweredU2 { seq, l_factors: result.l2, n, d, s, syntactic_zero: false }
}

/// Applies the rank-one boundary masks that zero out everything except the
/// (1,2) entry of the product: `[[1,0],[0,0]]` on the left and
/// `[[0,0],[0,1]]` on the right.
pub fn mask_offdiagonal(seq: &LinearMatrixSequence) -> LinearMatrixSequence {
    assert_eq!(seq.k, 2, "off-diagonal masking is a 2x2 operation");
    let mut masked = seq.clone();
    masked.left_mask = Some(vec![1, 0, 0, 0]);
    masked.right_mask = Some(vec![0, 0, 0, 1]);
    masked
}

// ---------------------------------------------------------------------------
// 2x2 upper-triangular product -> depth-three circuits
// ---------------------------------------------------------------------------

/// Reads the three live entries of an upper-triangular 2x2 product back as
/// depth-three circuits, returned as `[top-left, off-diagonal,
/// bottom-right]`. Masks on the sequence are ignored; the translation
/// describes the bare product.
///
/// With diagonals `a_j`, `c_j` and off-diagonal entries `b_j`, the product
/// entries are `a_1..a_t`, `c_1..c_t`, and the `t`-summand sum whose `j`-th
/// summand is `a_1..a_(j-1) * b_j * c_(j+1)..c_t`. Summands with a zero
/// `b_j` are kept, so every translated circuit has exactly `t` summands of
/// degree `t`.
pub fn u2_to_sps(seq: &LinearMatrixSequence) -> Result<[DepthThreeCircuit; 3], Error> {
    if seq.k != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: seq.k });
    }
    for (index, m) in seq.matrices.iter().enumerate() {
        if !m.is_upper_triangular() {
            return Err(Error::NotUpperTriangular { index });
        }
    }
    let field = seq.field;
    let t = seq.matrices.len();
    let a: Vec<LinearFunction> = seq.matrices.iter().map(|m| m.get(0, 0).clone()).collect();
    let b: Vec<LinearFunction> = seq.matrices.iter().map(|m| m.get(0, 1).clone()).collect();
    let c: Vec<LinearFunction> = seq.matrices.iter().map(|m| m.get(1, 1).clone()).collect();
    let top = DepthThreeCircuit::new(field, vec![a.clone()]);
    let bottom = DepthThreeCircuit::new(field, vec![c.clone()]);
    let mut products = Vec::with_capacity(t);
    for j in 0..t {
        let mut p = Vec::with_capacity(t);
        p.extend_from_slice(&a[..j]);
        p.push(b[j].clone());
        p.extend_from_slice(&c[j + 1..]);
        products.push(p);
    }
    let off = DepthThreeCircuit::new(field, products);
    Ok([top, off, bottom])
}

// ---------------------------------------------------------------------------
// Homogenization into a planar width-2 branching program
// ---------------------------------------------------------------------------

/// Homogenizes a lowered 2x2 product and rebuilds it as a planar branching
/// program of width 2 computing the degree-`t` homogenization of the
/// product's (1,2) entry, where `t` is the factor count. Setting `z = 1`
/// recovers the entry itself (`L * f` for a lowered circuit).
///
/// Every constant term `a` becomes `a * z`, so each edge label is a
/// homogeneous linear form and every source-to-sink path has exactly `t`
/// edges. The off-diagonal masks are realized structurally: the first gap
/// keeps only row 1 of the first matrix and the last gap only column 2 of
/// the last one, so no mask matrices remain.
///
/// The input must use only matrices that lowering produces -- diagonal, or
/// unit diagonal with a single term in the (1,2) slot -- and must not use
/// the homogenizing variable itself.
pub fn homogenize_and_abp(seq: &LinearMatrixSequence) -> Result<Abp, Error> {
    if seq.k != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: seq.k });
    }
    if seq.uses_z() {
        return Err(Error::WrongInput {
            msg: "input already uses the homogenizing variable z".to_string(),
        });
    }
    for (index, m) in seq.matrices.iter().enumerate() {
        let diagonal = m.get(0, 1).is_zero() && m.get(1, 0).is_zero();
        let unit_single_term = m.get(1, 0).is_zero()
            && m.get(0, 0).as_constant() == Some(1)
            && m.get(1, 1).as_constant() == Some(1)
            && m.get(0, 1).single_term().is_some();
        if !(diagonal || unit_single_term) {
            return Err(Error::UnsupportedShape { index });
        }
    }
    let field = seq.field;
    let t = seq.matrices.len();
    let mut levels = Vec::with_capacity(t + 1);
    levels.push(1);
    levels.extend(std::iter::repeat(2).take(t.saturating_sub(1)));
    levels.push(1);
    let entry = |g: usize, i: usize, j: usize| seq.matrices[g].get(i, j).homogenize();
    let mut gaps: Vec<Vec<AbpEdge>> = Vec::with_capacity(t);
    for g in 0..t {
        let mut edges = Vec::new();
        // Source row for the first matrix, sink column for the last;
        // matrix row/column index 0 or 1 maps straight onto the two
        // vertices of the inner levels.
        let (rows, source_contracted) = if g == 0 { (0..1, true) } else { (0..2, false) };
        for i in rows {
            for j in 0..2 {
                if t >= 2 && g == t - 1 && j != 1 {
                    continue;
                }
                if t == 1 && j != 1 {
                    // a single matrix is contracted on both sides
                    continue;
                }
                let label = entry(g, if source_contracted { 0 } else { i }, j);
                if label.is_zero() {
                    continue;
                }
                let to = if g == t - 1 { 0 } else { j };
                edges.push(AbpEdge { from: i, to, label });
            }
        }
        gaps.push(edges);
    }
    Ok(Abp::new(field, levels, gaps))
}

// ---------------------------------------------------------------------------
// Formula -> 3x3 elementary-matrix product
// ---------------------------------------------------------------------------

/// Compiles a fan-in-2 formula into a product of 3x3 elementary matrices
/// (identity plus one single-term entry off the diagonal) whose product is
/// the identity except for the formula's polynomial in the (3,1) entry.
/// The factor count is at most `4^depth`.
pub fn ben_or_cleve(formula: &Formula) -> LinearMatrixSequence {
    let field = formula.field;
    let mut out = Vec::new();
    emit(field, &formula.root, 2, 0, 1, &mut out);
    LinearMatrixSequence::new(field, 3, out)
}

/// Emits matrices whose product is `I + sigma * e * E(i,j)` for the
/// polynomial `e` of the node, with `i != j`.
///
/// A product node with children `e1, e2` routes through the third
/// register `m`: the four-block commutator
/// `(I - e2 E(m,j)) (I + sigma e1 E(i,m)) (I + e2 E(m,j)) (I - sigma e1 E(i,m))`
/// collapses to `I + sigma e1 e2 E(i,j)` because `E(m,j) E(i,m)`,
/// `E(m,j)^2` and `E(i,m)^2` all vanish. Sums concatenate; leaves are a
/// single elementary matrix.
fn emit(field: Field, node: &FormulaNode, i: usize, j: usize, sigma: u64, out: &mut Vec<LinearMatrix>) {
    debug_assert_ne!(i, j);
    match node {
        FormulaNode::Leaf { coeff, var } => {
            let c = field.mul(field.reduce(*coeff), sigma);
            let l = match var {
                Some(v) => LinearFunction::term(field, c, *v),
                None => LinearFunction::constant(field, c),
            };
            out.push(LinearMatrix::transvection(field, 3, i, j, l));
        }
        FormulaNode::Add(e1, e2) => {
            emit(field, e1, i, j, sigma, out);
            emit(field, e2, i, j, sigma, out);
        }
        FormulaNode::Mul(e1, e2) => {
            let m = 3 - i - j;
            emit(field, e2, m, j, field.neg(1), out);
            emit(field, e1, i, m, sigma, out);
            emit(field, e2, m, j, 1, out);
            emit(field, e1, i, m, field.neg(sigma), out);
        }
    }
}

// ---------------------------------------------------------------------------
// Depth-three circuit -> one product over a local ring
// ---------------------------------------------------------------------------

/// The commutative local ring `F[y_1, .., y_s] / I` on the basis
/// `{1, y_1, .., y_1^d, y_2, .., y_2^(d-1), .., y_s, .., y_s^(d-1)}`,
/// where `I` identifies all `d`-th powers (`y_i^d = y_1^d`) and kills
/// products of distinct generators and anything of degree above `d`.
/// Dimension `s(d-1) + 2`; for `d = 1` all generators coincide and the
/// ring degenerates to the dual numbers.
pub fn power_sum_local_ring(field: Field, s: usize, d: usize) -> AlgebraBasis {
    assert!(s >= 1 && d >= 1, "need at least one generator and degree one");
    let dim = s * (d - 1) + 2;
    // Basis layout: 0 is the unit; (generator g, power a) sits at
    // `a` for g = 1 and at `d + (g-2)(d-1) + a` for g >= 2.
    let idx = |g: usize, a: usize| -> usize {
        if g == 1 {
            a
        } else {
            d + (g - 2) * (d - 1) + a
        }
    };
    // Inverse of the layout: which (generator, power) a basis slot holds.
    let gen_of = |i: usize| -> (usize, usize) {
        if i <= d {
            (1, i)
        } else {
            let r = i - d - 1;
            (2 + r / (d - 1), 1 + r % (d - 1))
        }
    };
    let mut structure = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut row = vec![0u64; dim];
            if i == 0 {
                row[j] = 1;
            } else if j == 0 {
                row[i] = 1;
            } else {
                let (g, a) = gen_of(i);
                let (h, b) = gen_of(j);
                if g == h {
                    if a + b < d {
                        row[idx(g, a + b)] = 1;
                    } else if a + b == d {
                        row[idx(1, d)] = 1;
                    }
                }
            }
            structure.push(row);
        }
    }
    let mut identity = vec![0u64; dim];
    identity[0] = 1;
    AlgebraBasis::new(field, dim, structure, identity).expect("ring table is valid by construction")
}

/// Rewrites a depth-three circuit with `s` summands of degree `d` as a
/// single product of `d` linear terms with coefficients in
/// [`power_sum_local_ring`]: term `j` is `sum_i y_i * l_(i,j)`. Cross
/// terms between distinct generators vanish and the surviving diagonal
/// collapses onto `y_1^d`, so the product evaluates to `f * y_1^d` -- the
/// circuit's polynomial shows up as that single coordinate.
pub fn local_ring_reduction(
    circuit: &DepthThreeCircuit,
) -> Result<(AlgebraBasis, AlgebraTermCircuit), Error> {
    let field = circuit.field;
    let normalized = circuit.normalize_degree();
    let s = normalized.fanin();
    let d = normalized.degree();
    let n = normalized.num_vars();
    for p in &normalized.products {
        if p.iter().any(|l| l.uses_z()) {
            return Err(Error::WrongInput {
                msg: "variable z is reserved; circuits entering the local-ring reduction must avoid it"
                    .to_string(),
            });
        }
    }
    let ring = power_sum_local_ring(field, s, d);
    let gen_index = |i: usize| -> usize {
        // summand i (0-based) uses generator i+1; for d = 1 they coincide
        if i == 0 || d == 1 {
            1
        } else {
            d + (i - 1) * (d - 1) + 1
        }
    };
    let mut terms = Vec::with_capacity(d);
    for j in 0..d {
        let mut coeffs = vec![ring.zero(); n as usize + 1];
        for (i, product) in normalized.products.iter().enumerate() {
            let l = &product[j];
            let g = gen_index(i);
            let mut bump = |slot: usize, c: u64| {
                if c != 0 {
                    coeffs[slot].coords[g] = field.add(coeffs[slot].coords[g], c);
                }
            };
            bump(0, l.constant_term());
            for (v, c) in l.coeff_pairs() {
                bump(v as usize, c);
            }
        }
        terms.push(coeffs);
    }
    let term_circuit = AlgebraTermCircuit::new(ring.clone(), n, terms);
    Ok((ring, term_circuit))
}
