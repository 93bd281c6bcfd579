//! Dense matrices over a prime field.
//!
//! Small and unashamedly cubic: every matrix in this crate is at most a
//! regular representation of an algebra of single-digit dimension, so the
//! only things that matter are correctness and a deterministic elimination
//! order. Row reduction always pivots on the lowest-index row available,
//! which keeps reduced forms canonical across runs.

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>, // row-major
}

impl Mat {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Mat {
        Mat { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m[(i, i)] = 1 % field.modulus();
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Mat {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { field, rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        assert_eq!(self.field, other.field);
        let f = self.field;
        let mut out = Mat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other[(l, j)]);
                    out[(i, j)] = f.add(out[(i, j)], t);
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Determinant by Gaussian elimination on a working copy.
    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let f = self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1 % f.modulus();
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[(r, col)] != 0);
            let Some(pr) = pivot else { return 0 };
            if pr != col {
                for j in 0..n {
                    let t = m[(pr, j)];
                    m[(pr, j)] = m[(col, j)];
                    m[(col, j)] = t;
                }
                det = f.neg(det);
            }
            let pv = m[(col, col)];
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(m[(r, col)], inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let t = f.mul(factor, m[(col, j)]);
                    m[(r, j)] = f.sub(m[(r, j)], t);
                }
            }
        }
        det
    }

    /// Reduced row echelon form and the pivot columns, in order.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..m.cols {
            if next_row == m.rows {
                break;
            }
            let pivot = (next_row..m.rows).find(|&r| m[(r, col)] != 0);
            let Some(pr) = pivot else { continue };
            if pr != next_row {
                for j in 0..m.cols {
                    let t = m[(pr, j)];
                    m[(pr, j)] = m[(next_row, j)];
                    m[(next_row, j)] = t;
                }
            }
            let inv = f.inv(m[(next_row, col)]).expect("pivot is nonzero");
            for j in 0..m.cols {
                m[(next_row, j)] = f.mul(m[(next_row, j)], inv);
            }
            for r in 0..m.rows {
                if r == next_row || m[(r, col)] == 0 {
                    continue;
                }
                let factor = m[(r, col)];
                for j in 0..m.cols {
                    let t = f.mul(factor, m[(next_row, j)]);
                    m[(r, j)] = f.sub(m[(r, j)], t);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = u64;
    fn index(&self, (r, c): (usize, usize)) -> &u64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

/// Solves `a * x = b` for one solution (free variables set to zero).
/// Returns `None` when the system is inconsistent.
pub fn solve(a: &Mat, b: &[u64]) -> Option<Vec<u64>> {
    assert_eq!(a.rows(), b.len());
    let f = a.field();
    let mut aug = Mat::zero(f, a.rows(), a.cols() + 1);
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            aug[(r, c)] = a[(r, c)];
        }
        aug[(r, a.cols())] = b[r];
    }
    let (red, pivots) = aug.rref();
    // A pivot in the augmented column means 0 = 1.
    if pivots.contains(&a.cols()) {
        return None;
    }
    let mut x = vec![0u64; a.cols()];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = red[(row, a.cols())];
    }
    Some(x)
}
