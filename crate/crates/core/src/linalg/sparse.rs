use alloc::vec::Vec;

use super::matrix::{ComplexMatrix, C64};

/// Sparse Hermitian matrix stored as its upper triangle.
///
/// Entries with `row < col` implicitly carry the conjugate mirror entry;
/// diagonal entries are kept real.  Used for the trace-pairing constraint
/// matrices of the SDP layer, which are extremely sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHerm {
    side: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseHerm {
    pub fn new(side: usize) -> Self {
        Self {
            side,
            entries: Vec::new(),
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Upper-triangle entries `(row, col, value)` with `row <= col`.
    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// Accumulates `v` at `(i, j)`, folding lower-triangle input into the
    /// stored upper triangle.
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i < self.side && j < self.side);
        let (r, c, val) = if i <= j { (i, j, v) } else { (j, i, v.conj()) };
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == r && e.1 == c) {
            e.2 += val;
        } else {
            self.entries.push((r, c, val));
        }
    }

    /// Drops entries with magnitude at or below `tol` (exact zeros by default).
    pub fn prune(&mut self, tol: f64) {
        self.entries.retain(|e| e.2.norm() > tol);
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        let mut out = Self::new(m.rows());
        for i in 0..m.rows() {
            for j in i..m.cols() {
                let v = if i == j {
                    C64::new(m.at(i, i).re, 0.0)
                } else {
                    // Average the two triangles so near-Hermitian input maps
                    // to an exactly Hermitian operator.
                    (m.at(i, j) + m.at(j, i).conj()) * 0.5
                };
                if v.norm() > 0.0 {
                    out.entries.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.side, self.side);
        for &(i, j, v) in &self.entries {
            if i == j {
                m.add_at(i, i, C64::new(v.re, 0.0));
            } else {
                m.add_at(i, j, v);
                m.add_at(j, i, v.conj());
            }
        }
        m
    }

    /// Real pairing `tr(M X)` against a Hermitian `X`.
    pub fn pair(&self, x: &ComplexMatrix) -> f64 {
        let mut acc = 0.0;
        for &(i, j, v) in &self.entries {
            if i == j {
                acc += v.re * x.at(i, i).re;
            } else {
                // v * X_ji + conj(v) * X_ij = 2 Re(v * X_ji)
                let z = v * x.at(j, i);
                acc += 2.0 * z.re;
            }
        }
        acc
    }

    /// Frobenius inner product with another sparse Hermitian operator.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.side, other.side);
        let mut acc = 0.0;
        for &(i, j, v) in &self.entries {
            for &(r, c, w) in &other.entries {
                if i == r && j == c {
                    if i == j {
                        acc += v.re * w.re;
                    } else {
                        acc += 2.0 * (v.conj() * w).re;
                    }
                }
            }
        }
        acc
    }

    pub fn fro_norm(&self) -> f64 {
        let mut acc = 0.0;
        for &(i, j, v) in &self.entries {
            acc += if i == j { v.re * v.re } else { 2.0 * v.norm_sqr() };
        }
        super::scalar::sqrt(acc)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            side: self.side,
            entries: self
                .entries
                .iter()
                .map(|&(i, j, v)| (i, j, v * s))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_pairing() {
        let mut m = ComplexMatrix::zeros(3, 3);
        m.set(0, 0, C64::new(2.0, 0.0));
        m.set(0, 2, C64::new(1.0, -0.5));
        m.set(2, 0, C64::new(1.0, 0.5));
        m.set(1, 1, C64::new(-1.0, 0.0));
        let s = SparseHerm::from_dense(&m);
        assert_eq!(s.to_dense(), m);

        let mut x = ComplexMatrix::identity(3);
        x.set(0, 2, C64::new(0.25, 0.75));
        x.set(2, 0, C64::new(0.25, -0.75));
        let x = x.hermitize();
        let direct = s.to_dense().mul(&x).trace().re;
        assert!((s.pair(&x) - direct).abs() < 1e-14);
    }
}
