//! Dense real symmetric matrix kernel for the interior-point solver: block
//! storage, Jacobi eigendecomposition, Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::scalar;

/// Dense square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RealMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &r) in dst.iter_mut().zip(row) {
                    *d += a * r;
                }
            }
        }
        out
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        scalar::sqrt(self.dot(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Eigendecomposition of a symmetric matrix via cyclic Jacobi; returns
    /// eigenvalues descending and the orthogonal eigenvector columns.
    pub fn eig_sym(&self) -> (Vec<f64>, RealMatrix) {
        let n = self.n;
        let mut a = self.clone();
        a.symmetrize();
        let mut v = RealMatrix::identity(n);
        let scale = a.fro_norm().max(1.0);
        let tol = 1e-15 * scale;

        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.at(p, q) * a.at(p, q);
                }
            }
            if scalar::sqrt(2.0 * off) <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = a.at(p, q);
                    if g.abs() <= tol * 1e-2 {
                        continue;
                    }
                    let alpha = a.at(p, p);
                    let beta = a.at(q, q);
                    let tau = (alpha - beta) / (2.0 * g);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + scalar::sqrt(1.0 + tau * tau))
                    } else {
                        -1.0 / (-tau + scalar::sqrt(1.0 + tau * tau))
                    };
                    let c = 1.0 / scalar::sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.at(k, p);
                        let akq = a.at(k, q);
                        a.set(k, p, akp * c + akq * s);
                        a.set(k, q, akq * c - akp * s);
                    }
                    for k in 0..n {
                        let apk = a.at(p, k);
                        let aqk = a.at(q, k);
                        a.set(p, k, apk * c + aqk * s);
                        a.set(q, k, aqk * c - apk * s);
                    }
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    for k in 0..n {
                        let vkp = v.at(k, p);
                        let vkq = v.at(k, q);
                        v.set(k, p, vkp * c + vkq * s);
                        v.set(k, q, vkq * c - vkp * s);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a.at(i, i)).collect();
        order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut vecs = RealMatrix::zeros(n);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vecs.set(i, newj, v.at(i, oldj));
            }
        }
        (vals, vecs)
    }

    /// `V f(lambda) V^T` from an eigendecomposition.
    pub fn from_eigen(vals: &[f64], vecs: &RealMatrix, f: impl Fn(f64) -> f64) -> RealMatrix {
        let n = vecs.n;
        let mut out = RealMatrix::zeros(n);
        for (k, &lam) in vals.iter().enumerate() {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = vecs.at(i, k) * fl;
                if vik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += vik * vecs.at(j, k);
                }
            }
        }
        out
    }

    /// Lower-triangular Cholesky factor of `self + reg*I`; `None` if a pivot
    /// collapses.
    pub fn cholesky(&self, reg: f64) -> Option<RealMatrix> {
        let n = self.n;
        let mut l = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.at(i, j);
                if i == j {
                    sum += reg;
                }
                for k in 0..j {
                    sum -= l.at(i, k) * l.at(j, k);
                }
                if i == j {
                    if sum <= 0.0 {
                        return None;
                    }
                    l.set(i, i, scalar::sqrt(sum));
                } else {
                    l.set(i, j, sum / l.at(j, j));
                }
            }
        }
        Some(l)
    }

    /// Solves `L L^T x = rhs` given the lower factor.
    pub fn chol_solve(l: &RealMatrix, rhs: &[f64]) -> Vec<f64> {
        let n = l.n;
        debug_assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut sum = x[i];
            for k in 0..i {
                sum -= l.at(i, k) * x[k];
            }
            x[i] = sum / l.at(i, i);
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            for k in (i + 1)..n {
                sum -= l.at(k, i) * x[k];
            }
            x[i] = sum / l.at(i, i);
        }
        x
    }
}
