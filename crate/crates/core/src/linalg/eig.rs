use alloc::vec::Vec;

use super::matrix::{ComplexMatrix, C64};
use super::scalar;
use super::LinalgError;

/// Hermitian eigendecomposition by cyclic Jacobi.
///
/// Returns eigenvalues sorted descending and the matching orthonormal
/// eigenvector columns, so that `m = V diag(lambda) V^dag`.  The sweep order
/// is fixed (row-major over the upper triangle), which makes the result
/// deterministic for a given input.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(alloc::format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > 1e-10 {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }
    Ok(jacobi(&m.hermitize()))
}

/// Core Jacobi iteration; input must already be exactly Hermitian.
pub(crate) fn jacobi(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.fro_norm().max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..64 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.at(p, q).norm_sqr();
            }
        }
        if scalar::sqrt(2.0 * off) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, tol);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| v.at(i, order[j]));
    (vals, vecs)
}

/// One complex Jacobi rotation annihilating the (p,q) entry.
///
/// With the 2x2 block [[alpha, g],[conj(g), beta]] and w = g/|g|, the unitary
/// U = [[c, -s*w],[s*conj(w), c]] zeroes the off-diagonal entry when
/// tan(2*theta) = 2|g|/(alpha - beta).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, tol: f64) {
    let g = a.at(p, q);
    let gn = g.norm();
    if gn <= tol * 1e-2 {
        return;
    }
    let w = g / gn;
    let alpha = a.at(p, p).re;
    let beta = a.at(q, q).re;

    let tau = (alpha - beta) / (2.0 * gn);
    let t = if tau >= 0.0 {
        1.0 / (tau + scalar::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + scalar::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / scalar::sqrt(1.0 + t * t);
    let s = t * c;

    let n = a.rows();
    // Columns p and q of A <- A U.
    for k in 0..n {
        let akp = a.at(k, p);
        let akq = a.at(k, q);
        a.set(k, p, akp * c + akq * s * w.conj());
        a.set(k, q, akq * c - akp * s * w);
    }
    // Rows p and q of A <- U^dag A.
    for k in 0..n {
        let apk = a.at(p, k);
        let aqk = a.at(q, k);
        a.set(p, k, apk * c + aqk * s * w);
        a.set(q, k, aqk * c - apk * s * w.conj());
    }
    // Clean the rotated 2x2 block.
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    a.set(p, p, C64::new(a.at(p, p).re, 0.0));
    a.set(q, q, C64::new(a.at(q, q).re, 0.0));

    for k in 0..n {
        let vkp = v.at(k, p);
        let vkq = v.at(k, q);
        v.set(k, p, vkp * c + vkq * s * w.conj());
        v.set(k, q, vkq * c - vkp * s * w);
    }
}

/// Rebuilds `V f(diag) V^dag` from an eigendecomposition.
pub(crate) fn from_eigen(vals: &[f64], vecs: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = vecs.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let flam = f(lam);
        if flam == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs.at(i, k);
            if vik.re == 0.0 && vik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out.add_at(i, j, vik * vecs.at(j, k).conj() * flam);
            }
        }
    }
    out
}
