//! Primal-dual path-following interior-point method with Nesterov-Todd
//! scaling, run on the real symmetric embedding of the Hermitian blocks.
//!
//! Each complex block X is carried as `phi(X) = [[Re X, -Im X],[Im X, Re X]]`.
//! The embedding is an algebra homomorphism, so products, inverses and the
//! NT scaling point of embedded data stay inside the embedded subalgebra;
//! iterates are re-projected onto it every iteration to remove roundoff
//! drift.  Constraint data is kept sparse: Schur-complement columns cost
//! `O(rows(A_j) n^2)` instead of `O(n^3)`.

use alloc::vec;
use alloc::vec::Vec;

use super::real::RealMatrix;
use super::{SdpConfig, SdpError, SdpProblem, SdpSolution, SdpStatus, Sense};
use crate::linalg::{ComplexMatrix, SparseHerm, C64};

/// Sparse real symmetric matrix: full entry list plus its touched-row set.
struct SpReal {
    entries: Vec<(u32, u32, f64)>,
    rows: Vec<u32>,
}

impl SpReal {
    /// Real embedding of a sparse Hermitian operator, scaled by 1/2 so that
    /// pairings keep their complex values: `<emb(A), phi(X)> = <A, X>`.
    fn embed(h: &SparseHerm) -> Self {
        let n = h.side();
        let mut entries: Vec<(u32, u32, f64)> = Vec::new();
        let mut push = |r: usize, c: usize, v: f64| {
            if v != 0.0 {
                entries.push((r as u32, c as u32, 0.5 * v));
            }
        };
        for &(i, j, v) in h.entries() {
            if i == j {
                push(i, i, v.re);
                push(i + n, i + n, v.re);
            } else {
                push(i, j, v.re);
                push(j, i, v.re);
                push(i + n, j + n, v.re);
                push(j + n, i + n, v.re);
                push(i, j + n, -v.im);
                push(j + n, i, -v.im);
                push(j, i + n, v.im);
                push(i + n, j, v.im);
            }
        }
        // Sorted entry order enables merge-join inner products.
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut rows: Vec<u32> = entries.iter().map(|e| e.0).collect();
        rows.sort_unstable();
        rows.dedup();
        Self { entries, rows }
    }

    /// Frobenius inner product by merge-join over the sorted entry lists.
    fn dot(&self, other: &Self) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let mut acc = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            let ka = (a[i].0, a[i].1);
            let kb = (b[j].0, b[j].1);
            match ka.cmp(&kb) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc += a[i].2 * b[j].2;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    fn pair(&self, x: &RealMatrix) -> f64 {
        let n = x.n;
        self.entries
            .iter()
            .map(|&(r, c, v)| v * x.data[r as usize * n + c as usize])
            .sum()
    }

    fn add_into(&self, out: &mut RealMatrix, scale: f64) {
        let n = out.n;
        for &(r, c, v) in &self.entries {
            out.data[r as usize * n + c as usize] += scale * v;
        }
    }

    /// Dense `W * self * W` exploiting the sparse row structure.
    fn sandwich(&self, w: &RealMatrix) -> RealMatrix {
        let n = w.n;
        // V = self * W, nonzero only on `rows`.
        let mut v = vec![0.0f64; self.rows.len() * n];
        for &(r, c, val) in &self.entries {
            let slot = self.rows.binary_search(&r).unwrap();
            let wrow = &w.data[c as usize * n..(c as usize + 1) * n];
            let dst = &mut v[slot * n..(slot + 1) * n];
            for (d, &wv) in dst.iter_mut().zip(wrow) {
                *d += val * wv;
            }
        }
        // Out = W * V.
        let mut out = RealMatrix::zeros(n);
        for (slot, &r) in self.rows.iter().enumerate() {
            let vrow = &v[slot * n..(slot + 1) * n];
            for i in 0..n {
                let wir = w.data[i * n + r as usize];
                if wir == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &vv) in dst.iter_mut().zip(vrow) {
                    *d += wir * vv;
                }
            }
        }
        out
    }

    fn fro_norm(&self) -> f64 {
        crate::linalg::scalar::sqrt(self.entries.iter().map(|e| e.2 * e.2).sum())
    }
}

struct Embedded {
    block_sides: Vec<usize>,
    cons: Vec<Vec<SpReal>>,
    free: Vec<Vec<f64>>,
    b: Vec<f64>,
    objective: Vec<SpReal>,
    obj_free: Vec<f64>,
    num_free: usize,
}

pub(super) fn solve_with(
    problem: &SdpProblem,
    config: &SdpConfig,
) -> Result<SdpSolution, SdpError> {
    let flip = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    let block_sides: Vec<usize> = problem.sides.iter().map(|&s| 2 * s).collect();
    let mut emb = Embedded {
        block_sides: block_sides.clone(),
        cons: Vec::new(),
        free: Vec::new(),
        b: Vec::new(),
        objective: problem
            .objective
            .iter()
            .map(|h| {
                let mut e = SpReal::embed(h);
                for entry in e.entries.iter_mut() {
                    entry.2 *= flip;
                }
                e
            })
            .collect(),
        obj_free: problem.objective_free.iter().map(|&q| q * flip).collect(),
        num_free: problem.num_free,
    };
    for c in &problem.constraints {
        emb.cons.push(c.blocks.iter().map(SpReal::embed).collect());
        let mut f = c.free.clone();
        f.resize(problem.num_free, 0.0);
        emb.free.push(f);
        emb.b.push(c.rhs);
    }

    let kept = deduplicate(&mut emb)?;

    let mut sol = ipm(&emb, config)?;

    // Undo the sign flip and scatter dual values back to the original
    // constraint order.
    sol.primal_objective *= flip;
    sol.dual_objective *= flip;
    let mut dual = vec![0.0; problem.constraints.len()];
    for (slot, &orig) in kept.iter().enumerate() {
        dual[orig] = sol.dual[slot] * flip;
    }
    sol.dual = dual;
    Ok(sol)
}

/// Drops linearly dependent constraints (after checking their right-hand
/// sides are consistent) via an incremental Cholesky of the constraint Gram
/// matrix.  Returns the kept constraint indices.
fn deduplicate(emb: &mut Embedded) -> Result<Vec<usize>, SdpError> {
    let m = emb.cons.len();
    let mut kept: Vec<usize> = Vec::new();
    let mut l: Vec<Vec<f64>> = Vec::new(); // lower-triangular rows
    let mut kept_cons: Vec<Vec<SpReal>> = Vec::new();
    let mut kept_free: Vec<Vec<f64>> = Vec::new();
    let mut kept_b: Vec<f64> = Vec::new();

    let gram = |a: &[SpReal], fa: &[f64], b: &[SpReal], fb: &[f64]| -> f64 {
        let block_part: f64 = a.iter().zip(b).map(|(x, y)| x.dot(y)).sum();
        block_part + fa.iter().zip(fb).map(|(p, q)| p * q).sum::<f64>()
    };

    for i in 0..m {
        let cons_i = core::mem::replace(&mut emb.cons[i], Vec::new());
        let free_i = core::mem::take(&mut emb.free[i]);
        let norm2 = gram(&cons_i, &free_i, &cons_i, &free_i);
        let v: Vec<f64> = kept_cons
            .iter()
            .zip(&kept_free)
            .map(|(kc, kf)| gram(&cons_i, &free_i, kc, kf))
            .collect();
        // w = L^{-1} v by forward substitution.
        let mut w = v.clone();
        for r in 0..w.len() {
            let mut sum = w[r];
            for k in 0..r {
                sum -= l[r][k] * w[k];
            }
            w[r] = sum / l[r][r];
        }
        let wnorm2: f64 = w.iter().map(|x| x * x).sum();
        let pivot2 = norm2 - wnorm2;
        if pivot2 > 1e-20 && pivot2 > 1e-16 * norm2.max(1e-12) {
            l.push({
                let mut row = w;
                row.push(crate::linalg::scalar::sqrt(pivot2));
                row
            });
            kept.push(i);
            kept_cons.push(cons_i);
            kept_free.push(free_i);
            kept_b.push(emb.b[i]);
        } else {
            // Dependent: lambda solves Gram lambda = v; consistency requires
            // b_i = lambda . b_kept.
            let mut lambda = w;
            for r in (0..lambda.len()).rev() {
                let mut sum = lambda[r];
                for k in (r + 1)..lambda.len() {
                    sum -= l[k][r] * lambda[k];
                }
                lambda[r] = sum / l[r][r];
            }
            let implied: f64 = lambda.iter().zip(&kept_b).map(|(a, b)| a * b).sum();
            if (implied - emb.b[i]).abs() > 1e-8 * (1.0 + emb.b[i].abs()) {
                return Err(SdpError::Numerical(
                    "inconsistent dependent constraint: problem is infeasible".into(),
                ));
            }
        }
    }

    emb.cons = kept_cons;
    emb.free = kept_free;
    emb.b = kept_b;
    Ok(kept)
}

fn ipm(emb: &Embedded, config: &SdpConfig) -> Result<SdpSolution, SdpError> {
    let nb = emb.block_sides.len();
    let m = emb.cons.len();
    let nf = emb.num_free;
    let nu: f64 = emb.block_sides.iter().map(|&n| n as f64).sum();

    // Starting point: scaled identities sized from the data norms.
    let max_b = emb.b.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let max_a = emb
        .cons
        .iter()
        .flat_map(|c| c.iter())
        .map(|a| a.fro_norm())
        .fold(0.0f64, f64::max);
    let max_c = emb.objective.iter().map(|c| c.fro_norm()).fold(0.0, f64::max);
    let nmax = *emb.block_sides.iter().max().unwrap() as f64;
    let xi_p = 10.0f64
        .max(crate::linalg::scalar::sqrt(nmax))
        .max(nmax * max_b / (1.0 + max_a));
    let xi_d = 10.0f64
        .max(crate::linalg::scalar::sqrt(nmax))
        .max(max_a)
        .max(max_c);

    let mut x: Vec<RealMatrix> = emb
        .block_sides
        .iter()
        .map(|&n| RealMatrix::scaled_identity(n, xi_p))
        .collect();
    let mut s: Vec<RealMatrix> = emb
        .block_sides
        .iter()
        .map(|&n| RealMatrix::scaled_identity(n, xi_d))
        .collect();
    let mut y = vec![0.0f64; m];
    let mut u = vec![0.0f64; nf];

    let mut trace = Vec::new();
    let mut status = SdpStatus::NumericalFailure;
    let mut iterations = 0;

    let obj_scale = 1.0 + max_c + max_b;

    for iter in 0..config.max_iter {
        iterations = iter + 1;

        // Residuals.
        let mut r_p = vec![0.0f64; m];
        for i in 0..m {
            let mut acc = emb.b[i];
            for (b, a) in emb.cons[i].iter().enumerate() {
                acc -= a.pair(&x[b]);
            }
            for k in 0..nf {
                acc -= emb.free[i][k] * u[k];
            }
            r_p[i] = acc;
        }
        let mut r_d: Vec<RealMatrix> = Vec::with_capacity(nb);
        for b in 0..nb {
            let mut rd = RealMatrix::zeros(emb.block_sides[b]);
            emb.objective[b].add_into(&mut rd, 1.0);
            for i in 0..m {
                emb.cons[i][b].add_into(&mut rd, -y[i]);
            }
            rd.add_scaled(&s[b], -1.0);
            r_d.push(rd);
        }
        let mut r_q = vec![0.0f64; nf];
        for k in 0..nf {
            let mut acc = emb.obj_free[k];
            for i in 0..m {
                acc -= emb.free[i][k] * y[i];
            }
            r_q[k] = acc;
        }

        let pobj: f64 = (0..nb).map(|b| emb.objective[b].pair(&x[b])).sum::<f64>()
            + emb.obj_free.iter().zip(&u).map(|(q, v)| q * v).sum::<f64>();
        let dobj: f64 = emb.b.iter().zip(&y).map(|(b, yv)| b * yv).sum();
        let gap_rel = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pres = r_p.iter().fold(0.0f64, |a, &r| a.max(r.abs())) / (1.0 + max_b);
        let dres = r_d
            .iter()
            .map(|rd| rd.max_abs())
            .chain(r_q.iter().map(|r| r.abs()))
            .fold(0.0f64, f64::max)
            / (1.0 + max_c);

        if config.record_trace {
            trace.push((iter, gap_rel, pres.max(dres)));
        }

        if gap_rel <= config.gap_tol && pres <= config.residual_tol && dres <= config.residual_tol
        {
            status = SdpStatus::Optimal;
            break;
        }
        // Divergence heuristics.
        if dobj > 1e9 * obj_scale && pres > 1e-5 {
            status = SdpStatus::PrimalInfeasible;
            break;
        }
        if pobj < -1e9 * obj_scale && dres > 1e-5 {
            status = SdpStatus::DualInfeasible;
            break;
        }

        let mu: f64 = (0..nb).map(|b| x[b].dot(&s[b])).sum::<f64>() / nu;
        if !mu.is_finite() {
            return Err(SdpError::Numerical("iterates diverged".into()));
        }

        // NT scaling per block: W = X^{1/2} (X^{1/2} S X^{1/2})^{-1/2} X^{1/2}.
        let mut w: Vec<RealMatrix> = Vec::with_capacity(nb);
        let mut s_inv: Vec<RealMatrix> = Vec::with_capacity(nb);
        for b in 0..nb {
            let (xv, xq) = x[b].eig_sym();
            let floor = xv[0].max(1e-30) * 1e-14;
            let x_half = RealMatrix::from_eigen(&xv, &xq, |l| {
                crate::linalg::scalar::sqrt(l.max(floor))
            });
            let x_inv = RealMatrix::from_eigen(&xv, &xq, |l| 1.0 / l.max(floor));
            let mmat = x_half.mul(&s[b]).mul(&x_half);
            let (mv, mq) = mmat.eig_sym();
            let mfloor = mv[0].max(1e-30) * 1e-14;
            let m_inv_half = RealMatrix::from_eigen(&mv, &mq, |l| {
                1.0 / crate::linalg::scalar::sqrt(l.max(mfloor))
            });
            let mut wb = x_half.mul(&m_inv_half).mul(&x_half);
            wb.symmetrize();
            // S^{-1} = W X^{-1} W.
            let mut sib = wb.mul(&x_inv).mul(&wb);
            sib.symmetrize();
            w.push(wb);
            s_inv.push(sib);
        }

        // Schur complement H_ij = sum_b <A_i, W A_j W> and cached W R_d W.
        let mut h = RealMatrix::zeros(m);
        for j in 0..m {
            let mut col = vec![0.0f64; m];
            for b in 0..nb {
                if emb.cons[j][b].entries.is_empty() {
                    continue;
                }
                let mj = emb.cons[j][b].sandwich(&w[b]);
                for i in 0..m {
                    col[i] += emb.cons[i][b].pair(&mj);
                }
            }
            for i in 0..m {
                h.set(i, j, col[i]);
            }
        }
        h.symmetrize();
        let mut wrdw: Vec<RealMatrix> = Vec::with_capacity(nb);
        for b in 0..nb {
            let mut t = w[b].mul(&r_d[b]).mul(&w[b]);
            t.symmetrize();
            wrdw.push(t);
        }

        // Factor H once per iteration.
        let mut reg = config.cholesky_reg * (1.0 + h.max_abs());
        let l = loop {
            match h.cholesky(reg) {
                Some(l) => break l,
                None => {
                    reg *= 100.0;
                    if reg > 1.0 {
                        return Err(SdpError::Numerical(
                            "Schur complement is numerically singular".into(),
                        ));
                    }
                }
            }
        };

        // Direction for a given complementarity target.
        let solve_dir = |rc: &[RealMatrix]| -> (Vec<f64>, Vec<f64>, Vec<RealMatrix>, Vec<RealMatrix>) {
            let mut g = vec![0.0f64; m];
            for i in 0..m {
                let mut acc = r_p[i];
                for b in 0..nb {
                    acc -= emb.cons[i][b].pair(&rc[b]);
                    acc += emb.cons[i][b].pair(&wrdw[b]);
                }
                g[i] = acc;
            }
            // Bordered solve with the free columns.
            let (dy, du) = if nf == 0 {
                (RealMatrix::chol_solve(&l, &g), Vec::new())
            } else {
                let hi_g = RealMatrix::chol_solve(&l, &g);
                let mut hi_f: Vec<Vec<f64>> = Vec::with_capacity(nf);
                for k in 0..nf {
                    let fk: Vec<f64> = (0..m).map(|i| emb.free[i][k]).collect();
                    hi_f.push(RealMatrix::chol_solve(&l, &fk));
                }
                // Small SPD system (F^T H^{-1} F) du = F^T H^{-1} g - r_q.
                let mut su = RealMatrix::zeros(nf);
                let mut rhs = vec![0.0f64; nf];
                for a in 0..nf {
                    for bidx in 0..nf {
                        let mut acc = 0.0;
                        for i in 0..m {
                            acc += emb.free[i][a] * hi_f[bidx][i];
                        }
                        su.set(a, bidx, acc);
                    }
                    rhs[a] = (0..m).map(|i| emb.free[i][a] * hi_g[i]).sum::<f64>() - r_q[a];
                }
                su.symmetrize();
                let lu = su
                    .cholesky(1e-12 * (1.0 + su.max_abs()))
                    .expect("free-variable Gram is positive definite");
                let du = RealMatrix::chol_solve(&lu, &rhs);
                let mut g2 = g.clone();
                for i in 0..m {
                    for k in 0..nf {
                        g2[i] -= emb.free[i][k] * du[k];
                    }
                }
                (RealMatrix::chol_solve(&l, &g2), du)
            };
            let mut ds: Vec<RealMatrix> = Vec::with_capacity(nb);
            let mut dx: Vec<RealMatrix> = Vec::with_capacity(nb);
            for b in 0..nb {
                let mut dsb = r_d[b].clone();
                for i in 0..m {
                    emb.cons[i][b].add_into(&mut dsb, -dy[i]);
                }
                dsb.symmetrize();
                // dX = Rc - W R_d W + W (A* dy) W
                //    = Rc - W (R_d - A* dy) W = Rc - W dS W.
                let mut dxb = rc[b].clone();
                let wdsw = {
                    let mut t = w[b].mul(&dsb).mul(&w[b]);
                    t.symmetrize();
                    t
                };
                dxb.add_scaled(&wdsw, -1.0);
                dx.push(dxb);
                ds.push(dsb);
            }
            (dy, du, dx, ds)
        };

        // Predictor (affine scaling): Rc = -X.
        let rc_aff: Vec<RealMatrix> = (0..nb)
            .map(|b| {
                let mut t = x[b].clone();
                t.scale_in_place(-1.0);
                t
            })
            .collect();
        let (_, _, dx_aff, ds_aff) = solve_dir(&rc_aff);
        let ap_aff = step_length(&x, &dx_aff, 1.0);
        let ad_aff = step_length(&s, &ds_aff, 1.0);
        let mut mu_aff = 0.0;
        for b in 0..nb {
            let mut xa = x[b].clone();
            xa.add_scaled(&dx_aff[b], ap_aff);
            let mut sa = s[b].clone();
            sa.add_scaled(&ds_aff[b], ad_aff);
            mu_aff += xa.dot(&sa);
        }
        mu_aff /= nu;
        let ratio = (mu_aff / mu).max(0.0);
        let sigma = (ratio * ratio * ratio).clamp(1e-4, 0.999);

        // Corrector with centering target sigma*mu.
        let rc: Vec<RealMatrix> = (0..nb)
            .map(|b| {
                let mut t = s_inv[b].clone();
                t.scale_in_place(sigma * mu);
                t.add_scaled(&x[b], -1.0);
                t
            })
            .collect();
        let (dy, du, dx, ds) = solve_dir(&rc);

        let ap = step_length(&x, &dx, config.step_fraction);
        let ad = step_length(&s, &ds, config.step_fraction);

        for b in 0..nb {
            x[b].add_scaled(&dx[b], ap);
            s[b].add_scaled(&ds[b], ad);
            complex_structure_project(&mut x[b]);
            complex_structure_project(&mut s[b]);
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
        for k in 0..nf {
            u[k] += ap * du[k];
        }
    }

    // Extract complex blocks and objective values.
    let blocks: Vec<ComplexMatrix> = x.iter().map(unembed).collect();
    let pobj: f64 = (0..nb).map(|b| emb.objective[b].pair(&x[b])).sum::<f64>()
        + emb.obj_free.iter().zip(&u).map(|(q, v)| q * v).sum::<f64>();
    let dobj: f64 = emb.b.iter().zip(&y).map(|(b, yv)| b * yv).sum();

    Ok(SdpSolution {
        status,
        blocks,
        free_values: u,
        dual: y,
        primal_objective: pobj,
        dual_objective: dobj,
        gap: (pobj - dobj).abs(),
        iterations,
        trace,
    })
}

/// Largest step `alpha <= 1` keeping every block positive definite, scaled by
/// `fraction`; found by Cholesky bisection (deterministic, no eigenvalues).
fn step_length(blocks: &[RealMatrix], dirs: &[RealMatrix], fraction: f64) -> f64 {
    let feasible = |alpha: f64| -> bool {
        blocks.iter().zip(dirs).all(|(xb, db)| {
            let mut t = xb.clone();
            t.add_scaled(db, alpha);
            t.cholesky(0.0).is_some()
        })
    };
    if feasible(1.0) {
        // Interior for the full step; apply the boundary fraction only when
        // the boundary is inside [0, 1].
        return 1.0;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (fraction * lo).min(1.0)
}

/// Projects onto the embedded-complex subalgebra
/// `{[[A, -B],[B, A]] : A = A^T, B = -B^T}`.
fn complex_structure_project(s: &mut RealMatrix) {
    s.symmetrize();
    let n2 = s.n;
    let n = n2 / 2;
    for i in 0..n {
        for j in 0..n {
            let a = 0.5 * (s.at(i, j) + s.at(i + n, j + n));
            s.set(i, j, a);
            s.set(i + n, j + n, a);
            let b = 0.5 * (s.at(i + n, j) - s.at(i, j + n));
            s.set(i + n, j, b);
            s.set(i, j + n, -b);
        }
    }
}

/// Reads the complex Hermitian block out of its real embedding.
fn unembed(s: &RealMatrix) -> ComplexMatrix {
    let n = s.n / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        C64::new(
            0.5 * (s.at(i, j) + s.at(i + n, j + n)),
            0.5 * (s.at(i + n, j) - s.at(i, j + n)),
        )
    })
    .hermitize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::rng::{trial_rng, RngExt};
    use crate::sdp::{feasibility_margin, SdpConstraint, SdpProblem, Sense};

    #[test]
    fn embedding_preserves_eigenvalues_doubled() {
        let mut rng = trial_rng(83, 0);
        for n in [2usize, 5, 9] {
            let h = rng.hermitian(n);
            let sp = SparseHerm::from_dense(&h);
            let emb = SpReal::embed(&sp);
            let mut dense = RealMatrix::zeros(2 * n);
            // embed() scales by 1/2 to preserve pairings; undo for the
            // spectrum.
            for &(r, c, v) in &emb.entries {
                let acc = dense.at(r as usize, c as usize) + 2.0 * v;
                dense.set(r as usize, c as usize, acc);
            }
            let (rv, _) = dense.eig_sym();
            let (cv, _) = crate::linalg::eig_hermitian(&h).unwrap();
            for (k, &lam) in cv.iter().enumerate() {
                assert!((rv[2 * k] - lam).abs() < 1e-10);
                assert!((rv[2 * k + 1] - lam).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvalue_lp() {
        // min <diag(1,2), X> s.t. tr X = 1, X >= 0  ->  1 at X = diag(1,0).
        let c = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let id = ComplexMatrix::identity(2);
        let p = SdpProblem::new(&c, alloc::vec![(id, 1.0)], Sense::Minimize).unwrap();
        let sol = crate::sdp::solve(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - 1.0).abs() < 1e-6);
        assert!((sol.primal().at(0, 0).re - 1.0).abs() < 1e-5);
        assert!(sol.primal().at(1, 1).re.abs() < 1e-5);
    }

    #[test]
    fn trace_maximization_under_identity_cap() {
        // max tr X s.t. X <= I on side 4, via slack block T = I - X >= 0.
        let side = 4usize;
        let mut objective = alloc::vec![SparseHerm::new(side), SparseHerm::new(side)];
        for i in 0..side {
            objective[0].add(i, i, C64::new(1.0, 0.0));
        }
        let mut constraints = Vec::new();
        for i in 0..side {
            for j in i..side {
                for reim in 0..2 {
                    if i == j && reim == 1 {
                        continue;
                    }
                    let v = if reim == 0 {
                        C64::new(if i == j { 1.0 } else { 0.5 }, 0.0)
                    } else {
                        C64::new(0.0, 0.5)
                    };
                    let mut bx = SparseHerm::new(side);
                    bx.add(i, j, v);
                    let mut bt = SparseHerm::new(side);
                    bt.add(i, j, v);
                    let rhs = if i == j { 1.0 } else { 0.0 };
                    constraints.push(SdpConstraint::new(alloc::vec![bx, bt], rhs));
                }
            }
        }
        let p = SdpProblem::with_blocks(
            alloc::vec![side, side],
            objective,
            Vec::new(),
            constraints,
            Sense::Maximize,
        )
        .unwrap();
        let sol = crate::sdp::solve(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - side as f64).abs() < 1e-5);
        assert!((sol.blocks[0].at(0, 0).re - 1.0).abs() < 1e-4);
    }

    #[test]
    fn margin_on_trace_one_is_half() {
        // max t s.t. X - tI >= 0, tr X = 1 on side 2: t* = 1/2 at X = I/2.
        let mut tr = SparseHerm::new(2);
        tr.add(0, 0, C64::new(1.0, 0.0));
        tr.add(1, 1, C64::new(1.0, 0.0));
        let cons = alloc::vec![SdpConstraint::new(alloc::vec![tr], 1.0)];
        let (t, witness) = feasibility_margin(&[2], &cons).unwrap();
        assert!((t - 0.5).abs() < 1e-6);
        assert!((witness[0].at(0, 0).re - 0.5).abs() < 1e-5);
    }

    #[test]
    fn margin_detects_forced_negative_eigenvalue() {
        // Constraints force X = diag(1, -0.1)/0.9: t* = -1/9.
        let mut e00 = SparseHerm::new(2);
        e00.add(0, 0, C64::new(1.0, 0.0));
        let mut e11 = SparseHerm::new(2);
        e11.add(1, 1, C64::new(1.0, 0.0));
        let mut off_re = SparseHerm::new(2);
        off_re.add(0, 1, C64::new(0.5, 0.0));
        let mut off_im = SparseHerm::new(2);
        off_im.add(0, 1, C64::new(0.0, 0.5));
        let cons = alloc::vec![
            SdpConstraint::new(alloc::vec![e00], 1.0 / 0.9),
            SdpConstraint::new(alloc::vec![e11], -0.1 / 0.9),
            SdpConstraint::new(alloc::vec![off_re], 0.0),
            SdpConstraint::new(alloc::vec![off_im], 0.0),
        ];
        let (t, _) = feasibility_margin(&[2], &cons).unwrap();
        assert!((t + 0.1 / 0.9).abs() < 1e-6, "t = {t}");
    }

    #[test]
    fn weak_duality_on_random_instances() {
        let mut rng = trial_rng(89, 7);
        for trial in 0..20 {
            // Random strictly feasible instance: constraints pin pairings of
            // a random interior point.
            let n = 3 + (trial % 2);
            let x0 = {
                let g = rng.ginibre(n);
                let m = g.mul(&g.dagger());
                let tr = m.trace().re;
                m.scale_re(1.0 / tr)
            };
            let c = rng.hermitian(n);
            let mut constraints = Vec::new();
            constraints.push((ComplexMatrix::identity(n), 1.0));
            for _ in 0..3 {
                let a = rng.hermitian(n);
                let rhs = a.mul(&x0).trace().re;
                constraints.push((a, rhs));
            }
            let p = SdpProblem::new(&c, constraints, Sense::Minimize).unwrap();
            let sol = crate::sdp::solve(&p).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal, "trial {trial}");
            // Weak duality for the minimization sense, up to the gap
            // tolerance at termination.
            assert!(sol.dual_objective <= sol.primal_objective + 1e-6);
            assert!(sol.gap <= 1e-5 * (1.0 + sol.primal_objective.abs()));
            // The witness is PSD and feasible.
            let (vals, _) = crate::linalg::eig_hermitian(sol.primal()).unwrap();
            assert!(vals.last().unwrap() > &-1e-8);
        }
    }

    #[test]
    fn duplicate_constraints_are_dropped() {
        let c = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let id = ComplexMatrix::identity(2);
        let p = SdpProblem::new(
            &c,
            alloc::vec![
                (id.clone(), 1.0),
                (id.clone(), 1.0),
                (id.scale_re(2.0), 2.0)
            ],
            Sense::Minimize,
        )
        .unwrap();
        let sol = crate::sdp::solve(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - 1.0).abs() < 1e-6);
    }

    #[test]
    fn inconsistent_dependent_constraints_error() {
        let c = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let id = ComplexMatrix::identity(2);
        let p = SdpProblem::new(
            &c,
            alloc::vec![(id.clone(), 1.0), (id, 2.0)],
            Sense::Minimize,
        )
        .unwrap();
        assert!(crate::sdp::solve(&p).is_err());
    }

    #[test]
    fn product_constraint_instance() {
        // A slightly larger kron-structured instance with an interior point.
        let mut rng = trial_rng(97, 3);
        let a = rng.hermitian(2);
        let b = rng.hermitian(3);
        let big = kron(&a, &b);
        let x0 = {
            let g = rng.ginibre(6);
            let m = g.mul(&g.dagger());
            let tr = m.trace().re;
            m.scale_re(1.0 / tr)
        };
        let p = SdpProblem::new(
            &rng.hermitian(6),
            alloc::vec![
                (ComplexMatrix::identity(6), 1.0),
                (big.clone(), big.mul(&x0).trace().re)
            ],
            Sense::Minimize,
        )
        .unwrap();
        let sol = crate::sdp::solve(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let feas = (big.mul(sol.primal()).trace().re - big.mul(&x0).trace().re).abs();
        assert!(feas < 1e-6);
    }
}
