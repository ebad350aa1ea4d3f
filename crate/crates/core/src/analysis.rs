//! Derived quantities and experiments: coherent information, Werner-family
//! classification scans and threshold bisections, the randomized two-copy
//! filtering search for one-way distillability, the locking demonstration,
//! and continuity bounds on the one-way secret-key rate.

use alloc::vec::Vec;

use crate::bsa::BsaError;
use crate::extendibility::{
    is_k_extendible, two_qubit_extendible_analytic, ExtendibilityError, ExtendibilityVerdict,
    Method,
};
use crate::linalg::scalar;
use crate::linalg::{
    dephase_factor, entropy, eta, kron, partial_trace, partial_transpose, permute_factors,
    trace_norm, ComplexMatrix, DensityMatrix, DimensionProfile, LinalgError, Party, C64,
};
use crate::rng::{trial_rng, RngExt};
use crate::statezoo::{decohered_locking_state, locking_state, werner, LockingStateParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Extendibility(#[from] ExtendibilityError),
    #[error(transparent)]
    Bsa(#[from] BsaError),
    #[error("invalid argument: {0}")]
    BadArgument(alloc::string::String),
}

/// Coherent information `I(A>B) = S(B) - S(AB)` in bits.
pub fn coherent_information(rho: &DensityMatrix) -> Result<f64, AnalysisError> {
    rho.profile().require_bipartite()?;
    let s_b = entropy(&rho.marginal(Party::B)?)?;
    let s_ab = entropy(rho)?;
    Ok(s_b - s_ab)
}

/// `eta` with its argument saturated into [0, 1]; the entropy terms of the
/// continuity bounds vanish at the clamp, which keeps the bounds valid for
/// trace distances above 1.
fn eta_sat(x: f64) -> f64 {
    eta(x.clamp(0.0, 1.0)).expect("clamped argument is in range")
}

/// Two-sided conditional-entropy continuity check.
#[derive(Debug, Clone, Copy)]
pub struct CondEntropyCheck {
    /// Trace-norm distance between the two states (no 1/2 factor).
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Evaluates `|S(A|B) - S(A'|B')| <= 4 eps log2 d_A + 2 eta(1-eps) +
/// 2 eta(eps)` for two states on the same profile, with
/// `eps = ||rho - rho'||_1`.
pub fn conditional_entropy_bound_check(
    rho: &DensityMatrix,
    other: &DensityMatrix,
) -> Result<CondEntropyCheck, AnalysisError> {
    if rho.profile() != other.profile() {
        return Err(AnalysisError::BadArgument(
            "states must share one profile".into(),
        ));
    }
    rho.profile().require_bipartite()?;
    let eps = trace_norm(&(rho.matrix() - other.matrix()));
    let d_a = rho.profile().dim_of(Party::A);

    let cond = |r: &DensityMatrix| -> Result<f64, AnalysisError> {
        Ok(entropy(r)? - entropy(&r.marginal(Party::B)?)?)
    };
    let lhs = (cond(rho)? - cond(other)?).abs();
    let rhs = 4.0 * eps * scalar::log2(d_a as f64) + 2.0 * eta_sat(1.0 - eps) + 2.0 * eta_sat(eps);
    Ok(CondEntropyCheck {
        eps,
        lhs,
        rhs,
        satisfied: lhs <= rhs + 1e-12,
    })
}

/// Continuity bound on the one-way secret-key rate.
#[derive(Debug, Clone, Copy)]
pub struct KeyBoundReport {
    pub eps: f64,
    pub d_a: usize,
    /// `8 eps log2 d_A + 4 eta(1-eps) + 4 eta(eps)` bits.
    pub bound: f64,
}

/// Key-rate continuity bound at trace distance `eps` for A-dimension `d_a`.
///
/// For a state at trace distance `eps` from the nearest symmetric extendible
/// state this bounds its one-way secret-key rate from above.
pub fn key_bound(eps: f64, d_a: usize) -> Result<KeyBoundReport, AnalysisError> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(AnalysisError::BadArgument(alloc::format!(
            "trace distance must lie in [0, 2], got {eps}"
        )));
    }
    if d_a < 2 {
        return Err(AnalysisError::BadArgument("d_a must be at least 2".into()));
    }
    let bound =
        8.0 * eps * scalar::log2(d_a as f64) + 4.0 * eta_sat(1.0 - eps) + 4.0 * eta_sat(eps);
    Ok(KeyBoundReport { eps, d_a, bound })
}

/// One grid point of a Werner-family classification scan.
#[derive(Debug, Clone)]
pub struct WernerScanRow {
    pub alpha: f64,
    /// Closed form: the family is separable exactly for `alpha >= -1/d`.
    pub separable: bool,
    /// Computed: the partial transpose has a negative eigenvalue.
    pub npt: bool,
    pub extendible: ExtendibilityVerdict,
    pub coherent_info: f64,
}

/// Classifies Werner states over an alpha grid.  Extendibility uses the
/// closed two-qubit condition when `d = 2` and `k = 1`, the SDP otherwise.
pub fn werner_scan(
    d: usize,
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    k: usize,
) -> Result<Vec<WernerScanRow>, AnalysisError> {
    if step <= 0.0 || alpha_max < alpha_min || alpha_min < -1.0 || alpha_max > 1.0 {
        return Err(AnalysisError::BadArgument(
            "need -1 <= alpha_min <= alpha_max <= 1 and positive step".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut alpha = alpha_min;
    while alpha <= alpha_max + 1e-12 {
        let a = alpha.min(1.0).max(-1.0);
        let rho = werner(d, a)?;
        let pt = partial_transpose(&rho, &[1])?;
        let (pt_vals, _) = crate::linalg::eig_hermitian(&pt)?;
        let npt = *pt_vals.last().unwrap() < -1e-12;
        let extendible = if d == 2 && k == 1 {
            two_qubit_extendible_analytic(&rho)?
        } else {
            is_k_extendible(&rho, k)?
        };
        rows.push(WernerScanRow {
            alpha: a,
            separable: a >= -1.0 / d as f64,
            npt,
            extendible,
            coherent_info: coherent_information(&rho)?,
        });
        alpha += step;
    }
    Ok(rows)
}

/// Bisects the symmetric-extendibility boundary of the `d = 2` Werner family
/// on `alpha in [-1, 0]` to the given width.
pub fn werner_extendibility_threshold(method: Method, tol: f64) -> Result<f64, AnalysisError> {
    let margin = |alpha: f64| -> Result<f64, AnalysisError> {
        let rho = werner(2, alpha)?;
        let v = match method {
            Method::Analytic => two_qubit_extendible_analytic(&rho)?,
            Method::Sdp => is_k_extendible(&rho, 1)?,
        };
        Ok(v.margin)
    };
    bisect_root(&mut |a| margin(a), -1.0, 0.0, tol)
}

/// Bisects the coherent-information zero of the `d = 2` Werner family on
/// `alpha in [-1, -0.5]` to the given width.
pub fn werner_coherent_info_root(tol: f64) -> Result<f64, AnalysisError> {
    bisect_root(
        &mut |a| coherent_information(&werner(2, a)?),
        -1.0,
        -0.5,
        tol,
    )
}

fn bisect_root(
    f: &mut dyn FnMut(f64) -> Result<f64, AnalysisError>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, AnalysisError> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo * fhi > 0.0 {
        return Err(AnalysisError::BadArgument(
            "bisection bracket does not change sign".into(),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if (fm >= 0.0) == (fhi >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Filter ensemble for the two-copy distillation search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistillMode {
    /// Full-rank Ginibre filter on the doubled A side, operator norm 1.
    Full,
    /// Random two-dimensional projector composed with a random invertible
    /// map; the output A space is compressed to a qubit.
    Proj2,
}

/// Report of the randomized two-copy filtering search.
#[derive(Debug, Clone)]
pub struct DistillSearchReport {
    pub trials: usize,
    pub skipped: usize,
    pub seed: u64,
    pub mode: DistillMode,
    pub best_trial: usize,
    pub best_coherent_info: f64,
    pub best_filter: ComplexMatrix,
    pub best_unitary: ComplexMatrix,
    pub best_success_probability: f64,
}

struct TrialOutcome {
    coherent_info: f64,
    filter: ComplexMatrix,
    unitary: ComplexMatrix,
    probability: f64,
}

/// Two copies of `rho` regrouped as `(A1 A2 | B1 B2)`.
fn doubled_state(rho: &DensityMatrix) -> Result<DensityMatrix, AnalysisError> {
    let joint = DensityMatrix::new(
        kron(rho.matrix(), rho.matrix()),
        DimensionProfile::new(
            alloc::vec![2, 2, 2, 2],
            alloc::vec![Party::A, Party::B, Party::A, Party::B],
        )?,
    )?;
    Ok(permute_factors(&joint, &[0, 2, 1, 3])?)
}

/// Runs one search trial; trial 0 is the deterministic identity probe.
fn distill_trial(
    rho2: &DensityMatrix,
    mode: DistillMode,
    seed: u64,
    trial: usize,
) -> Result<Option<TrialOutcome>, AnalysisError> {
    let (filter, unitary) = if trial == 0 {
        // Identity probe: unfiltered two-copy coherent information.
        let f = match mode {
            DistillMode::Full => ComplexMatrix::identity(4),
            DistillMode::Proj2 => {
                ComplexMatrix::from_fn(2, 4, |i, j| {
                    if i == j {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            }
        };
        (f, ComplexMatrix::identity(4))
    } else {
        let mut rng = trial_rng(seed, trial as u64);
        let f = match mode {
            DistillMode::Full => {
                let g = rng.ginibre(4);
                match operator_normalize(&g) {
                    Some(f) => f,
                    None => return Ok(None),
                }
            }
            DistillMode::Proj2 => {
                let haar = rng.haar_unitary(4);
                // Compression onto a random two-dimensional subspace.
                let vdag = ComplexMatrix::from_fn(2, 4, |i, j| haar.at(j, i).conj());
                let m = rng.ginibre(2);
                match operator_normalize(&m.mul(&vdag)) {
                    Some(f) => f,
                    None => return Ok(None),
                }
            }
        };
        let u = rng.haar_unitary(4);
        (f, u)
    };

    let op = kron(&filter, &unitary);
    let out = op.sandwich(rho2.matrix());
    let probability = out.trace().re;
    if probability < 1e-12 {
        return Ok(None);
    }
    let d_a_out = filter.rows();
    let profile = if d_a_out == 2 {
        DimensionProfile::new(
            alloc::vec![2, 2, 2],
            alloc::vec![Party::A, Party::B, Party::B],
        )?
    } else {
        DimensionProfile::new(
            alloc::vec![2, 2, 2, 2],
            alloc::vec![Party::A, Party::A, Party::B, Party::B],
        )?
    };
    let state = DensityMatrix::from_unnormalized(&out, profile)?;
    let ci = coherent_information(&state)?;
    Ok(Some(TrialOutcome {
        coherent_info: ci,
        filter,
        unitary,
        probability,
    }))
}

fn operator_normalize(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let gram = m.dagger().mul(m);
    let (vals, _) = crate::linalg::eig::jacobi(&gram.hermitize());
    let top = scalar::sqrt(vals[0].max(0.0));
    if top < 1e-12 {
        return None;
    }
    Some(m.scale_re(1.0 / top))
}

/// Randomized search for positive coherent information over filtered pairs
/// of a two-qubit state.
///
/// Per trial, a filter on the doubled A side and a Haar unitary on the
/// doubled B side are applied to two copies of the state; the best
/// renormalized coherent information is reported.  Trial 0 always probes the
/// identity filter; later trials derive their generators from
/// `mix(seed, trial)` so any execution order reproduces the same report.
pub fn distill_search(
    rho: &DensityMatrix,
    trials: usize,
    seed: u64,
    mode: DistillMode,
) -> Result<DistillSearchReport, AnalysisError> {
    let (d_a, d_b) = crate::extendibility::split_dims(rho)?;
    if d_a != 2 || d_b != 2 {
        return Err(AnalysisError::BadArgument(
            "the filtering search runs on two-qubit states".into(),
        ));
    }
    if trials == 0 {
        return Err(AnalysisError::BadArgument("need at least one trial".into()));
    }
    let rho2 = doubled_state(rho)?;

    let mut best: Option<(usize, TrialOutcome)> = None;
    let mut skipped = 0usize;
    for trial in 0..trials {
        match distill_trial(&rho2, mode, seed, trial)? {
            None => skipped += 1,
            Some(outcome) => {
                let better = match &best {
                    None => true,
                    Some((_, b)) => outcome.coherent_info > b.coherent_info,
                };
                if better {
                    best = Some((trial, outcome));
                }
            }
        }
    }
    let (best_trial, outcome) = best.ok_or_else(|| {
        AnalysisError::BadArgument("every trial was skipped (zero-probability outcomes)".into())
    })?;
    Ok(DistillSearchReport {
        trials,
        skipped,
        seed,
        mode,
        best_trial,
        best_coherent_info: outcome.coherent_info,
        best_filter: outcome.filter,
        best_unitary: outcome.unitary,
        best_success_probability: outcome.probability,
    })
}

/// Locking demonstration: extendibility before and after dephasing the
/// A-side flag of the locking state and discarding the flags.
#[derive(Debug, Clone)]
pub struct LockingDemoReport {
    pub d: usize,
    /// Verdict on the full pre-measurement state; absent when the extension
    /// exceeds the dense SDP limit (d > 2).
    pub pre: Option<ExtendibilityVerdict>,
    /// Verdict on the decohered state left after measuring the A flag and
    /// discarding both flags.
    pub post: ExtendibilityVerdict,
    /// The decohered state the post verdict refers to.
    pub post_state: DensityMatrix,
}

pub fn locking_demo(d: usize) -> Result<LockingDemoReport, AnalysisError> {
    let c = scalar::sqrt(d as f64);
    let rho = locking_state(LockingStateParams { d, c })?;

    // Pre verdict on the full state when the extension fits the solver.
    let ext_side = (2 * d) * (2 * d) * (2 * d);
    let pre = if ext_side <= crate::sdp::SIDE_LIMIT {
        Some(is_k_extendible(&rho, 1)?)
    } else {
        None
    };

    // Measure the A flag (forgotten outcome), then discard both flags.
    let dephased = dephase_factor(&rho, 0)?;
    let post_state = partial_trace(&dephased, &[1, 3])?;
    let post_state = DensityMatrix::new(
        post_state.matrix().clone(),
        DimensionProfile::bipartite(d, d),
    )?;
    debug_assert!(
        (post_state.matrix() - decohered_locking_state(d).matrix()).max_abs() < 1e-12,
        "dephase-and-discard must reproduce the decohered constructor"
    );
    let post = is_k_extendible(&post_state, 1)?;
    Ok(LockingDemoReport {
        d,
        pre,
        post,
        post_state,
    })
}
