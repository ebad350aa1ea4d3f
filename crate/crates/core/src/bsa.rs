//! Best symmetric-extendible approximation: the maximal weight `lambda_max`
//! of an extendible component, the `1 - lambda_max` monotone, max-relative
//! entropy, and the trace distance to the extendible set.

use alloc::vec::Vec;

use crate::extendibility::{split_dims, ExtendibilityError, ExtensionSystem, MARGIN_TOL};
use crate::linalg::scalar;
use crate::linalg::{
    eig_hermitian, partial_trace, DensityMatrix, LinalgError, SparseHerm, C64,
};
use crate::sdp::{self, SdpConfig, SdpConstraint, SdpError, SdpStatus, Sense};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BsaError {
    #[error(transparent)]
    Extendibility(#[from] ExtendibilityError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("solver returned {0:?} instead of an optimum")]
    NotOptimal(SdpStatus),
    #[error("internal inconsistency: {0}")]
    Internal(alloc::string::String),
}

/// Optimal convex split `rho = lambda_max * sigma_ext + (1 - lambda_max) *
/// sigma_next` with `sigma_ext` symmetric extendible.
#[derive(Debug, Clone)]
pub struct BsaDecomposition {
    pub lambda_max: f64,
    /// Extendible component; absent when `lambda_max` vanishes.
    pub sigma_ext: Option<DensityMatrix>,
    /// Complementary component; absent when `lambda_max` is 1 (the split is
    /// degenerate).
    pub sigma_next: Option<DensityMatrix>,
    /// Permutation-invariant extension certifying `sigma_ext`; its `(A,B_1)`
    /// marginal reproduces `sigma_ext`.
    pub extension: Option<DensityMatrix>,
}

fn solve_config() -> SdpConfig {
    SdpConfig {
        gap_tol: 1e-8,
        residual_tol: 1e-9,
        ..SdpConfig::default()
    }
}

fn solve_robust(problem: &sdp::SdpProblem) -> Result<sdp::SdpSolution, BsaError> {
    match sdp::solve_with(problem, &solve_config()) {
        Ok(sol) if sol.status == SdpStatus::Optimal => Ok(sol),
        _ => {
            let sol = sdp::solve(problem)?;
            if sol.status != SdpStatus::Optimal {
                return Err(BsaError::NotOptimal(sol.status));
            }
            Ok(sol)
        }
    }
}

/// Computes the maximal weight of a k-extendible component:
/// `max tr Z` over `{X >= 0 invariant, Z = Tr_rest X, rho - Z >= 0}`.
pub fn lambda_max(rho: &DensityMatrix, k: usize) -> Result<BsaDecomposition, BsaError> {
    let (d_a, d_b) = split_dims(rho)?;
    let system = ExtensionSystem::new(d_a, d_b, k, false)?;
    let ab_side = d_a * d_b;

    // Blocks: extension blocks, then Y = rho - Z.
    let mut sides = system.blocks.clone();
    sides.push(ab_side);

    let mut constraints: Vec<SdpConstraint> = Vec::new();
    for row in &system.marginal_rows {
        let mut blocks = row.ext.clone();
        blocks.push(row.ab.clone());
        constraints.push(SdpConstraint::new(blocks, row.ab.pair(rho.matrix())));
    }
    for inv in &system.invariance {
        let mut blocks = inv.clone();
        blocks.push(SparseHerm::new(ab_side));
        constraints.push(SdpConstraint::new(blocks, 0.0));
    }

    // Objective: tr Z = tr X over the extension blocks.
    let mut objective: Vec<SparseHerm> = system
        .blocks
        .iter()
        .map(|&s| {
            let mut m = SparseHerm::new(s);
            for i in 0..s {
                m.add(i, i, C64::new(1.0, 0.0));
            }
            m
        })
        .collect();
    objective.push(SparseHerm::new(ab_side));

    let problem =
        sdp::SdpProblem::with_blocks(sides, objective, Vec::new(), constraints, Sense::Maximize)?;
    let sol = solve_robust(&problem)?;

    let lambda = sol.primal_objective;
    if lambda > 1.0 + MARGIN_TOL {
        return Err(BsaError::Internal(alloc::format!(
            "extendible weight {lambda} exceeds 1; the split rho - Z >= 0 forbids this"
        )));
    }
    let lambda = lambda.clamp(0.0, 1.0);

    let nb = system.blocks.len();
    let y_block = &sol.blocks[nb];

    let (sigma_ext, extension) = if lambda > 1e-8 {
        let full = system.witness_matrix(&sol.blocks[..nb]).hermitize();
        let ext_state =
            DensityMatrix::from_unnormalized(&full, system.witness_profile()).ok();
        let sigma = ext_state
            .as_ref()
            .and_then(|e| partial_trace(e, &[0, 1]).ok())
            .and_then(|s| {
                DensityMatrix::new(s.matrix().clone(), rho.profile().clone()).ok()
            });
        (sigma, ext_state)
    } else {
        (None, None)
    };
    let sigma_next = if lambda < 1.0 - 1e-8 {
        DensityMatrix::from_unnormalized(y_block, rho.profile().clone()).ok()
    } else {
        None
    };

    Ok(BsaDecomposition {
        lambda_max: lambda,
        sigma_ext,
        sigma_next,
        extension,
    })
}

/// The best-symmetric-approximation monotone `1 - lambda_max(rho)`.
pub fn ess_monotone(rho: &DensityMatrix) -> Result<f64, BsaError> {
    Ok(1.0 - lambda_max(rho, 1)?.lambda_max)
}

/// Max-relative entropy `D_max(sigma || rho) = log2 min{ lambda : sigma <=
/// lambda rho }` in bits; infinite when the support of `sigma` leaves the
/// support of `rho`.
pub fn d_max(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64, BsaError> {
    if sigma.profile() != rho.profile() {
        return Err(BsaError::Linalg(LinalgError::Dimension(
            "max-relative entropy needs matching profiles".into(),
        )));
    }
    let (vals, vecs) = eig_hermitian(rho.matrix())?;
    let support_tol = 1e-10;

    // Support test: the kernel of rho must annihilate sigma.
    let n = rho.side();
    let mut kernel_mass = 0.0;
    for (idx, &l) in vals.iter().enumerate() {
        if l > support_tol {
            continue;
        }
        let v: Vec<C64> = (0..n).map(|i| vecs.at(i, idx)).collect();
        let sv = sigma.matrix().matvec(&v);
        let overlap: C64 = v.iter().zip(&sv).map(|(a, b)| a.conj() * b).sum();
        kernel_mass += overlap.re.max(0.0);
    }
    if kernel_mass > support_tol {
        return Ok(f64::INFINITY);
    }

    // M = rho^{-1/2} sigma rho^{-1/2} on the support of rho.
    let inv_half = crate::linalg::eig::from_eigen(&vals, &vecs, |l| {
        if l > support_tol {
            1.0 / scalar::sqrt(l)
        } else {
            0.0
        }
    });
    let m = inv_half.mul(sigma.matrix()).mul(&inv_half);
    let (mvals, _) = eig_hermitian(&m.hermitize())?;
    Ok(scalar::log2(mvals[0].max(1e-300)))
}

/// Trace distance from `rho` to the set of k-extendible states:
/// `min ||rho - Z||_1` over unit-trace `Z` with an invariant PSD extension.
///
/// Returns the optimal distance and the nearest extendible state.
pub fn distance_to_extendible_set(
    rho: &DensityMatrix,
    k: usize,
) -> Result<(f64, DensityMatrix), BsaError> {
    let (d_a, d_b) = split_dims(rho)?;
    let system = ExtensionSystem::new(d_a, d_b, k, false)?;
    let ab_side = d_a * d_b;

    // Blocks: extension blocks, then P and Q with rho - Z = P - Q.
    let mut sides = system.blocks.clone();
    sides.push(ab_side);
    sides.push(ab_side);

    let mut constraints: Vec<SdpConstraint> = Vec::new();
    for row in &system.marginal_rows {
        // <E, Z> + <E, P> - <E, Q> = <E, rho>   (Z + P - Q = rho)
        let mut blocks = row.ext.clone();
        blocks.push(row.ab.clone());
        blocks.push(row.ab.scaled(-1.0));
        constraints.push(SdpConstraint::new(blocks, row.ab.pair(rho.matrix())));
    }
    for inv in &system.invariance {
        let mut blocks = inv.clone();
        blocks.push(SparseHerm::new(ab_side));
        blocks.push(SparseHerm::new(ab_side));
        constraints.push(SdpConstraint::new(blocks, 0.0));
    }
    // Z is a state: tr X = 1.
    {
        let mut blocks: Vec<SparseHerm> = system
            .blocks
            .iter()
            .map(|&s| {
                let mut m = SparseHerm::new(s);
                for i in 0..s {
                    m.add(i, i, C64::new(1.0, 0.0));
                }
                m
            })
            .collect();
        blocks.push(SparseHerm::new(ab_side));
        blocks.push(SparseHerm::new(ab_side));
        constraints.push(SdpConstraint::new(blocks, 1.0));
    }

    // Objective: tr P + tr Q.
    let mut objective: Vec<SparseHerm> =
        system.blocks.iter().map(|&s| SparseHerm::new(s)).collect();
    for _ in 0..2 {
        let mut m = SparseHerm::new(ab_side);
        for i in 0..ab_side {
            m.add(i, i, C64::new(1.0, 0.0));
        }
        objective.push(m);
    }

    let problem =
        sdp::SdpProblem::with_blocks(sides, objective, Vec::new(), constraints, Sense::Minimize)?;
    let sol = solve_robust(&problem)?;
    let eps = sol.primal_objective.max(0.0);

    let nb = system.blocks.len();
    let full = system.witness_matrix(&sol.blocks[..nb]).hermitize();
    let ext_state = DensityMatrix::from_unnormalized(&full, system.witness_profile())
        .map_err(BsaError::Linalg)?;
    let nearest = partial_trace(&ext_state, &[0, 1])?;
    let nearest = DensityMatrix::new(nearest.matrix().clone(), rho.profile().clone())?;
    Ok((eps, nearest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extendibility::{is_k_extendible, random_one_extendible};
    use crate::linalg::{kron, trace_norm, ComplexMatrix, DimensionProfile, Party};
    use crate::rng::{trial_rng, RngExt};
    use crate::statezoo::{max_entangled, private_state, upsilon_eps, werner};

    #[test]
    fn extendible_states_have_weight_one() {
        let mut rng = trial_rng(139, 0);
        for _ in 0..3 {
            let rho = random_one_extendible(2, 2, &mut rng);
            let bsa = lambda_max(&rho, 1).unwrap();
            assert!(
                (bsa.lambda_max - 1.0).abs() < 1e-5,
                "lambda = {}",
                bsa.lambda_max
            );
            assert!(bsa.sigma_next.is_none());
        }
    }

    #[test]
    fn pure_entangled_states_have_weight_zero() {
        let bsa = lambda_max(&max_entangled(2), 1).unwrap();
        assert!(bsa.lambda_max < 1e-5, "lambda = {}", bsa.lambda_max);
        assert!(bsa.sigma_ext.is_none());
    }

    #[test]
    fn decomposition_reconstructs_the_state() {
        let rho = werner(2, -0.9).unwrap();
        let bsa = lambda_max(&rho, 1).unwrap();
        assert!(bsa.lambda_max > 0.1 && bsa.lambda_max < 1.0 - 1e-6);
        let sigma_ext = bsa.sigma_ext.as_ref().unwrap();
        let sigma_next = bsa.sigma_next.as_ref().unwrap();
        let rebuilt = &sigma_ext.matrix().scale_re(bsa.lambda_max)
            + &sigma_next.matrix().scale_re(1.0 - bsa.lambda_max);
        assert!(
            (&rebuilt - rho.matrix()).max_abs() < 1e-6,
            "reconstruction error {}",
            (&rebuilt - rho.matrix()).max_abs()
        );
        // The extension certifies sigma_ext.
        let ext = bsa.extension.as_ref().unwrap();
        let marg = partial_trace(ext, &[0, 1]).unwrap();
        assert!((marg.matrix() - sigma_ext.matrix()).max_abs() < 1e-6);
        let verdict = is_k_extendible(sigma_ext, 1).unwrap();
        assert!(verdict.feasible, "margin {}", verdict.margin);
    }

    #[test]
    fn weight_matches_extendibility_frontier() {
        // lambda == 1 exactly when the state is 1-extendible.
        let mut rng = trial_rng(149, 1);
        for _ in 0..6 {
            let rho = rng.density(DimensionProfile::bipartite(2, 2));
            let feasible = is_k_extendible(&rho, 1).unwrap().feasible;
            let lam = lambda_max(&rho, 1).unwrap().lambda_max;
            if feasible {
                assert!((lam - 1.0).abs() < 1e-5, "lambda {lam} for extendible state");
            } else {
                assert!(lam < 1.0 - 1e-6, "lambda {lam} for non-extendible state");
            }
        }
    }

    #[test]
    fn ess_values() {
        // Separable: 0.
        let sep = werner(2, -0.3).unwrap();
        assert!(ess_monotone(&sep).unwrap().abs() < 1e-5);
        // Maximally entangled: 1.
        assert!((ess_monotone(&max_entangled(2)).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ess_invariant_under_local_unitaries() {
        let mut rng = trial_rng(151, 2);
        let rho = werner(2, -0.9).unwrap();
        let base = ess_monotone(&rho).unwrap();
        for _ in 0..3 {
            let ua = rng.haar_unitary(2);
            let ub = rng.haar_unitary(2);
            let rotated = kron(&ua, &ub).sandwich(rho.matrix());
            let rotated =
                DensityMatrix::from_unnormalized(&rotated, rho.profile().clone()).unwrap();
            let val = ess_monotone(&rotated).unwrap();
            assert!((val - base).abs() < 1e-5, "{val} vs {base}");
        }
    }

    #[test]
    fn ess_monotone_under_local_filtering() {
        // 1 - lambda(rho) >= (1 - lambda(rho_V)) * tr(V rho V^dag) for a
        // local filter V with V^dag V <= I.
        let mut rng = trial_rng(157, 3);
        for _ in 0..4 {
            let rho = rng.density(DimensionProfile::bipartite(2, 2));
            let g = rng.ginibre(2);
            let gram = g.dagger().mul(&g);
            let (vals, _) = eig_hermitian(&gram.hermitize()).unwrap();
            let v = g.scale_re(1.0 / scalar::sqrt(vals[0].max(1e-12)));
            let vfull = kron(&v, &ComplexMatrix::identity(2));
            let filtered = vfull.sandwich(rho.matrix());
            let p = filtered.trace().re;
            if p < 1e-6 {
                continue;
            }
            let rho_v = DensityMatrix::from_unnormalized(&filtered, rho.profile().clone())
                .unwrap();
            let lhs = ess_monotone(&rho).unwrap();
            let rhs = ess_monotone(&rho_v).unwrap() * p;
            assert!(lhs >= rhs - 1e-5, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn d_max_basic_values() {
        let mut rng = trial_rng(163, 4);
        let rho = rng.density(DimensionProfile::bipartite(2, 2));
        assert!(d_max(&rho, &rho).unwrap().abs() < 1e-8);

        // d_max(|0><0|, I/2) = 1 bit on a single qubit.
        let pure0 = DensityMatrix::new(
            ComplexMatrix::diag_real(&[1.0, 0.0]),
            DimensionProfile::new(alloc::vec![2], alloc::vec![Party::A]).unwrap(),
        )
        .unwrap();
        let flat = DensityMatrix::new(
            ComplexMatrix::identity(2).scale_re(0.5),
            DimensionProfile::new(alloc::vec![2], alloc::vec![Party::A]).unwrap(),
        )
        .unwrap();
        assert!((d_max(&pure0, &flat).unwrap() - 1.0).abs() < 1e-10);
        // Reverse direction: support of I/2 leaves the support of |0><0|.
        assert!(d_max(&flat, &pure0).unwrap().is_infinite());
    }

    #[test]
    fn weight_agrees_with_max_relative_entropy_of_component() {
        // At the optimum, lambda_max = 2^{-D_max(sigma_ext || rho)}.
        let mut rng = trial_rng(167, 5);
        for _ in 0..4 {
            let rho = rng.density(DimensionProfile::bipartite(2, 2));
            let bsa = lambda_max(&rho, 1).unwrap();
            if bsa.lambda_max < 1e-3 || bsa.lambda_max > 1.0 - 1e-6 {
                continue;
            }
            let sigma = bsa.sigma_ext.as_ref().unwrap();
            let dm = d_max(sigma, &rho).unwrap();
            let implied = libm::exp2(-dm);
            assert!(
                (implied - bsa.lambda_max).abs() < 1e-4,
                "2^-Dmax = {implied}, lambda = {}",
                bsa.lambda_max
            );
        }
    }

    #[test]
    fn distance_vanishes_inside_the_extendible_set() {
        let mut rng = trial_rng(173, 6);
        let rho = random_one_extendible(2, 2, &mut rng);
        let (eps, nearest) = distance_to_extendible_set(&rho, 1).unwrap();
        assert!(eps < 1e-6, "eps = {eps}");
        assert!((nearest.matrix() - rho.matrix()).max_abs() < 1e-4);
    }

    #[test]
    fn perturbed_locking_state_distance_is_bounded_by_eps() {
        // The eps-perturbation has trace distance exactly eps to the
        // unperturbed (extendible) member, so the optimal distance cannot
        // exceed it.
        let eps0 = 0.1;
        let rho = upsilon_eps(2, eps0).unwrap();
        let (eps, _) = distance_to_extendible_set(&rho, 1).unwrap();
        assert!(eps <= eps0 + 1e-6, "eps = {eps}");
        assert!(eps > 1e-4, "perturbation must leave the extendible set");
    }

    #[test]
    fn singlet_distance_is_positive_and_consistent() {
        let rho = werner(2, -1.0).unwrap();
        let (eps, nearest) = distance_to_extendible_set(&rho, 1).unwrap();
        assert!(eps > 0.1, "eps = {eps}");
        // Upper bound: distance to a known extendible state.
        let boundary = werner(2, -0.8).unwrap();
        let direct = trace_norm(&(rho.matrix() - boundary.matrix()));
        assert!(eps <= direct + 1e-6, "eps {eps} direct {direct}");
        // The reported nearest state is certified extendible.
        let verdict = is_k_extendible(&nearest, 1).unwrap();
        assert!(verdict.feasible, "margin {}", verdict.margin);
        // And the distance matches the reported minimizer.
        let achieved = trace_norm(&(rho.matrix() - nearest.matrix()));
        assert!((achieved - eps).abs() < 1e-5, "achieved {achieved} eps {eps}");
    }

    #[test]
    fn private_states_have_no_extendible_component() {
        let mut rng = trial_rng(179, 7);
        let sigma = rng.density(DimensionProfile::bipartite(2, 2));
        let u1 = rng.haar_unitary(4);
        let gamma = private_state(&sigma, &ComplexMatrix::identity(4), &u1).unwrap();
        let bsa = lambda_max(&gamma, 1).unwrap();
        assert!(bsa.lambda_max < 1e-4, "lambda = {}", bsa.lambda_max);
    }

    #[test]
    fn near_pure_complement_is_typical_for_two_qubit_states() {
        // Empirical observation, logged rather than asserted: when the
        // optimal split is proper, the complement tends to be near-pure.
        let mut rng = trial_rng(181, 8);
        let mut checked = 0;
        let mut deviations = 0;
        for _ in 0..6 {
            let rho = rng.density(DimensionProfile::bipartite(2, 2));
            let bsa = lambda_max(&rho, 1).unwrap();
            if bsa.lambda_max < 1e-3 || bsa.lambda_max > 1.0 - 1e-4 {
                continue;
            }
            checked += 1;
            let top = bsa.sigma_next.as_ref().unwrap().eigenvalues()[0];
            if top < 1.0 - 1e-4 {
                deviations += 1;
                std::eprintln!("complement purity deviation: top eigenvalue {top}");
            }
        }
        std::eprintln!("near-pure complement: {deviations} deviations in {checked} splits");
    }

    #[test]
    fn separable_weight_never_exceeds_extendible_weight() {
        // Brute-force separable-component heuristic on a fixed test set: the
        // best weight over sampled separable states is a lower bound for the
        // extendible weight.
        let mut rng = trial_rng(191, 9);
        for rho in [werner(2, -0.9).unwrap(), crate::statezoo::upsilon_n(1)] {
            let lam = lambda_max(&rho, 1).unwrap().lambda_max;
            let mut best_sep: f64 = 0.0;
            for _ in 0..40 {
                // Random separable candidate: mixture of product states.
                let mut m = ComplexMatrix::zeros(4, 4);
                for _ in 0..6 {
                    let a = rng.haar_vector(2);
                    let b = rng.haar_vector(2);
                    let prod = crate::linalg::kron_vec(&a, &b);
                    let w = rng.uniform();
                    let proj = ComplexMatrix::projector(&prod);
                    m = &m + &proj.scale_re(w);
                }
                let sep =
                    DensityMatrix::from_unnormalized(&m, rho.profile().clone()).unwrap();
                let dm = d_max(&sep, &rho).unwrap();
                if dm.is_finite() {
                    best_sep = best_sep.max(libm::exp2(-dm));
                }
            }
            assert!(
                lam >= best_sep - 1e-6,
                "extendible weight {lam} below separable weight {best_sep}"
            );
        }
    }
}
