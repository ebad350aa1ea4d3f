//! Cross-module consistency properties: solver-vs-oracle agreement, spectra
//! of symmetric pure states, witness validity, and an independent objective
//! check on the interior-point path.

use symext_core::extendibility::{
    extension_feasibility_constraints, is_k_extendible, pure_extension_spectral_check,
};
use symext_core::linalg::{
    eig_hermitian, partial_trace, ComplexMatrix, DensityMatrix, DimensionProfile, Party,
    SparseHerm, C64,
};
use symext_core::rng::{trial_rng, RngExt};
use symext_core::sdp::{
    self, project_feasibility, Feasibility, SdpConstraint, SdpProblem, SdpStatus, Sense,
};
use symext_core::symmetry::symmetric_projector;

#[test]
fn margin_sign_agrees_with_projection_oracle() {
    let mut rng = trial_rng(211, 0);
    let mut decided = 0;
    for trial in 0..60 {
        let rho = rng.density(DimensionProfile::bipartite(2, 2));
        let verdict = is_k_extendible(&rho, 1).unwrap();
        if verdict.margin.abs() <= 1e-5 {
            continue;
        }
        let (sides, constraints) = extension_feasibility_constraints(&rho, 1).unwrap();
        let oracle = project_feasibility(&sides, &constraints, 4000);
        match oracle {
            Feasibility::Feasible(_) => {
                assert!(
                    verdict.margin > 0.0,
                    "trial {trial}: oracle feasible, margin {}",
                    verdict.margin
                );
            }
            Feasibility::Infeasible { .. } => {
                assert!(
                    verdict.margin < 0.0,
                    "trial {trial}: oracle infeasible, margin {}",
                    verdict.margin
                );
            }
            Feasibility::Undecided => continue,
        }
        decided += 1;
    }
    assert!(decided >= 40, "only {decided} oracle runs decided");
}

#[test]
fn feasible_witnesses_reproduce_the_state() {
    let mut rng = trial_rng(223, 1);
    let mut found = 0;
    for _ in 0..30 {
        let rho = rng.density(DimensionProfile::bipartite(2, 2));
        let verdict = is_k_extendible(&rho, 1).unwrap();
        if !verdict.feasible || verdict.margin < 1e-6 {
            continue;
        }
        let witness = verdict.witness.expect("interior verdicts carry witnesses");
        let marginal = partial_trace(&witness, &[0, 1]).unwrap();
        assert!(
            (marginal.matrix() - rho.matrix()).max_abs() <= 1e-7,
            "witness marginal deviates"
        );
        found += 1;
    }
    assert!(found >= 5, "too few feasible samples: {found}");
}

#[test]
fn bipartition_spectra_of_fully_symmetric_states_agree() {
    // Pure states in the Bose-symmetric subspace of (C^d)^(x)m have equal
    // marginal spectra across any bipartition.
    let mut rng = trial_rng(227, 2);
    for (d, m, l) in [(2usize, 3usize, 1usize), (2, 4, 2), (3, 2, 1)] {
        let proj = symmetric_projector(d, m);
        let side = d.pow(m as u32);
        for _ in 0..10 {
            let raw = rng.haar_vector(side);
            let sym = proj.matvec(&raw);
            let norm: f64 = sym.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            let v: Vec<C64> = sym.iter().map(|z| z / norm).collect();
            let state = DensityMatrix::new(
                ComplexMatrix::projector(&v),
                DimensionProfile::new(vec![d; m], vec![Party::B; m]).unwrap(),
            )
            .unwrap();
            let front: Vec<usize> = (0..l).collect();
            let back: Vec<usize> = (l..m).collect();
            let mut sa = partial_trace(&state, &front).unwrap().eigenvalues();
            let mut sb = partial_trace(&state, &back).unwrap().eigenvalues();
            let len = sa.len().max(sb.len());
            sa.resize(len, 0.0);
            sb.resize(len, 0.0);
            for (x, y) in sa.iter().zip(&sb) {
                assert!((x - y).abs() < 1e-9, "d={d} m={m} l={l}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn b_symmetrized_extension_vectors_pass_the_spectral_check() {
    let mut rng = trial_rng(229, 3);
    let proj = symmetric_projector(2, 2);
    let mut accepted = 0;
    for _ in 0..40 {
        let raw = rng.haar_vector(8);
        let mut v = vec![C64::new(0.0, 0.0); 8];
        for a in 0..2 {
            for bb in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for bb2 in 0..4 {
                    acc += proj.at(bb, bb2) * raw[a * 4 + bb2];
                }
                v[a * 4 + bb] = acc;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        assert!(pure_extension_spectral_check(&v, 2, 2, 1).unwrap());
        accepted += 1;
    }
    assert!(accepted >= 30);
}

#[test]
fn analytic_and_sdp_methods_agree_broadly() {
    use symext_core::extendibility::two_qubit_extendible_analytic;
    let mut rng = trial_rng(239, 5);
    let mut checked = 0;
    for _ in 0..200 {
        let rho = rng.density(DimensionProfile::bipartite(2, 2));
        let analytic = two_qubit_extendible_analytic(&rho).unwrap();
        if analytic.margin.abs() <= 1e-4 {
            continue;
        }
        let sdp_verdict = is_k_extendible(&rho, 1).unwrap();
        assert_eq!(
            analytic.feasible, sdp_verdict.feasible,
            "analytic {} vs sdp {}",
            analytic.margin, sdp_verdict.margin
        );
        checked += 1;
    }
    assert!(checked >= 150, "only {checked} samples off the boundary");
}

#[test]
fn one_way_locc_closure_over_many_maps() {
    use symext_core::extendibility::{one_way_locc_apply, random_one_extendible};
    use symext_core::linalg::eig_hermitian as eig;
    let mut rng = trial_rng(241, 6);
    let mut applied = 0;
    while applied < 50 {
        let rho = random_one_extendible(2, 2, &mut rng);
        // Random two-outcome instrument on A with unitary B corrections.
        let g0 = rng.ginibre(2);
        let g1 = rng.ginibre(2);
        let gram = {
            let a = g0.dagger().mul(&g0);
            let b = g1.dagger().mul(&g1);
            (&a + &b).hermitize()
        };
        let (vals, _) = eig(&gram).unwrap();
        let scale = 1.0 / vals[0].max(1e-12).sqrt();
        let outcome = match one_way_locc_apply(
            &rho,
            &[g0.scale_re(scale), g1.scale_re(scale)],
            &[vec![rng.haar_unitary(2)], vec![rng.haar_unitary(2)]],
        ) {
            Ok(o) => o,
            Err(_) => continue,
        };
        let verdict = is_k_extendible(&outcome.state, 1).unwrap();
        assert!(
            verdict.feasible,
            "closure violated at sample {applied}: margin {}",
            verdict.margin
        );
        applied += 1;
    }
}

#[test]
fn boundary_instance_is_never_called_infeasible() {
    // The alternating-projection oracle on the extendibility boundary may
    // stay undecided or certify feasibility with a near-zero margin, but
    // must not report infeasibility.
    let rho = symext_core::statezoo::werner(2, -0.8).unwrap();
    let (sides, cons) = extension_feasibility_constraints(&rho, 1).unwrap();
    match project_feasibility(&sides, &cons, 3000) {
        Feasibility::Infeasible { gap } => {
            panic!("boundary instance declared infeasible with gap {gap}")
        }
        _ => {}
    }
}

/// Independent check of the interior-point objective: bisection over the
/// objective level using only the alternating-projection oracle.
#[test]
fn ipm_objective_matches_projection_bisection() {
    let mut rng = trial_rng(233, 4);
    for trial in 0..4 {
        let n = 3;
        // Random interior point and constraints pinning its pairings.
        let x0 = {
            let g = rng.ginibre(n);
            let m = g.mul(&g.dagger());
            let tr = m.trace().re;
            m.scale_re(1.0 / tr)
        };
        let c = rng.hermitian(n);
        let a1 = rng.hermitian(n);
        let problem = SdpProblem::new(
            &c,
            vec![
                (ComplexMatrix::identity(n), 1.0),
                (a1.clone(), a1.mul(&x0).trace().re),
            ],
            Sense::Minimize,
        )
        .unwrap();
        let sol = sdp::solve(&problem).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);

        // Oracle bisection on gamma: feasibility of {constraints, <C,X> =
        // gamma}.  Treat an undecided probe as infeasible; near-boundary
        // probes stall on the infeasible side, so the bisection still
        // brackets the optimum from above.
        let (cvals, _) = eig_hermitian(&c).unwrap();
        let mut lo = cvals[cvals.len() - 1];
        let mut hi = c.mul(&x0).trace().re;
        let feasible_at = |gamma: f64| -> bool {
            let cons = vec![
                SdpConstraint::new(vec![SparseHerm::from_dense(&ComplexMatrix::identity(n))], 1.0),
                SdpConstraint::new(vec![SparseHerm::from_dense(&a1)], a1.mul(&x0).trace().re),
                SdpConstraint::new(vec![SparseHerm::from_dense(&c)], gamma),
            ];
            matches!(
                project_feasibility(&[n], &cons, 6000),
                Feasibility::Feasible(_)
            )
        };
        assert!(feasible_at(hi), "interior level must be feasible");
        for _ in 0..22 {
            let mid = 0.5 * (lo + hi);
            if feasible_at(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!(
            (hi - sol.primal_objective).abs() < 1e-5,
            "trial {trial}: oracle {} vs ipm {}",
            hi,
            sol.primal_objective
        );
    }
}
