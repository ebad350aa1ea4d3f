//! Constructors for the concrete state families used across the crate:
//! maximally entangled states, the W-like `upsilon` family, Werner states,
//! the locking construction and its decohered form, private states, and the
//! W/GHZ vectors.  Every constructor returns a validated [`DensityMatrix`].

use alloc::vec::Vec;

use crate::linalg::scalar;
use crate::linalg::{
    permute_factors, ComplexMatrix, DensityMatrix, DimensionProfile, LinalgError, Party,
    C64,
};

/// Parameters of the locking construction: local dimension `d` and coherence
/// strength `c` coupling the two flag sectors.  Positivity requires
/// `c <= sqrt(d)`.
#[derive(Debug, Clone, Copy)]
pub struct LockingStateParams {
    pub d: usize,
    pub c: f64,
}

/// Projector onto the maximally entangled state `(1/sqrt d) sum_i |ii>`.
pub fn max_entangled(d: usize) -> DensityMatrix {
    assert!(d >= 2);
    let amp = 1.0 / scalar::sqrt(d as f64);
    let mut v = alloc::vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(amp, 0.0);
    }
    DensityMatrix::new(
        ComplexMatrix::projector(&v),
        DimensionProfile::bipartite(d, d),
    )
    .expect("maximally entangled state is valid")
}

/// Two-qubit state `(n/(n+2)) |00><00| + (2/(n+2)) |phi+><phi+|` with
/// `|phi+> = (|01> + |10>)/sqrt 2`; the two-party marginal of an
/// (n+2)-party W state.
pub fn upsilon_n(n: usize) -> DensityMatrix {
    assert!(n >= 1);
    let w00 = n as f64 / (n as f64 + 2.0);
    let wphi = 2.0 / (n as f64 + 2.0);
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, C64::new(w00, 0.0));
    for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        m.set(r, c, C64::new(wphi / 2.0, 0.0));
    }
    DensityMatrix::new(m, DimensionProfile::bipartite(2, 2)).expect("upsilon_n is valid")
}

/// Werner family `(I + alpha P)/(d^2 + alpha d)` with `P` the swap operator.
///
/// Spectrum: `(1+alpha)/(d^2+alpha d)` on the symmetric subspace and
/// `(1-alpha)/(d^2+alpha d)` on the antisymmetric one.
pub fn werner(d: usize, alpha: f64) -> Result<DensityMatrix, LinalgError> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(LinalgError::OutOfRange(alloc::format!(
            "werner parameter must lie in [-1, 1], got {alpha}"
        )));
    }
    let denom = (d * d) as f64 + alpha * d as f64;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m.add_at(i * d + j, i * d + j, C64::new(1.0 / denom, 0.0));
            m.add_at(i * d + j, j * d + i, C64::new(alpha / denom, 0.0));
        }
    }
    DensityMatrix::new(m, DimensionProfile::bipartite(d, d))
}

/// Locking state on `(C^2 (x) C^d)_A (x) (C^2 (x) C^d)_B`.
///
/// In the flag-pair basis the matrix is block structured: the `|00>` sector
/// carries `d P_+`, the `|11>` sector carries `sigma = sum_{i=1}^{d-1}
/// |i0><i0|`, and the off-diagonal `|00><11|` sector carries the coupling
/// `c |phi_d><e|` with `|e> = |1 0>`, all weighted by `1/(2d-1)`.  Factors
/// are ordered A-flag, A-qudit, B-flag, B-qudit.
pub fn locking_state(p: LockingStateParams) -> Result<DensityMatrix, LinalgError> {
    let LockingStateParams { d, c } = p;
    if d < 2 {
        return Err(LinalgError::OutOfRange("locking state needs d >= 2".into()));
    }
    if !(0.0..=scalar::sqrt(d as f64) + 1e-12).contains(&c) {
        return Err(LinalgError::OutOfRange(alloc::format!(
            "coherence strength must lie in [0, sqrt(d)], got {c}"
        )));
    }
    let dd = d * d;
    let norm = 1.0 / (2.0 * d as f64 - 1.0);

    // Inner operators on C^d (x) C^d.
    let p_plus = max_entangled(d).matrix().clone();
    let mut sigma = ComplexMatrix::zeros(dd, dd);
    for i in 1..d {
        sigma.set(i * d, i * d, C64::new(1.0, 0.0));
    }
    // Coupling c |phi_d><e| with |e> = |1 0>.
    let amp = 1.0 / scalar::sqrt(d as f64);
    let mut coupling = ComplexMatrix::zeros(dd, dd);
    for i in 0..d {
        coupling.set(i * d + i, d, C64::new(c * amp, 0.0));
    }

    // Assemble on (flagA, flagB, a, b): flag-pair index 0 = |00>, 3 = |11>.
    let mut m = ComplexMatrix::zeros(4 * dd, 4 * dd);
    let mut put_block = |fr: usize, fc: usize, block: &ComplexMatrix, scale: f64| {
        for r in 0..dd {
            for cidx in 0..dd {
                let v = block.at(r, cidx);
                if v.re != 0.0 || v.im != 0.0 {
                    m.add_at(fr * dd + r, fc * dd + cidx, v * scale);
                }
            }
        }
    };
    put_block(0, 0, &p_plus, d as f64 * norm);
    put_block(3, 3, &sigma, norm);
    put_block(0, 3, &coupling, norm);
    put_block(3, 0, &coupling.dagger(), norm);

    let assembled = DensityMatrix::new(
        m,
        DimensionProfile::new(
            alloc::vec![2, 2, d, d],
            alloc::vec![Party::A, Party::B, Party::A, Party::B],
        )?,
    )?;
    // Reorder to (flagA, a, flagB, b) so all A factors precede all B factors.
    permute_factors(&assembled, &[0, 2, 1, 3])
}

/// The decohered locking state
/// `(d/(2d-1)) P_+ + (1/(2d-1)) sum_{i=1}^{d-1} |i0><i0|` on `C^d (x) C^d`.
pub fn decohered_locking_state(d: usize) -> DensityMatrix {
    upsilon_eps(d, 0.0).expect("eps = 0 is always in range")
}

/// One-parameter perturbation of the decohered locking state:
/// `[d/(2d-1) + eps/2] P_+ + [1/(2d-1) - eps/(2(d-1))] sum |i0><i0|`.
///
/// Valid for `0 <= eps <= 2(d-1)/(2d-1)`; the trace is 1 by construction and
/// the trace distance to the `eps = 0` state equals `eps`.
pub fn upsilon_eps(d: usize, eps: f64) -> Result<DensityMatrix, LinalgError> {
    assert!(d >= 2);
    let max_eps = 2.0 * (d as f64 - 1.0) / (2.0 * d as f64 - 1.0);
    if !(0.0..=max_eps + 1e-15).contains(&eps) {
        return Err(LinalgError::OutOfRange(alloc::format!(
            "eps must lie in [0, {max_eps}], got {eps}"
        )));
    }
    let w_plus = d as f64 / (2.0 * d as f64 - 1.0) + eps / 2.0;
    let w_sigma = 1.0 / (2.0 * d as f64 - 1.0) - eps / (2.0 * (d as f64 - 1.0));
    let p_plus = max_entangled(d).matrix().clone();
    let mut m = p_plus.scale_re(w_plus);
    for i in 1..d {
        m.add_at(i * d, i * d, C64::new(w_sigma, 0.0));
    }
    DensityMatrix::new(m, DimensionProfile::bipartite(d, d))
}

/// Private (twisted-singlet) state
/// `(1/2) sum_{i,j} |ii><jj| (x) U_i sigma U_j^dag` on key qubits `A B` and
/// shield `A' B'`, returned with factors ordered `A, A', B, B'`.
pub fn private_state(
    sigma_inner: &DensityMatrix,
    u0: &ComplexMatrix,
    u1: &ComplexMatrix,
) -> Result<DensityMatrix, LinalgError> {
    let inner = sigma_inner.profile();
    inner.require_bipartite()?;
    let n = inner.total_dim();
    for u in [u0, u1] {
        if !u.is_square() || u.rows() != n {
            return Err(LinalgError::Dimension(
                "twisting unitaries must match the inner state dimension".into(),
            ));
        }
        let dev = (&u.dagger().mul(u) - &ComplexMatrix::identity(n)).max_abs();
        if dev > 1e-10 {
            return Err(LinalgError::Dimension(alloc::format!(
                "twisting operator is not unitary (deviation {dev:.3e})"
            )));
        }
    }
    let rotated = [u0.mul(sigma_inner.matrix()), u1.mul(sigma_inner.matrix())];
    let us = [u0, u1];

    // Assemble on (flagA, flagB, inner...): flag-pair 0 = |00>, 3 = |11>.
    let side = 4 * n;
    let mut m = ComplexMatrix::zeros(side, side);
    for i in 0..2usize {
        for j in 0..2usize {
            let block = rotated[i].mul(&us[j].dagger());
            let (fr, fc) = (3 * i, 3 * j);
            for r in 0..n {
                for c in 0..n {
                    m.add_at(fr * n + r, fc * n + c, block.at(r, c) * 0.5);
                }
            }
        }
    }

    // Factors currently (A_key, B_key, inner-factors...); the inner profile
    // itself is (A', B', ...) in its own order.  Build the combined profile
    // then sort all A factors in front of all B factors.
    let mut dims = alloc::vec![2usize, 2usize];
    let mut party = alloc::vec![Party::A, Party::B];
    dims.extend_from_slice(inner.dims());
    party.extend_from_slice(inner.party());
    let assembled = DensityMatrix::new(m, DimensionProfile::new(dims, party.clone())?)?;

    let mut order: Vec<usize> = (0..party.len()).filter(|&i| party[i] == Party::A).collect();
    order.extend((0..party.len()).filter(|&i| party[i] == Party::B));
    permute_factors(&assembled, &order)
}

/// Normalized W-state vector `(1/sqrt n) (|0..01> + |0..10> + ... + |10..0>)`.
pub fn w_state(parties: usize) -> Vec<C64> {
    assert!(parties >= 2);
    let dim = 1usize << parties;
    let amp = 1.0 / scalar::sqrt(parties as f64);
    let mut v = alloc::vec![C64::new(0.0, 0.0); dim];
    for p in 0..parties {
        v[1 << p] = C64::new(amp, 0.0);
    }
    v
}

/// Normalized GHZ-state vector `(|0...0> + |1...1>)/sqrt 2`.
pub fn ghz_state(parties: usize) -> Vec<C64> {
    assert!(parties >= 2);
    let dim = 1usize << parties;
    let mut v = alloc::vec![C64::new(0.0, 0.0); dim];
    v[0] = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[dim - 1] = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    v
}

/// Density matrix of a pure multi-qubit state with the first factor held by
/// A and the rest by B.
pub fn qubit_register_state(v: &[C64], parties: usize) -> DensityMatrix {
    assert_eq!(v.len(), 1 << parties);
    let mut party = alloc::vec![Party::B; parties];
    party[0] = Party::A;
    DensityMatrix::new(
        ComplexMatrix::projector(v),
        DimensionProfile::new(alloc::vec![2; parties], party).unwrap(),
    )
    .expect("normalized projector is a state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dephase_factor, entropy, kron, partial_trace, trace_norm};
    use crate::rng::{trial_rng, RngExt};
    use rand_core::RngCore;

    #[test]
    fn max_entangled_marginals_and_entropy() {
        for d in [2usize, 3] {
            let phi = max_entangled(d);
            assert!((phi.matrix().trace().re - 1.0).abs() < 1e-14);
            let marg = phi.marginal(Party::A).unwrap();
            let expected = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
            assert!((marg.matrix() - &expected).max_abs() < 1e-14);
            let s = entropy(&marg).unwrap();
            assert!((s - scalar::log2(d as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn upsilon_one_is_w_state_marginal() {
        let w = qubit_register_state(&w_state(3), 3);
        let marg = partial_trace(&w, &[0, 1]).unwrap();
        let ups = upsilon_n(1);
        assert!((marg.matrix() - ups.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn upsilon_n_matches_w_marginal_for_larger_n() {
        for n in [1usize, 2, 3] {
            let w = qubit_register_state(&w_state(n + 2), n + 2);
            let marg = partial_trace(&w, &[0, 1]).unwrap();
            assert!((marg.matrix() - upsilon_n(n).matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn upsilon_n_converges_to_00() {
        let mut proj00 = ComplexMatrix::zeros(4, 4);
        proj00.set(0, 0, C64::new(1.0, 0.0));
        for n in [1usize, 5, 50] {
            let diff = upsilon_n(n).matrix() - &proj00;
            let norm = trace_norm(&diff);
            assert!((norm - 4.0 / (n as f64 + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_basics() {
        let flat = werner(2, 0.0).unwrap();
        let expected = ComplexMatrix::identity(4).scale_re(0.25);
        assert!((flat.matrix() - &expected).max_abs() < 1e-14);

        // alpha = -1 at d=2 is the singlet projector.
        let singlet = werner(2, -1.0).unwrap();
        let v = [
            C64::new(0.0, 0.0),
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(-core::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, 0.0),
        ];
        assert!((singlet.matrix() - &ComplexMatrix::projector(&v)).max_abs() < 1e-14);

        let mut rng = trial_rng(5, 0);
        for _ in 0..5 {
            let d = 2 + (rng.next_u64() % 2) as usize;
            let alpha = rng.uniform() * 2.0 - 1.0;
            let w = werner(d, alpha).unwrap();
            assert!((w.matrix().trace().re - 1.0).abs() < 1e-12);
        }
        assert!(werner(2, 1.5).is_err());
    }

    #[test]
    fn werner_spectrum_formula() {
        let d = 3;
        let alpha = -0.63;
        let w = werner(d, alpha).unwrap();
        let denom = (d * d) as f64 + alpha * d as f64;
        let sym = (1.0 + alpha) / denom;
        let asym = (1.0 - alpha) / denom;
        let vals = w.eigenvalues();
        let n_sym = d * (d + 1) / 2;
        let n_asym = d * (d - 1) / 2;
        let mut expected: Vec<f64> = core::iter::repeat(sym)
            .take(n_sym)
            .chain(core::iter::repeat(asym).take(n_asym))
            .collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (&v, &e) in vals.iter().zip(&expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_is_uu_twirl_invariant() {
        let mut rng = trial_rng(9, 3);
        for d in [2usize, 3] {
            let w = werner(d, -0.7).unwrap();
            for _ in 0..3 {
                let u = rng.haar_unitary(d);
                let uu = kron(&u, &u);
                let rotated = uu.sandwich(w.matrix());
                assert!((&rotated - w.matrix()).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn locking_state_structure() {
        // c = 0: block diagonal, dephasing the A flag is a no-op.
        let blockdiag = locking_state(LockingStateParams { d: 2, c: 0.0 }).unwrap();
        let dephased = dephase_factor(&blockdiag, 0).unwrap();
        assert!((dephased.matrix() - blockdiag.matrix()).max_abs() < 1e-14);

        // c = sqrt(d): still PSD with a zero eigenvalue in the coupled sector.
        let d = 3;
        let boundary = locking_state(LockingStateParams {
            d,
            c: scalar::sqrt(d as f64),
        })
        .unwrap();
        let vals = boundary.eigenvalues();
        assert!(vals.last().copied().unwrap() > -1e-12);
        assert!(vals.iter().any(|&v| v.abs() < 1e-12));

        // c beyond sqrt(d) is rejected.
        assert!(locking_state(LockingStateParams { d: 2, c: 1.5 }).is_err());
    }

    #[test]
    fn dephased_locking_state_embeds_decohered_form() {
        let d = 2;
        let rho = locking_state(LockingStateParams {
            d,
            c: scalar::sqrt(d as f64),
        })
        .unwrap();
        let dephased = dephase_factor(&rho, 0).unwrap();

        // Direct-sum embedding: P_+ part in the |00> flag sector, sigma part
        // in the |11> sector, on factors (fA, a, fB, b).
        let dd = d * d;
        let norm = 1.0 / (2.0 * d as f64 - 1.0);
        let p_plus = max_entangled(d).matrix().clone();
        let mut expected = ComplexMatrix::zeros(4 * dd, 4 * dd);
        let flag_profile = DimensionProfile::new(
            alloc::vec![2, d, 2, d],
            alloc::vec![Party::A, Party::A, Party::B, Party::B],
        )
        .unwrap();
        for r in 0..dd {
            let (ri, rj) = (r / d, r % d);
            for c in 0..dd {
                let (ci, cj) = (c / d, c % d);
                let row0 = flag_profile.ravel(&[0, ri, 0, rj]);
                let col0 = flag_profile.ravel(&[0, ci, 0, cj]);
                expected.add_at(row0, col0, p_plus.at(r, c) * (d as f64 * norm));
            }
        }
        for i in 1..d {
            let row = flag_profile.ravel(&[1, i, 1, 0]);
            expected.add_at(row, row, C64::new(norm, 0.0));
        }
        assert!((dephased.matrix() - &expected).max_abs() < 1e-12);

        // Tracing out the flags gives the decohered state.
        let traced = partial_trace(&dephased, &[1, 3]).unwrap();
        assert!((traced.matrix() - decohered_locking_state(d).matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn upsilon_eps_family() {
        assert!(upsilon_eps(2, 0.9).is_err());
        let eps = 0.1;
        let u = upsilon_eps(2, eps).unwrap();
        // Weight on P_+ is 2/3 + eps/2.
        let p_plus = max_entangled(2);
        let weight = p_plus.matrix().mul(u.matrix()).trace().re;
        assert!((weight - (2.0 / 3.0 + 0.05)).abs() < 1e-12);
        // Trace distance to the unperturbed state equals eps.
        let diff = u.matrix() - upsilon_eps(2, 0.0).unwrap().matrix();
        assert!((trace_norm(&diff) - eps).abs() < 1e-12);
        // eps = 0 reproduces the decohered locking state.
        assert_eq!(
            upsilon_eps(2, 0.0).unwrap().matrix(),
            decohered_locking_state(2).matrix()
        );
    }

    #[test]
    fn private_state_is_valid_and_key_part_is_max_entangled() {
        let mut rng = trial_rng(31, 2);
        let sigma = rng.density(DimensionProfile::bipartite(2, 2));
        let u1 = rng.haar_unitary(4);
        let gamma = private_state(&sigma, &ComplexMatrix::identity(4), &u1).unwrap();
        assert!((gamma.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(gamma.profile().dims(), &[2, 2, 2, 2]);
        assert!(gamma.profile().is_party_sorted());

        // With trivial twisting the key marginal is maximally entangled.
        let plain = private_state(
            &sigma,
            &ComplexMatrix::identity(4),
            &ComplexMatrix::identity(4),
        )
        .unwrap();
        // Factors are (A_key, A', B_key, B'); keep the key qubits.
        let key = partial_trace(&plain, &[0, 2]).unwrap();
        assert!((key.matrix() - max_entangled(2).matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn w_and_ghz_vectors() {
        let w = w_state(3);
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);

        let ghz = qubit_register_state(&ghz_state(3), 3);
        let marg = partial_trace(&ghz, &[0, 1]).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(0, 0, C64::new(0.5, 0.0));
        expected.set(3, 3, C64::new(0.5, 0.0));
        assert!((marg.matrix() - &expected).max_abs() < 1e-14);
    }
}
