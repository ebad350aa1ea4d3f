use alloc::format;
use alloc::vec::Vec;

use super::eig::{eig_hermitian, jacobi};
use super::matrix::{ComplexMatrix, C64};
use super::scalar;
use super::LinalgError;

/// Which party holds a tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// Ordered list of local dimensions with per-factor party labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionProfile {
    dims: Vec<usize>,
    party: Vec<Party>,
}

impl DimensionProfile {
    pub fn new(dims: Vec<usize>, party: Vec<Party>) -> Result<Self, LinalgError> {
        if dims.is_empty() || dims.len() != party.len() {
            return Err(LinalgError::Dimension(format!(
                "profile needs matching non-empty dims/party lists, got {} and {}",
                dims.len(),
                party.len()
            )));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(LinalgError::OutOfRange(
                "local dimensions must be at least 2".into(),
            ));
        }
        Ok(Self { dims, party })
    }

    /// Two-factor `d_A x d_B` profile.
    pub fn bipartite(d_a: usize, d_b: usize) -> Self {
        Self::new(alloc::vec![d_a, d_b], alloc::vec![Party::A, Party::B]).unwrap()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn party(&self) -> &[Party] {
        &self.party
    }

    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim_of(&self, party: Party) -> usize {
        self.dims
            .iter()
            .zip(&self.party)
            .filter(|(_, &p)| p == party)
            .map(|(&d, _)| d)
            .product()
    }

    pub fn indices_of(&self, party: Party) -> Vec<usize> {
        (0..self.factor_count())
            .filter(|&i| self.party[i] == party)
            .collect()
    }

    /// True when the profile holds at least one factor per party.
    pub fn is_bipartite(&self) -> bool {
        self.party.contains(&Party::A) && self.party.contains(&Party::B)
    }

    /// True when every A factor precedes every B factor.
    pub fn is_party_sorted(&self) -> bool {
        let first_b = self.party.iter().position(|&p| p == Party::B);
        match first_b {
            None => true,
            Some(fb) => self.party[fb..].iter().all(|&p| p == Party::B),
        }
    }

    pub fn require_bipartite(&self) -> Result<(), LinalgError> {
        if self.is_bipartite() {
            Ok(())
        } else {
            Err(LinalgError::Dimension(
                "operation needs at least one factor per party".into(),
            ))
        }
    }

    /// Converts a flat index into per-factor digits (row-major).
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut digits = alloc::vec![0usize; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            digits[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        digits
    }

    pub fn ravel(&self, digits: &[usize]) -> usize {
        let mut idx = 0;
        for (i, &d) in digits.iter().enumerate() {
            idx = idx * self.dims[i] + d;
        }
        idx
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite,
/// carrying its tensor-factor profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    profile: DimensionProfile,
}

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-10;
pub(crate) const PSD_TOL: f64 = -1e-9;

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, profile: DimensionProfile) -> Result<Self, LinalgError> {
        if !mat.is_square() || mat.rows() != profile.total_dim() {
            return Err(LinalgError::Dimension(format!(
                "matrix side {} does not match profile dimension {}",
                mat.rows(),
                profile.total_dim()
            )));
        }
        if !mat.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let dev = mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { deviation: dev });
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(LinalgError::NotUnitTrace { trace: tr });
        }
        let (vals, _) = jacobi(&mat.hermitize());
        let min = vals.last().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(LinalgError::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { mat, profile })
    }

    /// Builds from a possibly drifted Hermitian matrix by symmetrizing and
    /// renormalizing the trace before validation.
    pub fn from_unnormalized(
        mat: &ComplexMatrix,
        profile: DimensionProfile,
    ) -> Result<Self, LinalgError> {
        let h = mat.hermitize();
        let tr = h.trace().re;
        if tr.abs() < 1e-14 {
            return Err(LinalgError::NotUnitTrace { trace: tr });
        }
        Self::new(h.scale_re(1.0 / tr), profile)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn side(&self) -> usize {
        self.mat.rows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi(&self.mat.hermitize()).0
    }

    /// Reduced state on the given party.
    pub fn marginal(&self, party: Party) -> Result<DensityMatrix, LinalgError> {
        partial_trace(self, &self.profile.indices_of(party))
    }

    /// Purity `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }
}

/// Reduced state on the kept factors; trace and Hermiticity are preserved.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, LinalgError> {
    let profile = rho.profile();
    let nf = profile.factor_count();
    if keep.is_empty() {
        return Err(LinalgError::Dimension("keep set must be non-empty".into()));
    }
    for &k in keep {
        if k >= nf {
            return Err(LinalgError::InvalidFactor {
                index: k,
                count: nf,
            });
        }
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..nf).filter(|i| !keep_sorted.contains(i)).collect();

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&i| profile.dims()[i]).collect();
    let kept_party: Vec<Party> = keep_sorted.iter().map(|&i| profile.party()[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_dim: usize = traced.iter().map(|&i| profile.dims()[i]).product();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let kept_profile_tmp = DimensionProfile {
        dims: kept_dims.clone(),
        party: kept_party.clone(),
    };
    let traced_dims: Vec<usize> = traced.iter().map(|&i| profile.dims()[i]).collect();

    let mut full_row = alloc::vec![0usize; nf];
    let mut full_col = alloc::vec![0usize; nf];
    for r in 0..out_dim {
        let rd = kept_profile_tmp.unravel(r);
        for c in 0..out_dim {
            let cd = kept_profile_tmp.unravel(c);
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..traced_dim {
                let ed = unravel_dims(&traced_dims, e);
                for (slot, &f) in keep_sorted.iter().enumerate() {
                    full_row[f] = rd[slot];
                    full_col[f] = cd[slot];
                }
                for (slot, &f) in traced.iter().enumerate() {
                    full_row[f] = ed[slot];
                    full_col[f] = ed[slot];
                }
                acc += rho
                    .matrix()
                    .at(profile.ravel(&full_row), profile.ravel(&full_col));
            }
            out.set(r, c, acc);
        }
    }

    DensityMatrix::new(
        out.hermitize(),
        DimensionProfile {
            dims: kept_dims,
            party: kept_party,
        },
    )
}

/// Transposes the listed factors; the result stays Hermitian with unit trace
/// but may fail positivity, so a bare matrix is returned.
pub fn partial_transpose(
    rho: &DensityMatrix,
    factors: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    let profile = rho.profile();
    let nf = profile.factor_count();
    for &f in factors {
        if f >= nf {
            return Err(LinalgError::InvalidFactor {
                index: f,
                count: nf,
            });
        }
    }
    let n = rho.side();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let mut rd = profile.unravel(r);
        for c in 0..n {
            let mut cd = profile.unravel(c);
            for &f in factors {
                core::mem::swap(&mut rd[f], &mut cd[f]);
            }
            out.set(profile.ravel(&rd), profile.ravel(&cd), rho.matrix().at(r, c));
            for &f in factors {
                core::mem::swap(&mut rd[f], &mut cd[f]);
            }
        }
    }
    Ok(out)
}

/// Reorders tensor factors: new factor `i` is old factor `perm[i]`.
pub fn permute_factors(
    rho: &DensityMatrix,
    perm: &[usize],
) -> Result<DensityMatrix, LinalgError> {
    let profile = rho.profile();
    let nf = profile.factor_count();
    let mut seen = alloc::vec![false; nf];
    if perm.len() != nf || perm.iter().any(|&p| p >= nf || core::mem::replace(&mut seen[p], true)) {
        return Err(LinalgError::Dimension(
            "factor permutation must be a bijection on factor indices".into(),
        ));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| profile.dims()[p]).collect();
    let new_party: Vec<Party> = perm.iter().map(|&p| profile.party()[p]).collect();
    let new_profile = DimensionProfile {
        dims: new_dims,
        party: new_party,
    };
    let n = rho.side();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let rd = profile.unravel(r);
        let nr: Vec<usize> = perm.iter().map(|&p| rd[p]).collect();
        let nri = new_profile.ravel(&nr);
        for c in 0..n {
            let cd = profile.unravel(c);
            let nc: Vec<usize> = perm.iter().map(|&p| cd[p]).collect();
            out.set(nri, new_profile.ravel(&nc), rho.matrix().at(r, c));
        }
    }
    DensityMatrix::new(out, new_profile)
}

/// Zeroes every coherence between distinct computational-basis values of one
/// factor (a projective measurement of that factor with the outcome
/// forgotten).
pub fn dephase_factor(rho: &DensityMatrix, factor: usize) -> Result<DensityMatrix, LinalgError> {
    let profile = rho.profile();
    if factor >= profile.factor_count() {
        return Err(LinalgError::InvalidFactor {
            index: factor,
            count: profile.factor_count(),
        });
    }
    let n = rho.side();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let rd = profile.unravel(r);
        for c in 0..n {
            let cd = profile.unravel(c);
            if rd[factor] == cd[factor] {
                out.set(r, c, rho.matrix().at(r, c));
            }
        }
    }
    DensityMatrix::new(out, profile.clone())
}

fn unravel_dims(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = alloc::vec![0usize; dims.len()];
    for i in (0..dims.len()).rev() {
        digits[i] = index % dims[i];
        index /= dims[i];
    }
    digits
}

/// Trace norm (sum of singular values); Hermitian inputs take the eigenvalue
/// fast path, general matrices go through `M^dag M`.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    assert!(m.is_square(), "trace norm defined for square matrices here");
    if m.is_hermitian(1e-12) {
        let (vals, _) = jacobi(&m.hermitize());
        vals.iter().map(|v| v.abs()).sum()
    } else {
        let gram = m.dagger().mul(m);
        let (vals, _) = jacobi(&gram.hermitize());
        vals.iter().map(|&v| scalar::sqrt(v.max(0.0))).sum()
    }
}

/// Von Neumann entropy in bits; eigenvalues below 1e-12 count as exact zeros.
pub fn entropy(rho: &DensityMatrix) -> Result<f64, LinalgError> {
    let (vals, _) = eig_hermitian(rho.matrix())?;
    let min = vals.last().copied().unwrap_or(0.0);
    if min < PSD_TOL {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: min,
        });
    }
    let mut s = 0.0;
    for &l in &vals {
        if l > 1e-12 {
            s -= l * scalar::log2(l);
        }
    }
    Ok(s.max(0.0))
}

/// eta(x) = -x log2(x) on [0, 1], with eta(0) = eta(1) = 0.
pub fn eta(x: f64) -> Result<f64, LinalgError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(LinalgError::OutOfRange(format!(
            "eta needs 0 <= x <= 1, got {x}"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * scalar::log2(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::rng::{trial_rng, RngExt};

    fn bell_phi_plus() -> DensityMatrix {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let v = [
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ];
        DensityMatrix::new(
            ComplexMatrix::projector(&v),
            DimensionProfile::bipartite(2, 2),
        )
        .unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell_phi_plus();
        let marg = partial_trace(&rho, &[0]).unwrap();
        let expected = ComplexMatrix::identity(2).scale_re(0.5);
        assert!((marg.matrix() - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn product_state_partial_trace_recovers_factor() {
        let mut rng = trial_rng(41, 0);
        for _ in 0..10 {
            let a = rng.density(DimensionProfile::bipartite(2, 2));
            let b = rng.density(DimensionProfile::bipartite(2, 3));
            let joint = DensityMatrix::new(
                kron(a.matrix(), b.matrix()),
                DimensionProfile::new(
                    alloc::vec![2, 2, 2, 3],
                    alloc::vec![Party::A, Party::B, Party::A, Party::B],
                )
                .unwrap(),
            )
            .unwrap();
            let left = partial_trace(&joint, &[0, 1]).unwrap();
            assert!((left.matrix() - a.matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_factor() {
        let rho = bell_phi_plus();
        assert!(matches!(
            partial_trace(&rho, &[5]),
            Err(LinalgError::InvalidFactor { .. })
        ));
        assert!(partial_trace(&rho, &[]).is_err());
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let rho = bell_phi_plus();
        let pt = partial_transpose(&rho, &[1]).unwrap();
        let (vals, _) = eig_hermitian(&pt).unwrap();
        assert!((vals.last().unwrap() + 0.5).abs() < 1e-12);
        assert!((pt.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_state_partial_transpose_is_psd() {
        let mut rng = trial_rng(43, 1);
        let a = rng.density(DimensionProfile::bipartite(2, 2));
        let prod = kron(
            a.marginal(Party::A).unwrap().matrix(),
            a.marginal(Party::B).unwrap().matrix(),
        );
        let prod_state = DensityMatrix::new(prod, DimensionProfile::bipartite(2, 2)).unwrap();
        let pt_prod = partial_transpose(&prod_state, &[1]).unwrap();
        let (vals, _) = eig_hermitian(&pt_prod).unwrap();
        assert!(vals.last().unwrap() > &-1e-12);
    }

    #[test]
    fn werner_partial_transpose_boundary() {
        // At alpha = -1/d the minimum eigenvalue of the partial transpose is
        // exactly zero: the transpose of the swap is d P_+, so the spectrum
        // is (1 + alpha d)/(d^2 + alpha d) on P_+ and 1/(d^2 + alpha d) off.
        let w = crate::statezoo::werner(2, -0.5).unwrap();
        let pt = partial_transpose(&w, &[1]).unwrap();
        let (vals, _) = eig_hermitian(&pt).unwrap();
        assert!(vals.last().unwrap().abs() < 1e-12);
    }

    #[test]
    fn trace_norm_cases() {
        assert!((trace_norm(&ComplexMatrix::diag_real(&[1.0, -1.0])) - 2.0).abs() < 1e-14);
        let mut rng = trial_rng(47, 2);
        let rho = rng.density(DimensionProfile::bipartite(2, 2));
        assert!((trace_norm(rho.matrix()) - 1.0).abs() < 1e-12);
        // Non-Hermitian path via singular values: a unitary has trace norm n.
        let u = rng.haar_unitary(3);
        assert!((trace_norm(&u) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn trace_norm_is_a_norm() {
        let mut rng = trial_rng(53, 3);
        for _ in 0..20 {
            let a = rng.hermitian(4);
            let b = rng.hermitian(4);
            let tri = trace_norm(&(&a + &b));
            assert!(tri <= trace_norm(&a) + trace_norm(&b) + 1e-10);
            let s = rng.uniform() * 4.0 - 2.0;
            assert!((trace_norm(&a.scale_re(s)) - s.abs() * trace_norm(&a)).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_values() {
        let half = DensityMatrix::new(
            ComplexMatrix::identity(2).scale_re(0.5),
            DimensionProfile::bipartite(2, 2),
        );
        // I/2 on a bipartite profile has the wrong dimension; use a direct
        // single-factor profile instead.
        assert!(half.is_err());
        let half = DensityMatrix::new(
            ComplexMatrix::identity(2).scale_re(0.5),
            DimensionProfile::new(alloc::vec![2], alloc::vec![Party::A]).unwrap(),
        )
        .unwrap();
        assert!((entropy(&half).unwrap() - 1.0).abs() < 1e-14);

        let pure = bell_phi_plus();
        assert!(entropy(&pure).unwrap().abs() < 1e-12);

        // Independent evaluation of the binary entropy at 0.25.
        let expected = -(0.25f64 * scalar::log2(0.25) + 0.75 * scalar::log2(0.75));
        let diag = DensityMatrix::new(
            ComplexMatrix::diag_real(&[0.75, 0.25]),
            DimensionProfile::new(alloc::vec![2], alloc::vec![Party::A]).unwrap(),
        )
        .unwrap();
        assert!((entropy(&diag).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_is_additive() {
        let mut rng = trial_rng(59, 4);
        for _ in 0..5 {
            let a = rng.density(DimensionProfile::bipartite(2, 2));
            let b = rng.density(DimensionProfile::bipartite(2, 2));
            let joint = DensityMatrix::new(
                kron(a.matrix(), b.matrix()),
                DimensionProfile::new(
                    alloc::vec![2, 2, 2, 2],
                    alloc::vec![Party::A, Party::B, Party::A, Party::B],
                )
                .unwrap(),
            )
            .unwrap();
            let lhs = entropy(&joint).unwrap();
            let rhs = entropy(&a).unwrap() + entropy(&b).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0).unwrap(), 0.0);
        assert_eq!(eta(1.0).unwrap(), 0.0);
        assert!((eta(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((eta(0.1).unwrap() - 0.332193).abs() < 1e-6);
        assert!(eta(-0.1).is_err());
        assert!(eta(1.1).is_err());
    }

    #[test]
    fn permute_factors_round_trip() {
        let mut rng = trial_rng(61, 5);
        let rho = rng.density(
            DimensionProfile::new(
                alloc::vec![2, 3, 2],
                alloc::vec![Party::A, Party::B, Party::B],
            )
            .unwrap(),
        );
        let perm = [2usize, 0, 1];
        let moved = permute_factors(&rho, &perm).unwrap();
        assert_eq!(moved.profile().dims(), &[2, 2, 3]);
        // Inverse permutation restores the original.
        let mut inv = [0usize; 3];
        for (new_pos, &old_pos) in perm.iter().enumerate() {
            inv[old_pos] = new_pos;
        }
        // permute_factors(moved, q) restores rho when q[i] = position of old
        // factor i inside `moved`.
        let back = permute_factors(&moved, &inv).unwrap();
        assert!((back.matrix() - rho.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn dephase_kills_selected_coherences() {
        let rho = bell_phi_plus();
        let dephased = dephase_factor(&rho, 0).unwrap();
        let expected = ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
        assert!((dephased.matrix() - &expected).max_abs() < 1e-14);
    }
}
