//! Permutation operators on tensor factors, symmetric/antisymmetric subspace
//! bases and projectors, and linear invariance constraints for extension
//! spaces.
//!
//! Invariance under the full symmetric group on the B copies is imposed via
//! the adjacent transpositions only: they generate the group and conjugation
//! by a product of generators is the product of conjugations, so a matrix
//! fixed by every adjacent swap is fixed by every permutation.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{ComplexMatrix, SparseHerm, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

/// A permutation of tensor slots realized as a 0/1 unitary on `(C^d)^{k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationOperator {
    perm: Vec<usize>,
    local_dim: usize,
    matrix: ComplexMatrix,
}

impl PermutationOperator {
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Builds the operator moving the value in slot `s` to slot `perm[s]`, so
/// that composition satisfies `P(sigma) P(tau) = P(sigma . tau)`.
pub fn permutation_operator(
    perm: &[usize],
    local_dim: usize,
) -> Result<PermutationOperator, SymmetryError> {
    let k = perm.len();
    let mut seen = alloc::vec![false; k];
    for &p in perm {
        if p >= k || core::mem::replace(&mut seen[p], true) {
            return Err(SymmetryError::InvalidPermutation(alloc::format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
    }
    let side = local_dim.pow(k as u32);
    let mut matrix = ComplexMatrix::zeros(side, side);
    let mut digits = alloc::vec![0usize; k];
    for old in 0..side {
        unravel_uniform(old, local_dim, &mut digits);
        let new = apply_perm_digits(perm, &digits, local_dim);
        matrix.set(new, old, C64::new(1.0, 0.0));
    }
    Ok(PermutationOperator {
        perm: perm.to_vec(),
        local_dim,
        matrix,
    })
}

fn unravel_uniform(mut index: usize, d: usize, digits: &mut [usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] = index % d;
        index /= d;
    }
}

fn apply_perm_digits(perm: &[usize], digits: &[usize], d: usize) -> usize {
    let k = perm.len();
    let mut moved = alloc::vec![0usize; k];
    for s in 0..k {
        moved[perm[s]] = digits[s];
    }
    let mut idx = 0;
    for &m in &moved {
        idx = idx * d + m;
    }
    idx
}

/// All permutations of `0..k` in a fixed deterministic order.
pub(crate) fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    heap_permutations(&mut current, k, &mut out);
    out.sort();
    out
}

fn heap_permutations(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(current, k - 1, out);
        if k % 2 == 0 {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

/// Projector onto the Bose-symmetric subspace of `(C^d)^{k}`:
/// `(1/k!) sum_pi P_pi`, idempotent with rank C(d+k-1, k).
pub fn symmetric_projector(d: usize, k: usize) -> ComplexMatrix {
    assert!(d >= 2 && k >= 1);
    let perms = all_permutations(k);
    let side = d.pow(k as u32);
    let mut acc = ComplexMatrix::zeros(side, side);
    let mut digits = alloc::vec![0usize; k];
    let weight = 1.0 / perms.len() as f64;
    for perm in &perms {
        for old in 0..side {
            unravel_uniform(old, d, &mut digits);
            let new = apply_perm_digits(perm, &digits, d);
            acc.add_at(new, old, C64::new(weight, 0.0));
        }
    }
    acc
}

/// Orthonormal basis of the Bose-symmetric subspace `Sym^k(C^d)`.
///
/// Vectors are indexed by occupation-number multisets in lexicographic order
/// of their non-decreasing index tuples.
#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    pub k: usize,
    pub d: usize,
    pub vectors: Vec<Vec<C64>>,
}

impl SymmetricBasis {
    pub fn new(d: usize, k: usize) -> Self {
        let mut vectors = Vec::new();
        let mut tuple = alloc::vec![0usize; k];
        loop {
            vectors.push(symmetrized_vector(&tuple, d));
            if !next_non_decreasing(&mut tuple, d) {
                break;
            }
        }
        Self { k, d, vectors }
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }
}

/// Orthonormal basis of the antisymmetric subspace `Asym^k(C^d)`, indexed by
/// strictly increasing tuples.
pub fn antisymmetric_basis(d: usize, k: usize) -> Vec<Vec<C64>> {
    let mut vectors = Vec::new();
    let mut tuple: Vec<usize> = (0..k).collect();
    if k > d {
        return vectors;
    }
    loop {
        vectors.push(antisymmetrized_vector(&tuple, d));
        if !next_strictly_increasing(&mut tuple, d) {
            break;
        }
    }
    vectors
}

fn symmetrized_vector(tuple: &[usize], d: usize) -> Vec<C64> {
    let k = tuple.len();
    let side = d.pow(k as u32);
    let mut v = alloc::vec![C64::new(0.0, 0.0); side];
    let perms = all_permutations(k);
    for perm in &perms {
        let mut idx = 0;
        for s in 0..k {
            idx = idx * d + tuple[perm[s]];
        }
        v[idx] += C64::new(1.0, 0.0);
    }
    let norm = crate::linalg::scalar::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

fn antisymmetrized_vector(tuple: &[usize], d: usize) -> Vec<C64> {
    let k = tuple.len();
    let side = d.pow(k as u32);
    let mut v = alloc::vec![C64::new(0.0, 0.0); side];
    let perms = all_permutations(k);
    for perm in &perms {
        let mut idx = 0;
        for s in 0..k {
            idx = idx * d + tuple[perm[s]];
        }
        let sign = perm_sign(perm);
        v[idx] += C64::new(sign, 0.0);
    }
    let norm = crate::linalg::scalar::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

fn perm_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn next_non_decreasing(tuple: &mut [usize], d: usize) -> bool {
    let k = tuple.len();
    for i in (0..k).rev() {
        if tuple[i] + 1 < d {
            let v = tuple[i] + 1;
            for t in tuple.iter_mut().skip(i) {
                *t = v;
            }
            return true;
        }
    }
    false
}

fn next_strictly_increasing(tuple: &mut [usize], d: usize) -> bool {
    let k = tuple.len();
    for i in (0..k).rev() {
        if tuple[i] + 1 < d - (k - 1 - i) {
            tuple[i] += 1;
            for j in (i + 1)..k {
                tuple[j] = tuple[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Group-averages `x` over all permutations of the `copies` B factors of
/// `C^{d_a} (x) (C^{d_b})^{copies}`.
pub fn twirl_b_factors(
    x: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    copies: usize,
) -> ComplexMatrix {
    let side = d_a * d_b.pow(copies as u32);
    assert_eq!(x.rows(), side);
    let perms = all_permutations(copies);
    let mut acc = ComplexMatrix::zeros(side, side);
    let weight = 1.0 / perms.len() as f64;
    let maps: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| extension_index_map(p, d_a, d_b, copies))
        .collect();
    for map in &maps {
        for r in 0..side {
            for c in 0..side {
                acc.add_at(map[r], map[c], x.at(r, c) * weight);
            }
        }
    }
    acc
}

/// Index map on `C^{d_a} (x) (C^{d_b})^{copies}` induced by permuting the B
/// slots (A digit untouched).
pub(crate) fn extension_index_map(
    perm: &[usize],
    d_a: usize,
    d_b: usize,
    copies: usize,
) -> Vec<usize> {
    let b_side = d_b.pow(copies as u32);
    let side = d_a * b_side;
    let mut map = alloc::vec![0usize; side];
    let mut digits = alloc::vec![0usize; copies];
    for idx in 0..side {
        let a = idx / b_side;
        let b = idx % b_side;
        unravel_uniform(b, d_b, &mut digits);
        let nb = apply_perm_digits(perm, &digits, d_b);
        map[idx] = a * b_side + nb;
    }
    map
}

/// Independent linear constraints forcing a Hermitian matrix on
/// `C^{d_a} (x) (C^{d_b})^{k+1}` to be invariant under every permutation of
/// the k+1 B factors.
///
/// Entry pairs are grouped into orbits under the group generated by the
/// adjacent B-slot transpositions; each orbit contributes equality
/// constraints chained to its representative, so the set is linearly
/// independent by construction.  Each constraint is a trace pairing
/// `tr(M X) = 0` with sparse Hermitian `M`.
pub fn invariant_constraint_basis(
    d_a: usize,
    d_b: usize,
    k: usize,
) -> Result<Vec<SparseHerm>, SymmetryError> {
    let copies = k + 1;
    let side = d_a * d_b.pow(copies as u32);
    if side > 160 {
        return Err(SymmetryError::SizeLimit(alloc::format!(
            "extension side {side} exceeds the dense limit 160"
        )));
    }

    // Adjacent transpositions as index maps.
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for t in 0..k {
        let mut perm: Vec<usize> = (0..copies).collect();
        perm.swap(t, t + 1);
        gens.push(extension_index_map(&perm, d_a, d_b, copies));
    }

    let mut constraints = Vec::new();
    let mut visited = alloc::vec![false; side * side];

    for rep_r in 0..side {
        for rep_c in rep_r..side {
            if visited[rep_r * side + rep_c] {
                continue;
            }
            // BFS over ordered pairs under the simultaneous slot action,
            // keyed by r*side + c.
            let mut orbit: Vec<(usize, usize)> = Vec::new();
            let mut queue = VecDeque::new();
            let mut in_orbit = alloc::collections::BTreeSet::new();
            queue.push_back((rep_r, rep_c));
            in_orbit.insert(rep_r * side + rep_c);
            while let Some((r, c)) = queue.pop_front() {
                orbit.push((r, c));
                for g in &gens {
                    let nr = g[r];
                    let nc = g[c];
                    if in_orbit.insert(nr * side + nc) {
                        queue.push_back((nr, nc));
                    }
                }
            }

            let mirror_in_orbit = rep_r != rep_c && in_orbit.contains(&(rep_c * side + rep_r));

            // Distinct canonical (upper-triangle) pairs of the orbit.
            let mut canon: Vec<(usize, usize)> = orbit
                .iter()
                .map(|&(r, c)| if r <= c { (r, c) } else { (c, r) })
                .collect();
            canon.sort_unstable();
            canon.dedup();
            for &(u, v) in &canon {
                visited[u * side + v] = true;
            }

            if rep_r == rep_c {
                // Diagonal orbit: all entries real and equal.
                for &(u, v) in canon.iter().filter(|&&p| p != (rep_r, rep_c)) {
                    debug_assert_eq!(u, v);
                    let mut m = SparseHerm::new(side);
                    m.add(rep_r, rep_r, C64::new(1.0, 0.0));
                    m.add(u, u, C64::new(-1.0, 0.0));
                    constraints.push(m);
                }
                continue;
            }

            if mirror_in_orbit {
                // The representative entry must be real: Im X_rc = 0.
                let mut m = SparseHerm::new(side);
                m.add(rep_r, rep_c, C64::new(0.0, 0.5));
                constraints.push(m);
            }
            for &(u, v) in canon.iter().filter(|&&p| p != (rep_r, rep_c)) {
                // Re X_uv = Re X_rc.
                let mut re = SparseHerm::new(side);
                re.add(rep_r, rep_c, C64::new(0.5, 0.0));
                re.add(u, v, C64::new(-0.5, 0.0));
                constraints.push(re);
                // Im X_uv = +/- Im X_rc (sign fixed by the orbit relation;
                // with the mirror present both signs occur and the
                // representative imaginary part is already pinned to zero).
                let mut im = SparseHerm::new(side);
                im.add(rep_r, rep_c, C64::new(0.0, 0.5));
                let flipped = !in_orbit.contains(&(u * side + v));
                let sign = if flipped { 0.5 } else { -0.5 };
                im.add(u, v, C64::new(0.0, sign));
                constraints.push(im);
            }
        }
    }

    Ok(constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::rng::{trial_rng, RngExt};

    fn swap_two(d: usize) -> ComplexMatrix {
        permutation_operator(&[1, 0], d).unwrap().matrix().clone()
    }

    #[test]
    fn identity_permutation_is_identity() {
        let p = permutation_operator(&[0, 1, 2], 2).unwrap();
        assert_eq!(p.matrix(), &ComplexMatrix::identity(8));
    }

    #[test]
    fn swap_moves_basis_states() {
        let p = swap_two(2);
        // SWAP |01> = |10>
        let mut v = alloc::vec![C64::new(0.0, 0.0); 4];
        v[1] = C64::new(1.0, 0.0);
        let w = p.matvec(&v);
        assert!((w[2].re - 1.0).abs() < 1e-15);
        // Involution.
        assert_eq!(p.mul(&p), ComplexMatrix::identity(4));
    }

    #[test]
    fn composition_law_holds() {
        let d = 2;
        let a = permutation_operator(&[1, 2, 0], d).unwrap();
        let b = permutation_operator(&[0, 2, 1], d).unwrap();
        // P(a) P(b) = P(a . b) with (a.b)(s) = a(b(s)).
        let composed: Vec<usize> = (0..3).map(|s| a.perm()[b.perm()[s]]).collect();
        let c = permutation_operator(&composed, d).unwrap();
        assert_eq!(a.matrix().mul(b.matrix()), *c.matrix());
    }

    #[test]
    fn symmetric_projector_ranks() {
        for (d, k, rank) in [(2usize, 2usize, 3usize), (2, 3, 4), (3, 2, 6)] {
            let p = symmetric_projector(d, k);
            assert!((&p.mul(&p) - &p).max_abs() < 1e-10, "idempotent");
            assert!((p.trace().re - rank as f64).abs() < 1e-9);
            assert_eq!(SymmetricBasis::new(d, k).count(), rank);
        }
        // d=2, k=2 projector is (I + SWAP)/2.
        let expected = (&ComplexMatrix::identity(4) + &swap_two(2)).scale_re(0.5);
        assert!((&symmetric_projector(2, 2) - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn projector_commutes_with_permutations() {
        let p = symmetric_projector(2, 3);
        for perm in all_permutations(3) {
            let u = permutation_operator(&perm, 2).unwrap();
            let lhs = p.mul(u.matrix());
            let rhs = u.matrix().mul(&p);
            assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_basis_vectors_are_invariant_and_orthonormal() {
        let basis = SymmetricBasis::new(3, 2);
        for perm in all_permutations(2) {
            let u = permutation_operator(&perm, 3).unwrap();
            for v in &basis.vectors {
                let w = u.matrix().matvec(v);
                let diff: f64 = w
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>();
                assert!(diff < 1e-20);
            }
        }
        for (i, v) in basis.vectors.iter().enumerate() {
            for (j, w) in basis.vectors.iter().enumerate() {
                let dot: C64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot.re - expect).abs() < 1e-12 && dot.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn antisymmetric_basis_counts() {
        assert_eq!(antisymmetric_basis(2, 2).len(), 1);
        assert_eq!(antisymmetric_basis(3, 2).len(), 3);
        assert_eq!(antisymmetric_basis(4, 2).len(), 6);
        assert_eq!(antisymmetric_basis(2, 3).len(), 0);
    }

    #[test]
    fn twirled_matrix_satisfies_constraints() {
        for (d_a, d_b, k) in [(2usize, 2usize, 1usize), (2, 2, 2), (3, 2, 1)] {
            let mut rng = trial_rng(17, (d_a * 10 + d_b + k) as u64);
            let side = d_a * d_b.pow((k + 1) as u32);
            let x = rng.hermitian(side);
            let xt = twirl_b_factors(&x, d_a, d_b, k + 1);
            let constraints = invariant_constraint_basis(d_a, d_b, k).unwrap();
            for c in &constraints {
                assert!(
                    c.pair(&xt).abs() < 1e-10,
                    "twirl violates constraint at d_a={d_a} d_b={d_b} k={k}"
                );
            }
        }
    }

    #[test]
    fn enforcing_constraints_matches_explicit_twirl_for_swap() {
        // k=1, d_a=d_b=2: project a random Hermitian onto the constraint null
        // space by twirling and compare with (X + P X P)/2.
        let mut rng = trial_rng(23, 0);
        let x = rng.hermitian(8);
        let p = kron(
            &ComplexMatrix::identity(2),
            &permutation_operator(&[1, 0], 2).unwrap().matrix().clone(),
        );
        let avg = (&x + &p.mul(&x).mul(&p)).scale_re(0.5);
        let twirled = twirl_b_factors(&x, 2, 2, 2);
        assert!((&avg - &twirled).max_abs() < 1e-12);
    }

    #[test]
    fn adjacent_transpositions_generate_full_invariance() {
        // A matrix satisfying the constraint basis is invariant under a
        // non-adjacent permutation as well.
        let mut rng = trial_rng(29, 1);
        let x = rng.hermitian(16);
        let xt = twirl_b_factors(&x, 2, 2, 3);
        // (0 2) swap of the three B copies of a k=2 extension with d_a=2.
        let map = extension_index_map(&[2, 1, 0], 2, 2, 3);
        let mut moved = ComplexMatrix::zeros(16, 16);
        for r in 0..16 {
            for c in 0..16 {
                moved.set(map[r], map[c], xt.at(r, c));
            }
        }
        assert!((&moved - &xt).max_abs() < 1e-12);
    }

    #[test]
    fn constraint_count_matches_twirl_fixed_space() {
        // dim Herm(n) - dim of the twirl-fixed subspace, computed by brute
        // force from the twirl superoperator rank.
        for (d_a, d_b, k) in [(2usize, 2usize, 1usize), (2, 2, 2)] {
            let side = d_a * d_b.pow((k + 1) as u32);
            let herm_dim = side * side;
            let fixed = twirl_fixed_dimension(d_a, d_b, k);
            let count = invariant_constraint_basis(d_a, d_b, k).unwrap().len();
            assert_eq!(count, herm_dim - fixed, "at d_a={d_a} d_b={d_b} k={k}");
        }
    }

    /// Real dimension of the twirl-fixed Hermitian subspace via eigenvalue
    /// count of the twirl superoperator on a Hermitian basis.
    fn twirl_fixed_dimension(d_a: usize, d_b: usize, k: usize) -> usize {
        let side = d_a * d_b.pow((k + 1) as u32);
        let mut basis: Vec<ComplexMatrix> = Vec::new();
        for i in 0..side {
            let mut m = ComplexMatrix::zeros(side, side);
            m.set(i, i, C64::new(1.0, 0.0));
            basis.push(m);
        }
        for i in 0..side {
            for j in (i + 1)..side {
                let mut m = ComplexMatrix::zeros(side, side);
                m.set(i, j, C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0));
                m.set(j, i, C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0));
                basis.push(m);
                let mut m = ComplexMatrix::zeros(side, side);
                m.set(i, j, C64::new(0.0, core::f64::consts::FRAC_1_SQRT_2));
                m.set(j, i, C64::new(0.0, -core::f64::consts::FRAC_1_SQRT_2));
                basis.push(m);
            }
        }
        // The twirl is an orthogonal projector on this real inner-product
        // space, so its fixed dimension is its trace.
        let mut tracesum = 0.0;
        for b in &basis {
            let tb = twirl_b_factors(b, d_a, d_b, k + 1);
            let dot = tb.mul(b).trace().re;
            tracesum += dot;
        }
        libm::round(tracesum) as usize
    }
}
