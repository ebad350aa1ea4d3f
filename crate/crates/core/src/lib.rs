//! Certification toolkit for symmetric extendibility of bipartite quantum states.
//!
//! The crate answers three families of questions about a bipartite density
//! matrix `rho_AB`:
//!
//! * **Membership** — is `rho_AB` k-extendible, i.e. does it admit an
//!   extension to `A` plus `k+1` copies of `B` that is invariant under every
//!   permutation of the B copies?  [`extendibility::is_k_extendible`] decides
//!   this with a dense semidefinite program; an analytic fast path covers the
//!   two-qubit case and an alternating-projection oracle cross-validates the
//!   solver.
//! * **Decomposition** — what is the largest weight `lambda` such that
//!   `rho = lambda * sigma_ext + (1 - lambda) * sigma_next` with `sigma_ext`
//!   symmetric extendible?  [`bsa::lambda_max`] computes the optimal split,
//!   the `1 - lambda_max` monotone, the max-relative entropy and the trace
//!   distance to the extendible set.
//! * **Consequences** — coherent information, Werner-family classification
//!   scans, a randomized two-copy filtering search for one-way distillability
//!   and continuity bounds on the one-way secret-key rate live in
//!   [`analysis`].
//!
//! The crate is `no_std` (with `alloc`); all operations are pure functions of
//! their inputs and safe to evaluate concurrently.  Randomized routines take
//! an explicit seed and are reproducible across runs and thread counts.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod bsa;
pub mod extendibility;
pub mod linalg;
pub mod opt;
pub mod rng;
pub mod sdp;
pub mod statezoo;
pub mod symmetry;

pub use linalg::{ComplexMatrix, DensityMatrix, DimensionProfile, Party, C64};
