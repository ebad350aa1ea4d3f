//! Dense complex matrix substrate: tensor products, partial trace and
//! transpose, Hermitian eigendecomposition, norms and entropies.
//!
//! Everything is stored densely in row-major order; target scale is matrix
//! sides up to a couple of hundred.  All entropies and logarithms are base 2.

pub(crate) mod eig;
mod matrix;
mod sparse;
mod state;

pub use eig::eig_hermitian;
pub use matrix::{kron, kron_vec, ComplexMatrix, C64};
pub use sparse::SparseHerm;
pub use state::{
    dephase_factor, entropy, eta, partial_trace, partial_transpose, permute_factors, trace_norm,
    DensityMatrix, DimensionProfile, Party,
};

use alloc::string::String;

/// Errors raised by the linear-algebra layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is {trace} but must be 1")]
    NotUnitTrace { trace: f64 },
    #[error("factor index {index} out of range for {count} factors")]
    InvalidFactor { index: usize, count: usize },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("matrix entries must be finite")]
    NonFinite,
}

pub(crate) mod scalar {
    //! Thin wrappers over `libm` so the crate stays `no_std`.

    #[inline]
    pub(crate) fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    #[inline]
    pub(crate) fn ln(x: f64) -> f64 {
        libm::log(x)
    }

    #[inline]
    pub(crate) fn log2(x: f64) -> f64 {
        libm::log2(x)
    }

    #[inline]
    pub(crate) fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
}
