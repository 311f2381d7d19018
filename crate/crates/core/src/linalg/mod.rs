//! Dense complex matrix kernel.
//!
//! Everything here works in the fixed computational basis `{|i⟩}`; bipartite
//! operators on `A ⊗ B` use the row-major index `a * |B| + b`.

mod eigen;
mod matrix;
mod ops;

pub use eigen::{eig_hermitian, HermitianEigenResult};
pub use matrix::ComplexMatrix;
pub use ops::{
    entropy_of_eigenvalues, hermitian_function, kron, max_norm, operator_norm, partial_trace,
    project_psd, psd_sqrt, singular_values, trace_norm, von_neumann_entropy, Keep,
};

use crate::Real;

/// Scales an `f64` tolerance up to what the scalar type can resolve.
pub(crate) fn tol<T: Real>(base: f64) -> T {
    let floor = T::epsilon() * T::lit(100.0);
    T::lit(base).max(floor)
}
