//! Rigorous two-sided bounds on the quantum capacity `Q` and private capacity
//! `P` of low-noise quantum channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, partial traces, norms, Hermitian
//!   eigendecomposition and von Neumann entropy (generic over [`Real`]).
//! * [`channel`]: Kraus/Choi/Stinespring representations, complementary
//!   channels and the Pauli channel families (generic over [`Real`]).
//! * [`sdp`]: a small dense primal-dual interior-point SDP solver.
//! * [`diamond`]: diamond norms via SDP and cheaper bounds.
//! * [`degradability`]: degradability parameters, exact and constructed.
//! * [`capacity`]: coherent information, continuity bounds and capacity
//!   intervals.
//!
//! The algebraic layer is scalar-agnostic; the optimisation layer works in
//! `f64`. The aliases below fix the common concrete types.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod degradability;
pub mod diamond;
mod error;
pub mod linalg;
pub mod random;
mod scalar;
pub mod sdp;
mod tolerance;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

pub use num_complex::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

/// Double-precision dense complex matrix.
pub type Matrix = linalg::ComplexMatrix<f64>;
/// Single-precision dense complex matrix.
pub type Matrix32 = linalg::ComplexMatrix<f32>;

/// Double-precision quantum channel.
pub type Channel = channel::Channel<f64>;
/// Double-precision Choi matrix.
pub type ChoiMatrix = channel::ChoiMatrix<f64>;
/// Double-precision isometric extension.
pub type IsometricExtension = channel::IsometricExtension<f64>;
/// Double-precision Hermiticity-preserving map.
pub type HermitianPreservingMap = channel::HermitianPreservingMap<f64>;
