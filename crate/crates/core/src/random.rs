//! Seeded random states, unitaries and channels for tests and sweeps.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::IsometricExtension;
use crate::linalg::ComplexMatrix;
use crate::{Channel, Matrix, C64};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Orthonormalises the columns of `m` (rows ≥ cols), fixing phases so that
/// a Ginibre input yields a Haar-distributed isometry.
pub fn orthonormalize(m: &Matrix) -> Matrix {
    let (rows, cols) = m.shape();
    let a = DMatrix::from_fn(rows, cols, |i, j| m.get(i, j));
    let qr = a.qr();
    let (q, r) = (qr.q(), qr.r());
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Haar-random `d × d` unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    orthonormalize(&ginibre(rng, d, d))
}

/// Haar-random isometry `d_in → d_out`.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize) -> Matrix {
    assert!(d_out >= d_in, "isometry needs d_out >= d_in");
    orthonormalize(&ginibre(rng, d_out, d_in))
}

/// Random mixed state from the Hilbert-Schmidt ensemble.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let g = ginibre(rng, d, d);
    let rho = g.matmul(&g.dagger());
    let t = rho.trace().re;
    rho.scale_real(1.0 / t).hermitian_part()
}

/// Haar-random pure state `|ψ⟩⟨ψ|`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let v = random_isometry(rng, 1, d);
    v.matmul(&v.dagger())
}

/// Channel with a Haar-random Stinespring isometry and `num_kraus` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, num_kraus: usize) -> Channel {
    let v = random_isometry(rng, d_in, d_out * num_kraus);
    IsometricExtension::new(v, d_out, num_kraus)
        .expect("orthonormal columns form an isometry")
        .channel()
}

/// Choi matrix of a random completely positive map of the given Kraus rank.
pub fn random_cp_choi<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, rank: usize) -> Matrix {
    let g = ginibre(rng, d_in * d_out, rank);
    g.matmul(&g.dagger()).hermitian_part()
}

/// Channel within roughly `strength` of the identity: the isometry
/// `I ⊗ |0⟩_E + strength · G` orthonormalised.
pub fn random_low_noise_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, num_kraus: usize, strength: f64) -> Channel {
    let g = ginibre(rng, d * num_kraus, d);
    let v = ComplexMatrix::from_fn(d * num_kraus, d, |r, c| {
        let base = if r == c * num_kraus { 1.0 } else { 0.0 };
        C64::new(base, 0.0) + g.get(r, c) * strength
    });
    IsometricExtension::new(orthonormalize(&v), d, num_kraus)
        .expect("orthonormal columns form an isometry")
        .channel()
}

/// Random point of the probability simplex with `1 - p_0 ≤ max_noise`.
pub fn random_pauli_probabilities<R: Rng + ?Sized>(rng: &mut R, max_noise: f64) -> [f64; 4] {
    let w: [f64; 3] = std::array::from_fn(|_| -rng.gen::<f64>().ln());
    let total: f64 = w.iter().sum();
    let noise = max_noise * rng.gen::<f64>();
    let e = w.map(|x| noise * x / total);
    [1.0 - e.iter().sum::<f64>(), e[0], e[1], e[2]]
}
