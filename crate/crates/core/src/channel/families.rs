use num_complex::Complex;
use num_traits::{One, Zero};

use super::Channel;
use crate::linalg::{tol, ComplexMatrix};
use crate::{Error, Real, Result};

/// `[I, X, Y, Z]` with `Y = [[0, -i], [i, 0]]`.
pub fn pauli_matrices<T: Real>() -> [ComplexMatrix<T>; 4] {
    let o = Complex::zero();
    let l = Complex::one();
    let i = Complex::i();
    let m = |a: [Complex<T>; 4]| ComplexMatrix::from_fn(2, 2, |r, c| a[2 * r + c]);
    [m([l, o, o, l]), m([o, l, l, o]), m([o, -i, i, o]), m([l, o, o, -l])]
}

fn check_distribution<T: Real>(probs: &[T]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(**p >= T::zero())) {
        return Err(Error::InvalidDistribution(format!("negative or NaN weight {p}")));
    }
    let total: T = probs.iter().copied().sum();
    if !((total - T::one()).abs() <= tol::<T>(1e-12)) {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// `ρ ↦ Σ_i p_i σ_i ρ σ_i` with Kraus operators `√p_i σ_i` in the order
/// `I, X, Y, Z`. Zero weights keep their (zero) Kraus operator so the
/// environment is always four-dimensional.
pub fn pauli<T: Real>(probs: [T; 4]) -> Result<Channel<T>> {
    check_distribution(&probs)?;
    let sigma = pauli_matrices::<T>();
    Ok(Channel::from_kraus_unchecked(
        sigma.iter().zip(probs).map(|(s, p)| s.scale_real(p.sqrt())).collect(),
    ))
}

fn unit_interval<T: Real>(name: &str, p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::OutOfRange(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// Qubit depolarizing channel with weights `(1-p, p/3, p/3, p/3)`.
pub fn depolarizing<T: Real>(p: T) -> Result<Channel<T>> {
    unit_interval("p", p)?;
    let third = p / T::lit(3.0);
    pauli([T::one() - p, third, third, third])
}

/// Independent bit flip `p` and phase flip `q`.
pub fn xz_channel<T: Real>(p: T, q: T) -> Result<Channel<T>> {
    unit_interval("p", p)?;
    unit_interval("q", q)?;
    let (np, nq) = (T::one() - p, T::one() - q);
    pauli([np * nq, p * nq, p * q, np * q])
}

/// Complementary channel of the depolarizing channel, a qubit-to-ququart map.
pub fn epolarizing<T: Real>(p: T) -> Result<Channel<T>> {
    Ok(depolarizing(p)?.complementary())
}

/// `N^c(ρ)[j,k] = √(p_j p_k) tr(σ_k σ_j ρ)` for the Pauli channel with weights
/// `probs`, evaluated without building a Stinespring isometry.
pub fn pauli_complement_action<T: Real>(probs: [T; 4], rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_distribution(&probs)?;
    if rho.shape() != (2, 2) {
        return Err(Error::DimensionMismatch("Pauli channels act on qubits".into()));
    }
    let sigma = pauli_matrices::<T>();
    Ok(ComplexMatrix::from_fn(4, 4, |j, k| {
        sigma[k].matmul(&sigma[j]).matmul(rho).trace() * (probs[j] * probs[k]).sqrt()
    }))
}

/// Weyl channel on `C^d`: Kraus operators `√p_{kl} X^k Z^l`, with `probs`
/// indexed by `k·d + l`.
pub fn generalized_pauli<T: Real>(d: usize, probs: &[T]) -> Result<Channel<T>> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension {d} must be at least 2")));
    }
    if probs.len() != d * d {
        return Err(Error::DimensionMismatch(format!("need {} weights for d = {d}, got {}", d * d, probs.len())));
    }
    check_distribution(probs)?;
    let angle = T::TAU() / T::lit(d as f64);
    let mut kraus = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let w = probs[k * d + l].sqrt();
            // X^k Z^l |j⟩ = ω^{lj} |j + k⟩
            kraus.push(ComplexMatrix::from_fn(d, d, |r, c| {
                if r == (c + k) % d {
                    Complex::from_polar(w, angle * T::lit(((l * c) % d) as f64))
                } else {
                    Complex::zero()
                }
            }));
        }
    }
    Ok(Channel::from_kraus_unchecked(kraus))
}

/// Low-noise Pauli family `p ↦ (1 - Σp_i(p), p_1(p), p_2(p), p_3(p))` with
/// polynomial weights vanishing at `p = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliFamily<T: Real> {
    coefficients: [Vec<T>; 3],
    valid_up_to: T,
}

impl<T: Real> PauliFamily<T> {
    /// `coefficients[i][k]` multiplies `p^k` in `p_{i+1}`; every constant
    /// term must be zero. The weights are checked on a grid over
    /// `[0, valid_up_to]`.
    pub fn new(coefficients: [Vec<T>; 3], valid_up_to: T) -> Result<Self> {
        if coefficients.iter().any(|c| c.first().is_some_and(|c0| !c0.is_zero())) {
            return Err(Error::Domain("Pauli family weights must vanish at p = 0".into()));
        }
        unit_interval("valid_up_to", valid_up_to)?;
        let family = Self { coefficients, valid_up_to };
        const GRID: usize = 1000;
        for s in 0..=GRID {
            let p = valid_up_to * T::lit(s as f64 / GRID as f64);
            family.probabilities(p)?;
        }
        Ok(family)
    }

    /// Uniform Pauli errors: `p_i = p/3`.
    pub fn depolarizing() -> Self {
        let c = vec![T::zero(), T::lit(1.0 / 3.0)];
        Self { coefficients: [c.clone(), c.clone(), c], valid_up_to: T::one() }
    }

    /// Independent bit and phase flips with equal rate: `(p - p², p², p - p²)`.
    pub fn xz() -> Self {
        let edge = vec![T::zero(), T::one(), -T::one()];
        let mid = vec![T::zero(), T::zero(), T::one()];
        Self { coefficients: [edge.clone(), mid, edge], valid_up_to: T::one() }
    }

    pub fn coefficients(&self) -> &[Vec<T>; 3] {
        &self.coefficients
    }

    pub fn valid_up_to(&self) -> T {
        self.valid_up_to
    }

    /// `c_i = p_i'(0)`.
    pub fn linear_coefficients(&self) -> [T; 3] {
        std::array::from_fn(|i| self.coefficients[i].get(1).copied().unwrap_or_else(T::zero))
    }

    pub fn weight(&self, i: usize, p: T) -> T {
        self.coefficients[i].iter().rev().fold(T::zero(), |acc, &c| acc * p + c)
    }

    /// `(p_0, p_1, p_2, p_3)`, rejected if it leaves the probability simplex.
    pub fn probabilities(&self, p: T) -> Result<[T; 4]> {
        let w: [T; 3] = std::array::from_fn(|i| self.weight(i, p));
        let slack = tol::<T>(1e-12);
        let rest = T::one() - w[0] - w[1] - w[2];
        if w.iter().chain(std::iter::once(&rest)).any(|x| !(*x >= -slack && *x <= T::one() + slack)) {
            return Err(Error::InvalidDistribution(format!(
                "family weights ({rest}, {}, {}, {}) at p = {p} leave the simplex",
                w[0], w[1], w[2]
            )));
        }
        let clip = |x: T| x.max(T::zero());
        let probs = [clip(rest), clip(w[0]), clip(w[1]), clip(w[2])];
        let total: T = probs.iter().copied().sum();
        Ok(probs.map(|x| x / total))
    }

    pub fn channel(&self, p: T) -> Result<Channel<T>> {
        pauli(self.probabilities(p)?)
    }
}
