//! Tuned degrading maps for Pauli channels: the degrading map is the
//! complement of a slightly noisier Pauli channel.

use super::{Construction, ConstructionFamily, DegradabilityReport};
use crate::channel::{depolarizing, epolarizing, pauli, pauli_matrices, xz_channel, PauliFamily};
use crate::diamond::covariant_diamond;
use crate::linalg::kron;
use crate::{Error, HermitianPreservingMap, Matrix, Result, C64};

/// Entries of `Φ = N_p^c − N_q^c∘N_p` for Pauli weight vectors `p`, `q`:
/// `Φ(ρ)` has diagonal `(p_i − q_i) tr ρ`, first row/column `t_i ⟨σ_i, ρ⟩`
/// and the remaining off-diagonal entries `±i u_k ⟨σ_k, ρ⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiCoefficients {
    pub t: [f64; 3],
    pub u: [f64; 3],
    pub diag: [f64; 4],
}

impl PhiCoefficients {
    /// `Φ(ρ)` assembled from the coefficients.
    pub fn apply(&self, rho: &Matrix) -> Matrix {
        let [_, x, y, z] = pauli_matrices::<f64>();
        let tr = rho.trace();
        let ip = [x, y, z].map(|s| s.matmul(rho).trace());
        let i = C64::i();
        let [t1, t2, t3] = self.t;
        let [u1, u2, u3] = self.u;
        let d = self.diag;
        let rows = [
            [tr * d[0], ip[0] * t1, ip[1] * t2, ip[2] * t3],
            [ip[0] * t1, tr * d[1], -i * ip[2] * u3, i * ip[1] * u2],
            [ip[1] * t2, i * ip[2] * u3, tr * d[2], -i * ip[0] * u1],
            [ip[2] * t3, -i * ip[1] * u2, i * ip[0] * u1, tr * d[3]],
        ];
        Matrix::from_fn(4, 4, |r, c| rows[r][c])
    }

    /// `J(Φ) = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn choi(&self) -> Matrix {
        let mut j = Matrix::zeros(8, 8);
        for a in 0..2 {
            for b in 0..2 {
                let e = Matrix::unit(2, a, b);
                j += &kron(&e, &self.apply(&e));
            }
        }
        j
    }
}

fn check_weights(w: &[f64; 4], name: &str) -> Result<()> {
    let total: f64 = w.iter().sum();
    if w.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("{name} = {w:?}")));
    }
    Ok(())
}

pub fn phi_coefficients(p: [f64; 4], q: [f64; 4]) -> Result<PhiCoefficients> {
    check_weights(&p, "p")?;
    check_weights(&q, "q")?;
    let r = |i: usize, j: usize, w: &[f64; 4]| (w[i] * w[j]).sqrt();
    // Bloch shrinking factors of N_p along X, Y, Z.
    let lam = [p[0] + p[1] - p[2] - p[3], p[0] - p[1] + p[2] - p[3], p[0] - p[1] - p[2] + p[3]];
    Ok(PhiCoefficients {
        t: [
            r(0, 1, &p) - r(0, 1, &q) * lam[0],
            r(0, 2, &p) - r(0, 2, &q) * lam[1],
            r(0, 3, &p) - r(0, 3, &q) * lam[2],
        ],
        u: [
            r(2, 3, &p) - r(2, 3, &q) * lam[0],
            r(1, 3, &p) - r(1, 3, &q) * lam[1],
            r(1, 2, &p) - r(1, 2, &q) * lam[2],
        ],
        diag: std::array::from_fn(|i| p[i] - q[i]),
    })
}

fn residual(p: [f64; 4], q: [f64; 4]) -> Result<(HermitianPreservingMap, crate::Channel)> {
    let n = pauli(p)?;
    let m = pauli(q)?.complementary();
    let phi = HermitianPreservingMap::difference(&n.complementary(), &m.compose(&n)?)?;
    Ok((phi, m))
}

/// Tuned degrading map for a low-noise Pauli family: `q_i = p_i(p + a_i p²)`
/// with `a_i = 4 Σ_{j≠i} c_j` (`a_i = 0` when `c_i = 0`). The diamond norm
/// is evaluated in closed form, using joint Pauli covariance.
pub fn tuned_pauli_eta(family: &PauliFamily<f64>, p: f64) -> Result<DegradabilityReport> {
    if !(p >= 0.0 && p <= family.valid_up_to()) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, {}]", family.valid_up_to())));
    }
    let c = family.linear_coefficients();
    let total: f64 = c.iter().sum();
    let a: [f64; 3] = std::array::from_fn(|i| if c[i] == 0.0 { 0.0 } else { 4.0 * (total - c[i]) });
    let probs = family.probabilities(p)?;
    let shifted: [f64; 3] = std::array::from_fn(|i| family.weight(i, p + a[i] * p * p));
    let q = [1.0 - shifted.iter().sum::<f64>(), shifted[0], shifted[1], shifted[2]];
    if q.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Domain(format!("tuned weights {q:?} at p = {p} leave the simplex")));
    }
    let (phi, m) = residual(probs, q)?;
    Ok(DegradabilityReport {
        eta_sdp: None,
        degrading_map: m,
        eta_constructed: Some(covariant_diamond(&phi)),
        construction: Some(Construction { family: ConstructionFamily::PauliPolynomial, weights: q, a }),
        analytic_bound: Some(pauli_analytic_bound(c, p)),
        certificate: None,
    })
}

/// `64 |c₁c₂ + c₁c₃ + c₂c₃| p²` for linear coefficients `c`.
pub fn pauli_analytic_bound(c: [f64; 3], p: f64) -> f64 {
    64.0 * (c[0] * c[1] + c[0] * c[2] + c[1] * c[2]).abs() * p * p
}

/// `(8/9)(6 + √2) p²`.
pub fn depol_analytic_bound(p: f64) -> f64 {
    8.0 / 9.0 * (6.0 + 2f64.sqrt()) * p * p
}

/// `16p² + 32p^{5/2}`.
pub fn xz_analytic_bound(p: f64) -> f64 {
    16.0 * p * p + 32.0 * p.powf(2.5)
}

/// `c(p) = √(p(1−p)/3) − (1 − 4p/3) √(s(1−s)/3)` with `s = p + a p²`.
pub fn depol_c(p: f64, a: f64) -> f64 {
    let s = p + a * p * p;
    (p * (1.0 - p) / 3.0).sqrt() - (1.0 - 4.0 * p / 3.0) * (s * (1.0 - s) / 3.0).sqrt()
}

/// The 4×4 blocks `[J₀₀, J₀₁, J₁₀, J₁₁]` of `½ J(𝒟_p^c − 𝒟_s^c∘𝒟_p)` for
/// `s = p + (8/3)p²`.
pub fn depol_choi_blocks(p: f64) -> [Matrix; 4] {
    let c = 0.5 * depol_c(p, 8.0 / 3.0);
    let d = 4.0 * p * p / 3.0;
    let o = -4.0 * p * p / 9.0;
    let w = 2.0 / 27.0 * p * p * (8.0 * p - 3.0);
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let z = C64::new(0.0, 0.0);
    let block = |rows: [[C64; 4]; 4]| Matrix::from_fn(4, 4, |r, k| rows[r][k]);
    [
        block([
            [re(d), z, z, re(c)],
            [z, re(o), im(-w), z],
            [z, im(w), re(o), z],
            [re(c), z, z, re(o)],
        ]),
        block([
            [z, re(c), im(c), z],
            [re(c), z, z, re(-w)],
            [im(c), z, z, im(-w)],
            [z, re(w), im(w), z],
        ]),
        block([
            [z, re(c), im(-c), z],
            [re(c), z, z, re(w)],
            [im(-c), z, z, im(-w)],
            [z, re(-w), im(w), z],
        ]),
        block([
            [re(d), z, z, re(-c)],
            [z, re(o), im(w), z],
            [z, im(-w), re(o), z],
            [re(-c), z, z, re(o)],
        ]),
    ]
}

/// `‖𝒟_p^c − 𝒟_s^c∘𝒟_p‖_⋄` with `s = p + (8/3)p²`, against the bound
/// `(8/9)(6 + √2)p²`.
pub fn depol_tuned_eta(p: f64) -> Result<DegradabilityReport> {
    let a = 8.0 / 3.0;
    let s = p + a * p * p;
    if !(p >= 0.0 && s <= 0.75) {
        return Err(Error::OutOfRange(format!("p = {p} gives s = {s}, need 0 <= p and s <= 3/4")));
    }
    let n = depolarizing(p)?;
    let m = epolarizing(s)?;
    let phi = HermitianPreservingMap::difference(&n.complementary(), &m.compose(&n)?)?;
    Ok(DegradabilityReport {
        eta_sdp: None,
        degrading_map: m,
        eta_constructed: Some(covariant_diamond(&phi)),
        construction: Some(Construction {
            family: ConstructionFamily::Depolarizing,
            weights: [1.0 - s, s / 3.0, s / 3.0, s / 3.0],
            a: [a; 3],
        }),
        analytic_bound: Some(depol_analytic_bound(p)),
        certificate: None,
    })
}

/// `‖𝒞_p^c − 𝒞_s^c∘𝒞_p‖_⋄` with `s = p + 4p²`, so the degrading channel has
/// weights `((1−s)², s−s², s², s−s²)`; bound `16p² + 32p^{5/2}`.
pub fn xz_tuned_eta(p: f64) -> Result<DegradabilityReport> {
    let a = 4.0;
    let s = p + a * p * p;
    if !(p >= 0.0 && s <= 1.0) {
        return Err(Error::OutOfRange(format!("p = {p} gives s = {s}, need 0 <= p and s <= 1")));
    }
    let n = xz_channel(p, p)?;
    let m = xz_channel(s, s)?.complementary();
    let phi = HermitianPreservingMap::difference(&n.complementary(), &m.compose(&n)?)?;
    Ok(DegradabilityReport {
        eta_sdp: None,
        degrading_map: m,
        eta_constructed: Some(covariant_diamond(&phi)),
        construction: Some(Construction {
            family: ConstructionFamily::Xz,
            weights: [(1.0 - s) * (1.0 - s), s - s * s, s * s, s - s * s],
            a: [a; 3],
        }),
        analytic_bound: Some(xz_analytic_bound(p)),
        certificate: None,
    })
}
