//! Quantum channels and their representations.
//!
//! A [`Channel`] is stored as Kraus operators. Choi matrices use the
//! unnormalised maximally entangled vector `|γ⟩ = Σ_i |i⟩|i⟩`, so
//! `J(N) = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)` with the input factor first. Stinespring
//! isometries stack Kraus operators in list order: `V = Σ_k K_k ⊗ |k⟩_E`.

mod families;

pub use families::{
    depolarizing, epolarizing, generalized_pauli, pauli, pauli_complement_action,
    pauli_matrices, xz_channel, PauliFamily,
};

use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{eig_hermitian, max_norm, operator_norm, partial_trace, tol, ComplexMatrix, Keep};
use crate::{Error, Real, Result, Tolerances};

/// Completely positive trace-preserving map held as Kraus operators.
#[derive(Clone, Debug)]
pub struct Channel<T: Real> {
    kraus: Vec<ComplexMatrix<T>>,
    dim_in: usize,
    dim_out: usize,
}

/// Choi operator `J(N)` on `A' ⊗ B`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
    dim_in: usize,
    dim_out: usize,
}

/// Isometry `V: A → B ⊗ E`.
#[derive(Clone, Debug)]
pub struct IsometricExtension<T: Real> {
    v: ComplexMatrix<T>,
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
}

/// Linear map with Hermitian Choi operator, e.g. a difference of two channels.
#[derive(Clone, Debug)]
pub struct HermitianPreservingMap<T: Real> {
    choi: ComplexMatrix<T>,
    dim_in: usize,
    dim_out: usize,
}

fn completeness_deviation<T: Real>(kraus: &[ComplexMatrix<T>], dim_in: usize) -> T {
    let mut sum = ComplexMatrix::<T>::zeros(dim_in, dim_in);
    for k in kraus {
        sum += &k.dagger().matmul(k);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim_in))
}

impl<T: Real> Channel<T> {
    /// Validates shapes and `Σ K†K = I` within 1e-9.
    pub fn new(kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::DimensionMismatch("a channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must all be {dim_out}x{dim_in}, found {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        let dev = completeness_deviation(&kraus, dim_in);
        if !(dev <= tol::<T>(Tolerances::DEFAULT.trace)) {
            return Err(Error::TraceCondition { deviation: dev.as_f64() });
        }
        Ok(Self { kraus, dim_in, dim_out })
    }

    /// Skips the completeness check; callers guarantee it by construction.
    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix<T>>) -> Self {
        let (dim_out, dim_in) = kraus[0].shape();
        Self { kraus, dim_in, dim_out }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_kraus_unchecked(vec![ComplexMatrix::identity(dim)])
    }

    /// `ρ ↦ UρU†`.
    pub fn unitary(u: ComplexMatrix<T>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        Self::new(vec![u])
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// `max |Σ K†K − I|`.
    pub fn completeness_deviation(&self) -> T {
        completeness_deviation(&self.kraus, self.dim_in)
    }

    /// `Σ_k K ρ K†`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {0}x{0}, got {1}x{2}",
                self.dim_in,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &k.sandwich(rho);
        }
        Ok(out)
    }

    /// The Choi matrix `(id ⊗ N)(γ)`.
    pub fn choi(&self) -> ChoiMatrix<T> {
        let (a, b) = (self.dim_in, self.dim_out);
        let mut j = ComplexMatrix::zeros(a * b, a * b);
        for k in &self.kraus {
            // (I ⊗ K)|γ⟩ has component (i, b) equal to K[b, i].
            let vec: Vec<Complex<T>> = (0..a * b).map(|r| k.get(r % b, r / b)).collect();
            for r in 0..a * b {
                if vec[r].is_zero() {
                    continue;
                }
                for c in 0..a * b {
                    j[(r, c)] += vec[r] * vec[c].conj();
                }
            }
        }
        ChoiMatrix { matrix: j, dim_in: a, dim_out: b }
    }

    /// Inverse Choi isomorphism: Kraus operators from the spectral
    /// decomposition, eigenvalues below `1e-12 ‖τ‖_∞` dropped, each operator's
    /// first nonzero entry made real positive.
    pub fn from_choi(t: &ChoiMatrix<T>) -> Result<Self> {
        t.check_cptp()?;
        let (a, b) = (t.dim_in, t.dim_out);
        let e = eig_hermitian(&t.matrix)?;
        let scale = e.max().abs().max(e.min().abs());
        let cutoff = T::lit(Tolerances::DEFAULT.eigenvalue_zero) * scale;
        let mut kraus = Vec::new();
        for (idx, &lam) in e.eigenvalues.iter().enumerate().rev() {
            if lam <= cutoff {
                continue;
            }
            let w = lam.sqrt();
            let mut k = ComplexMatrix::from_fn(b, a, |row, col| e.eigenvectors.get(col * b + row, idx) * w);
            let pivot_floor = T::lit(1e-12) * max_norm(&k);
            if let Some(z) = k.data().iter().find(|z| z.norm() > pivot_floor).copied() {
                let phase = z.conj() / z.norm();
                k = k.scale(phase);
            }
            kraus.push(k);
        }
        if kraus.is_empty() {
            return Err(Error::Domain("Choi matrix has no positive spectrum".into()));
        }
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// `self ∘ n`: apply `n` first. Kraus operators are `M_j K_i` ordered with
    /// the index `i` of `n` outermost, so the environment is `E_n ⊗ E_self`.
    pub fn compose(&self, n: &Channel<T>) -> Result<Channel<T>> {
        if n.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: inner output {} vs outer input {}",
                n.dim_out, self.dim_in
            )));
        }
        let mut kraus = Vec::with_capacity(n.kraus.len() * self.kraus.len());
        for k in &n.kraus {
            for m in &self.kraus {
                kraus.push(m.matmul(k));
            }
        }
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// `V = Σ_k K_k ⊗ |k⟩_E` with `dim_env` equal to the Kraus count.
    pub fn stinespring(&self) -> IsometricExtension<T> {
        let e = self.kraus.len();
        let v = ComplexMatrix::from_fn(self.dim_out * e, self.dim_in, |r, i| {
            self.kraus[r % e].get(r / e, i)
        });
        IsometricExtension { v, dim_in: self.dim_in, dim_out: self.dim_out, dim_env: e }
    }

    /// Complementary channel `ρ ↦ tr_B(VρV†)` of the canonical Stinespring form.
    pub fn complementary(&self) -> Channel<T> {
        self.stinespring().complement()
    }

    /// Number of eigenvalues of `J(N)` above `1e-9 ‖J(N)‖_∞`.
    pub fn choi_rank(&self) -> usize {
        self.choi().rank(Tolerances::DEFAULT.rank_relative)
    }

    /// Same channel with the Kraus list permuted (`order[k]` is the old index).
    pub fn permute_kraus(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.kraus.len()];
        if order.len() != self.kraus.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::DimensionMismatch("not a permutation of the Kraus list".into()));
        }
        Ok(Self::from_kraus_unchecked(order.iter().map(|&i| self.kraus[i].clone()).collect()))
    }

    /// Drops Kraus operators that are exactly zero.
    pub fn prune_zero_kraus(&self) -> Self {
        let kept: Vec<_> = self.kraus.iter().filter(|k| max_norm(k) > T::zero()).cloned().collect();
        if kept.is_empty() {
            return self.clone();
        }
        Self::from_kraus_unchecked(kept)
    }
}

impl<T: Real> ChoiMatrix<T> {
    /// Choi matrix of a CPTP map: Hermitian, PSD and `tr_B τ = I`, all within 1e-9.
    pub fn new(matrix: ComplexMatrix<T>, dim_in: usize, dim_out: usize) -> Result<Self> {
        let c = Self::new_cp(matrix, dim_in, dim_out)?;
        c.check_cptp()?;
        Ok(c)
    }

    /// Choi matrix of a CP (not necessarily trace-preserving) map: PSD only.
    pub fn new_cp(matrix: ComplexMatrix<T>, dim_in: usize, dim_out: usize) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != dim_in * dim_out {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for {dim_in} -> {dim_out} must be {0}x{0}",
                dim_in * dim_out
            )));
        }
        let e = eig_hermitian(&matrix)?;
        let floor = tol::<T>(-Tolerances::DEFAULT.psd_floor) * (T::one() + e.max().abs());
        if e.min() < -floor {
            return Err(Error::NotPositive { min_eigenvalue: e.min().as_f64() });
        }
        Ok(Self { matrix: matrix.hermitian_part(), dim_in, dim_out })
    }

    fn check_cptp(&self) -> Result<()> {
        let reduced = partial_trace(&self.matrix, (self.dim_in, self.dim_out), Keep::First)?;
        let dev = reduced.max_abs_diff(&ComplexMatrix::identity(self.dim_in));
        if !(dev <= tol::<T>(Tolerances::DEFAULT.trace)) {
            return Err(Error::TraceCondition { deviation: dev.as_f64() });
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Eigenvalues above `relative · ‖τ‖_∞`.
    pub fn rank(&self, relative: f64) -> usize {
        let e = eig_hermitian(&self.matrix).expect("Choi matrix is Hermitian");
        let top = e.max().abs().max(e.min().abs());
        if top == T::zero() {
            return 0;
        }
        let cut = T::lit(relative) * top;
        e.eigenvalues.iter().filter(|&&l| l > cut).count()
    }

    /// The map `ρ ↦ tr_A'(τ(ρ^T ⊗ I))`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        apply_choi(&self.matrix, (self.dim_in, self.dim_out), rho)
    }
}

impl<T: Real> IsometricExtension<T> {
    /// Wraps `v: A → B ⊗ E`, checking `V†V = I` within 1e-9.
    pub fn new(v: ComplexMatrix<T>, dim_out: usize, dim_env: usize) -> Result<Self> {
        if v.rows() != dim_out * dim_env {
            return Err(Error::DimensionMismatch(format!(
                "isometry has {} rows, expected {dim_out}*{dim_env}",
                v.rows()
            )));
        }
        let dim_in = v.cols();
        let dev = v.dagger().matmul(&v).max_abs_diff(&ComplexMatrix::identity(dim_in));
        if !(dev <= tol::<T>(Tolerances::DEFAULT.trace)) {
            return Err(Error::TraceCondition { deviation: dev.as_f64() });
        }
        Ok(Self { v, dim_in, dim_out, dim_env })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.v
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn isometry_deviation(&self) -> T {
        self.v.dagger().matmul(&self.v).max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// `VρV†` on `B ⊗ E`.
    pub fn dilate(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch("input state has wrong dimension".into()));
        }
        Ok(self.v.sandwich(rho))
    }

    /// `tr_E(VρV†)`.
    pub fn channel_output(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        partial_trace(&self.dilate(rho)?, (self.dim_out, self.dim_env), Keep::First)
    }

    /// `tr_B(VρV†)`.
    pub fn complement_output(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        partial_trace(&self.dilate(rho)?, (self.dim_out, self.dim_env), Keep::Second)
    }

    /// Kraus operators `(I_B ⊗ ⟨e|)V`.
    pub fn channel(&self) -> Channel<T> {
        let (b, e) = (self.dim_out, self.dim_env);
        Channel::from_kraus_unchecked(
            (0..e)
                .map(|k| ComplexMatrix::from_fn(b, self.dim_in, |r, i| self.v.get(r * e + k, i)))
                .collect(),
        )
    }

    /// Kraus operators `(⟨b| ⊗ I_E)V` of the complementary channel.
    pub fn complement(&self) -> Channel<T> {
        let (b, e) = (self.dim_out, self.dim_env);
        Channel::from_kraus_unchecked(
            (0..b)
                .map(|k| ComplexMatrix::from_fn(e, self.dim_in, |r, i| self.v.get(k * e + r, i)))
                .collect(),
        )
    }
}

impl<T: Real> HermitianPreservingMap<T> {
    pub fn new(choi: ComplexMatrix<T>, dim_in: usize, dim_out: usize) -> Result<Self> {
        if !choi.is_square() || choi.rows() != dim_in * dim_out {
            return Err(Error::DimensionMismatch(format!(
                "Choi operator for {dim_in} -> {dim_out} must be {0}x{0}",
                dim_in * dim_out
            )));
        }
        let dev = choi.hermiticity_deviation();
        if !(dev <= tol::<T>(Tolerances::DEFAULT.hermiticity) * (T::one() + max_norm(&choi))) {
            return Err(Error::NotHermitian { deviation: dev.as_f64() });
        }
        Ok(Self { choi: choi.hermitian_part(), dim_in, dim_out })
    }

    pub fn from_channel(n: &Channel<T>) -> Self {
        Self { choi: n.choi().into_matrix(), dim_in: n.dim_in(), dim_out: n.dim_out() }
    }

    /// `a − b`, with Choi operator `J(a) − J(b)`.
    pub fn difference(a: &Channel<T>, b: &Channel<T>) -> Result<Self> {
        if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
            return Err(Error::DimensionMismatch(format!(
                "maps {}->{} and {}->{} differ in shape",
                a.dim_in(),
                a.dim_out(),
                b.dim_in(),
                b.dim_out()
            )));
        }
        let choi = &a.choi().into_matrix() - b.choi().matrix();
        Ok(Self { choi, dim_in: a.dim_in(), dim_out: a.dim_out() })
    }

    pub fn choi(&self) -> &ComplexMatrix<T> {
        &self.choi
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn scale(&self, c: T) -> Self {
        Self { choi: self.choi.scale_real(c), dim_in: self.dim_in, dim_out: self.dim_out }
    }

    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        apply_choi(&self.choi, (self.dim_in, self.dim_out), rho)
    }

    /// `tr_B J(Φ) = 0` within 1e-9, i.e. `tr Φ(ρ) = 0` for every `ρ`.
    pub fn is_trace_annihilating(&self) -> bool {
        let r = partial_trace(&self.choi, (self.dim_in, self.dim_out), Keep::First)
            .expect("shape checked at construction");
        max_norm(&r) <= tol::<T>(Tolerances::DEFAULT.trace) * (T::one() + operator_norm(&self.choi))
    }
}

/// `(J⁻¹(τ))(ρ) = tr_A'(τ(ρ^T ⊗ I))`, valid for any linear map's Choi operator.
pub fn apply_choi<T: Real>(
    choi: &ComplexMatrix<T>,
    dims: (usize, usize),
    rho: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let (a, b) = dims;
    if rho.shape() != (a, a) || choi.shape() != (a * b, a * b) {
        return Err(Error::DimensionMismatch("map input has wrong dimension".into()));
    }
    Ok(ComplexMatrix::from_fn(b, b, |e, f| {
        let mut acc = Complex::zero();
        for i in 0..a {
            for j in 0..a {
                acc += choi.get(i * b + e, j * b + f) * rho.get(i, j);
            }
        }
        acc
    }))
}

/// Choi operator of `M ∘ N` from `J(N)` on `A ⊗ B` and `J(M)` on `B ⊗ E`:
/// `J(M∘N)[(i,e),(j,f)] = Σ_{b,c} J(M)[(b,e),(c,f)] · J(N)[(i,b),(j,c)]`.
///
/// Linear in both arguments, so it applies to arbitrary (non-CP) operators.
pub fn link_choi<T: Real>(
    choi_n: &ComplexMatrix<T>,
    dims_n: (usize, usize),
    choi_m: &ComplexMatrix<T>,
    dims_m: (usize, usize),
) -> Result<ComplexMatrix<T>> {
    let (a, b) = dims_n;
    let (b2, e) = dims_m;
    if b != b2 || choi_n.shape() != (a * b, a * b) || choi_m.shape() != (b * e, b * e) {
        return Err(Error::DimensionMismatch(format!(
            "cannot link {a}->{b} with {b2}->{e}"
        )));
    }
    let mut out = ComplexMatrix::zeros(a * e, a * e);
    for i in 0..a {
        for j in 0..a {
            for bb in 0..b {
                for c in 0..b {
                    let n = choi_n.get(i * b + bb, j * b + c);
                    if n.is_zero() {
                        continue;
                    }
                    for ee in 0..e {
                        for f in 0..e {
                            out[(i * e + ee, j * e + f)] += choi_m.get(bb * e + ee, c * e + f) * n;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
