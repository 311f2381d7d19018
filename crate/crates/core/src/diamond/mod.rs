//! Diamond norms of channel differences and Hermiticity-preserving maps.
//!
//! The exact value comes from an SDP. For trace-annihilating maps (such as
//! `N₁ − N₂`) the program is
//!
//! ```text
//! minimise 2µ  s.t.  µ I_A ⪰ tr_B Z,  Z ⪰ J(Φ),  Z ⪰ 0,
//! ```
//!
//! and for general Hermiticity-preserving maps the symmetric two-block
//! program `min (µ₀ + µ₁)/2` with `[[Y₀, −J], [−J, Y₁]] ⪰ 0` is used.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChoiMatrix as GenericChoi;
use crate::linalg::{kron, max_norm, operator_norm, partial_trace, trace_norm, ComplexMatrix, Keep};
use crate::random::random_density;
use crate::sdp::{HermExpr, LinExpr, SdpOptions, SdpProblem, SdpSolution};
use crate::{Channel, HermitianPreservingMap, Matrix, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiamondMethod {
    Sdp,
    CovariantClosedForm,
    MaxNormBound,
}

#[derive(Clone, Debug)]
pub struct DiamondResult {
    pub value: f64,
    pub method: DiamondMethod,
    pub certificate: Option<SdpSolution>,
}

/// `‖N₁ − N₂‖_⋄` via the SDP with default solver options.
pub fn diamond_norm_diff(n1: &Channel, n2: &Channel) -> Result<DiamondResult> {
    diamond_norm_diff_with(n1, n2, &SdpOptions::default())
}

pub fn diamond_norm_diff_with(n1: &Channel, n2: &Channel, opts: &SdpOptions) -> Result<DiamondResult> {
    let phi = HermitianPreservingMap::difference(n1, n2)?;
    trace_annihilating_sdp(phi.choi(), (phi.dim_in(), phi.dim_out()), opts)
}

/// `‖Φ‖_⋄` via SDP with default solver options.
pub fn diamond_norm_hp(phi: &HermitianPreservingMap) -> Result<DiamondResult> {
    diamond_norm_hp_with(phi, &SdpOptions::default())
}

pub fn diamond_norm_hp_with(phi: &HermitianPreservingMap, opts: &SdpOptions) -> Result<DiamondResult> {
    let dims = (phi.dim_in(), phi.dim_out());
    if phi.is_trace_annihilating() {
        trace_annihilating_sdp(phi.choi(), dims, opts)
    } else {
        general_sdp(phi.choi(), dims, opts)
    }
}

fn finish(sol: SdpSolution) -> Result<DiamondResult> {
    let sol = sol.into_optimal()?;
    Ok(DiamondResult { value: sol.primal_objective.max(0.0), method: DiamondMethod::Sdp, certificate: Some(sol) })
}

fn trace_annihilating_sdp(j: &Matrix, (a, b): (usize, usize), opts: &SdpOptions) -> Result<DiamondResult> {
    let mut p = SdpProblem::new();
    let mu = p.scalar();
    let z = p.hermitian(a * b);
    p.psd(HermExpr::scalar_identity(mu, a) - z.expr().partial_trace((a, b), Keep::First)?);
    p.psd(z.expr() - HermExpr::constant(j.clone()));
    p.psd(z.expr());
    p.minimize(LinExpr::term(mu, 2.0));
    finish(p.solve(opts)?)
}

fn general_sdp(j: &Matrix, (a, b): (usize, usize), opts: &SdpOptions) -> Result<DiamondResult> {
    let n = a * b;
    let mut p = SdpProblem::new();
    let (mu0, mu1) = (p.scalar(), p.scalar());
    let (y0, y1) = (p.hermitian(n), p.hermitian(n));
    let place = |e: HermExpr, r0: usize, c0: usize| {
        e.map(|m| {
            let mut big = Matrix::zeros(2 * n, 2 * n);
            big.set_block(r0, c0, m);
            Ok(big)
        })
    };
    let mut off = Matrix::zeros(2 * n, 2 * n);
    off.set_block(0, n, &j.scale_real(-1.0));
    off.set_block(n, 0, &j.dagger().scale_real(-1.0));
    p.psd(place(y0.expr(), 0, 0)? + place(y1.expr(), n, n)? + HermExpr::constant(off));
    p.psd(HermExpr::scalar_identity(mu0, a) - y0.expr().partial_trace((a, b), Keep::First)?);
    p.psd(HermExpr::scalar_identity(mu1, a) - y1.expr().partial_trace((a, b), Keep::First)?);
    p.minimize((LinExpr::from(mu0) + mu1.into()) * 0.5);
    finish(p.solve(opts)?)
}

/// `|A| |B|² ‖J(Θ)‖_max`, an upper bound on `‖Θ‖_⋄` for CP `Θ`.
pub fn max_norm_bound(choi: &Matrix, dim_in: usize, dim_out: usize) -> Result<f64> {
    let c = GenericChoi::new_cp(choi.clone(), dim_in, dim_out)?;
    Ok((dim_in * dim_out * dim_out) as f64 * max_norm(c.matrix()))
}

/// `½ ‖J(Φ)‖₁`, the diamond norm when the maximally entangled input is
/// optimal. The caller is responsible for the required covariance.
pub fn covariant_diamond(phi: &HermitianPreservingMap) -> f64 {
    0.5 * trace_norm(phi.choi())
}

/// Widen the environment of a Stinespring isometry to `dim_env` with zeros.
fn pad_environment(v: &Matrix, dim_out: usize, dim_env: usize, target: usize) -> Matrix {
    let mut out = Matrix::zeros(dim_out * target, v.cols());
    for bb in 0..dim_out {
        for e in 0..dim_env {
            for i in 0..v.cols() {
                out[(bb * target + e, i)] = v.get(bb * dim_env + e, i);
            }
        }
    }
    out
}

/// Unitary factor of the polar decomposition of a square matrix.
fn polar_unitary(t: &Matrix) -> Matrix {
    let n = t.rows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| t.get(i, j));
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let w = (u * v_t).adjoint();
    ComplexMatrix::from_fn(n, n, |i, j| w[(i, j)])
}

/// Heuristic `(d², 2d)` with `d = min_W ‖V₁ − (I ⊗ W)V₂‖_∞` over environment
/// unitaries `W`, minimised by alternating polar updates from 100 seeded
/// starts. `2d` is a rigorous upper bound on `‖N₁ − N₂‖_⋄` for the `W` found;
/// `d²` is a lower bound only at the true infimum.
pub fn stinespring_distance_bounds(n1: &Channel, n2: &Channel) -> Result<(f64, f64)> {
    HermitianPreservingMap::difference(n1, n2)?;
    let (a, b) = (n1.dim_in(), n1.dim_out());
    let (s1, s2) = (n1.stinespring(), n2.stinespring());
    let e = s1.dim_env().max(s2.dim_env());
    let v1 = pad_environment(s1.matrix(), b, s1.dim_env(), e);
    let v2 = pad_environment(s2.matrix(), b, s2.dim_env(), e);
    let lift = |w: &Matrix| kron(&Matrix::identity(b), w).matmul(&v2);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best = f64::INFINITY;
    for restart in 0..100 {
        let mut rho = if restart == 0 { Matrix::identity(a).scale_real(1.0 / a as f64) } else { random_density(&mut rng, a) };
        for step in 0..60 {
            // Best W for the weighted Frobenius objective tr((D†D)ρ).
            let t = partial_trace(&v2.matmul(&rho).matmul(&v1.dagger()), (b, e), Keep::Second)?;
            let w = polar_unitary(&t);
            let d = &v1 - &lift(&w);
            best = best.min(operator_norm(&d));
            // Move weight towards the worst input direction.
            let dd = d.dagger().matmul(&d).hermitian_part();
            let eig = crate::linalg::eig_hermitian(&dd)?;
            let top = eig.eigenvectors.col(a - 1);
            let step_size = 1.0 / (step as f64 + 2.0);
            rho = &rho.scale_real(1.0 - step_size) + &top.matmul(&top.dagger()).scale_real(step_size);
        }
        if best < 1e-14 {
            break;
        }
    }
    Ok((best * best, 2.0 * best))
}

#[cfg(test)]
mod tests;
