//! Degradability parameters `dg(N) = min_M ‖N^c − M∘N‖_⋄`: the exact value
//! by SDP, and upper bounds from explicitly constructed degrading maps.

mod pauli;

pub use pauli::{
    depol_analytic_bound, depol_c, depol_choi_blocks, depol_tuned_eta, pauli_analytic_bound, phi_coefficients,
    tuned_pauli_eta, xz_analytic_bound, xz_tuned_eta, PhiCoefficients,
};

use crate::channel::link_choi;
use crate::diamond::diamond_norm_diff_with;
use crate::linalg::{hermitian_function, kron, project_psd, partial_trace, ComplexMatrix, Keep};
use crate::diamond::DiamondResult;
use crate::sdp::{HermExpr, LinExpr, SdpOptions, SdpProblem, SdpSolution};
use crate::{Channel, ChoiMatrix, Error, Matrix, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionFamily {
    Depolarizing,
    Xz,
    PauliPolynomial,
}

/// How a constructed degrading map was tuned: `weights` are the Pauli
/// weights of the degrading channel's parent, `a` the second-order shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub family: ConstructionFamily,
    pub weights: [f64; 4],
    pub a: [f64; 3],
}

#[derive(Clone, Debug)]
pub struct DegradabilityReport {
    /// `dg(N)` from the SDP, when it was solved.
    pub eta_sdp: Option<f64>,
    /// Degrading map: SDP-extracted if `eta_sdp` is set, constructed otherwise.
    pub degrading_map: Channel,
    pub eta_constructed: Option<f64>,
    pub construction: Option<Construction>,
    pub analytic_bound: Option<f64>,
    /// Solver output behind `eta_sdp`.
    pub certificate: Option<SdpSolution>,
}

/// `dg(N)` with default solver options.
pub fn dg_sdp(n: &Channel) -> Result<DegradabilityReport> {
    dg_sdp_with(n, &SdpOptions::default())
}

/// Solves
///
/// ```text
/// minimise 2µ  s.t.  µ I_A ⪰ tr_E Z,  Z ⪰ J(N^c) − J(J⁻¹(Y)∘N),  Z ⪰ 0,
///                    Y ⪰ 0,  tr_E Y = I_B,
/// ```
///
/// projects `Y*` onto the Choi matrices of channels, and checks that the
/// extracted map attains the optimum within 1e-6.
pub fn dg_sdp_with(n: &Channel, opts: &SdpOptions) -> Result<DegradabilityReport> {
    let nc = n.complementary();
    let (a, b, e) = (n.dim_in(), n.dim_out(), nc.dim_out());
    let j_n = n.choi().into_matrix();
    let j_nc = nc.choi().into_matrix();

    let mut p = SdpProblem::new();
    let mu = p.scalar();
    let z = p.hermitian(a * e);
    let y = p.hermitian(b * e);
    let degraded = y.expr().map(|m| link_choi(&j_n, (a, b), m, (b, e)))?;
    p.psd(HermExpr::scalar_identity(mu, a) - z.expr().partial_trace((a, e), Keep::First)?);
    p.psd(z.expr() - HermExpr::constant(j_nc.clone()) + degraded);
    p.psd(z.expr());
    p.psd(y.expr());
    p.equal(y.expr().partial_trace((b, e), Keep::First)? - HermExpr::constant(Matrix::identity(b)));
    p.minimize(LinExpr::term(mu, 2.0));
    let sol = p.solve(opts)?.into_optimal()?;
    let eta = sol.primal_objective.max(0.0);

    let m = nearest_channel(&sol.matrix(&y), b, e)?;
    let recomputed = diamond_norm_diff_with(&nc, &m.compose(n)?, opts)?.value;
    if (recomputed - eta).abs() > 1e-6 {
        return Err(Error::Verification { reported: eta, recomputed });
    }
    Ok(DegradabilityReport {
        eta_sdp: Some(eta),
        degrading_map: m,
        eta_constructed: None,
        construction: None,
        analytic_bound: None,
        certificate: Some(sol),
    })
}

/// PSD projection followed by `Y ↦ (T^{-1/2} ⊗ I) Y (T^{-1/2} ⊗ I)` with
/// `T = tr_E Y`, giving a Choi matrix with exact identity partial trace.
fn nearest_channel(y: &Matrix, b: usize, e: usize) -> Result<Channel> {
    let y = project_psd(&y.hermitian_part())?;
    let t = partial_trace(&y, (b, e), Keep::First)?;
    let t_inv_sqrt = hermitian_function(&t, |l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 })?;
    let s = kron(&t_inv_sqrt, &Matrix::identity(e));
    let fixed = s.matmul(&y).matmul(&s).hermitian_part();
    Channel::from_choi(&ChoiMatrix::new(fixed, b, e)?)
}

/// `‖N^c − N^c∘N‖_⋄`, the degradability witnessed by the complement itself.
pub fn complementary_degrading_eta(n: &Channel) -> Result<DiamondResult> {
    if n.dim_in() != n.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "N^c ∘ N needs a channel with equal input and output, got {} -> {}",
            n.dim_in(),
            n.dim_out()
        )));
    }
    let nc = n.complementary();
    diamond_norm_diff_with(&nc, &nc.compose(n)?, &SdpOptions::default())
}

/// Degrading map built from an approximate recovery `m` of `n`.
#[derive(Clone, Debug)]
pub struct GeneralizedDegrading {
    /// `D = tr_{E₂} ∘ (M∘N)^c ∘ M`, a map `B → E₁`.
    pub map: Channel,
    /// `‖N^c − D∘N‖_⋄`.
    pub eta: f64,
    /// `‖M∘N − id‖_⋄`.
    pub epsilon: f64,
}

/// Builds `D = tr_{E₂} ∘ (M∘N)^c ∘ M` and checks `‖N^c − D∘N‖_⋄ ≤ 2ε^{3/2}`
/// with `ε = ‖M∘N − id‖_⋄`.
pub fn generalized_low_noise_degrading(n: &Channel, m: &Channel) -> Result<GeneralizedDegrading> {
    if m.dim_in() != n.dim_out() || m.dim_out() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "recovery {} -> {} does not invert {} -> {}",
            m.dim_in(),
            m.dim_out(),
            n.dim_in(),
            n.dim_out()
        )));
    }
    let opts = SdpOptions::default();
    let mn = m.compose(n)?;
    let epsilon = diamond_norm_diff_with(&mn, &Channel::identity(n.dim_in()), &opts)?.value;
    let (e1, e2) = (n.num_kraus(), m.num_kraus());
    // Composition orders Kraus operators with N's index outermost, so the
    // environment of M∘N is E₁ ⊗ E₂.
    let trace_e2 = Channel::from_kraus_unchecked(
        (0..e2)
            .map(|j| kron(&Matrix::identity(e1), &ComplexMatrix::ket(e2, j).dagger()))
            .collect(),
    );
    let map = trace_e2.compose(&mn.complementary().compose(m)?)?;
    let eta = diamond_norm_diff_with(&n.complementary(), &map.compose(n)?, &opts)?.value;
    let bound = 2.0 * epsilon.powf(1.5);
    if eta > bound + 1e-6 {
        return Err(Error::BoundViolated(format!("η = {eta:.6e} exceeds 2ε^(3/2) = {bound:.6e}")));
    }
    Ok(GeneralizedDegrading { map, eta, epsilon })
}
