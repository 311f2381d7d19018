//! Coherent information, the continuity bounds `f₁`, `f₂`, and the capacity
//! intervals `I_c ≤ Q ≤ I_c + f₁(η)` and `I_c ≤ P ≤ I_c + f₂(η)`.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::degradability::dg_sdp_with;
use crate::linalg::{eig_hermitian, entropy_of_eigenvalues, von_neumann_entropy, ComplexMatrix};
use crate::random::random_density;
use crate::sdp::SdpOptions;
use crate::{Channel, Error, Matrix, Result, Tolerances, C64};

/// Below this degradability parameter both continuity offsets are taken as 0.
pub const ETA_MIN: f64 = 1e-9;

/// Printed with every report.
pub const OPTIMIZER_CAVEAT: &str = "I_c is the best value found by a local optimizer with random restarts. \
It is a valid lower edge; the upper edges are rigorous only if it is the true maximum.";

/// `h(x) = −x log x − (1−x) log(1−x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("binary entropy needs x in [0, 1], got {x}")));
    }
    if !(1e-15..=1.0 - 1e-15).contains(&x) {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// `g(η) = −η log η`, with `g(0) = 0`.
pub fn g(eta: f64) -> f64 {
    if eta <= 0.0 {
        0.0
    } else {
        -eta * eta.log2()
    }
}

fn check_continuity_args(eta: f64, env_dim: usize) -> Result<()> {
    if !(0.0..=2.0).contains(&eta) {
        return Err(Error::OutOfRange(format!("η must lie in [0, 2], got {eta}")));
    }
    if env_dim == 0 {
        return Err(Error::OutOfRange("environment dimension must be at least 1".into()));
    }
    Ok(())
}

// log(|E| − 1), taken as 0 when |E| = 1.
fn log_env_minus_one(env_dim: usize) -> f64 {
    if env_dim > 1 {
        ((env_dim - 1) as f64).log2()
    } else {
        0.0
    }
}

/// `(η/2) log(|E|−1) + η log|E| + h(η/2) + (1+η/2) h(η/(2+η))`.
pub fn f1(eta: f64, env_dim: usize) -> Result<f64> {
    check_continuity_args(eta, env_dim)?;
    Ok(eta / 2.0 * log_env_minus_one(env_dim)
        + eta * (env_dim as f64).log2()
        + binary_entropy(eta / 2.0)?
        + (1.0 + eta / 2.0) * binary_entropy(eta / (2.0 + eta))?)
}

/// `η log(|E|−1) + 4η log|E| + 2h(η/2) + 4(1+η/2) h(η/(2+η))`.
pub fn f2(eta: f64, env_dim: usize) -> Result<f64> {
    check_continuity_args(eta, env_dim)?;
    Ok(eta * log_env_minus_one(env_dim)
        + 4.0 * eta * (env_dim as f64).log2()
        + 2.0 * binary_entropy(eta / 2.0)?
        + 4.0 * (1.0 + eta / 2.0) * binary_entropy(eta / (2.0 + eta))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityKind {
    Quantum,
    Private,
}

/// Leading-order gap between `Q` (or `P`) and `I_c` when `η ≤ c p^r`.
pub fn leading_order_gap(c: f64, r: f64, p: f64, env_dim: usize, which: CapacityKind) -> Result<f64> {
    if !(c > 0.0) || !(r > 1.0) || !(p > 0.0 && p < 1.0) || env_dim == 0 {
        return Err(Error::OutOfRange(format!(
            "need c > 0, r > 1, 0 < p < 1, |E| ≥ 1; got c = {c}, r = {r}, p = {p}, |E| = {env_dim}"
        )));
    }
    let log_e = (env_dim as f64).log2();
    let log_e1 = log_env_minus_one(env_dim);
    let slope = c * r * p.powf(r - 1.0) * (-p * p.log2());
    let cpr = c * p.powf(r);
    Ok(match which {
        CapacityKind::Quantum => slope + cpr * (-c.log2() + 1.0 + 1.0 / LN_2 + log_e + 0.5 * log_e1),
        CapacityKind::Private => {
            3.0 * slope + cpr * (-3.0 * c.log2() + 3.0 + 3.0 / LN_2 + log_e1 + 4.0 * log_e)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    /// `g(c p^r)`.
    pub g: f64,
    /// `d/dp g(c p^r) = (−log(c p^r) − 1/ln 2) c r p^{r−1}`.
    pub dg: f64,
}

pub fn bound_curves(c: f64, r: f64, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if !(r >= 1.0) || !(c > 0.0) {
        return Err(Error::OutOfRange(format!("need c > 0 and r ≥ 1, got c = {c}, r = {r}")));
    }
    grid.iter()
        .map(|&p| {
            if !(p >= 0.0) {
                return Err(Error::OutOfRange(format!("grid point {p} is negative")));
            }
            let eta = c * p.powf(r);
            let dg = if p == 0.0 {
                if r > 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (-eta.log2() - 1.0 / LN_2) * c * r * p.powf(r - 1.0)
            };
            Ok(CurvePoint { p, g: g(eta), dg })
        })
        .collect()
}

/// `S(N(ρ)) − S(N^c(ρ))` in bits.
pub fn coherent_information_state(rho: &Matrix, n: &Channel) -> Result<f64> {
    check_state(rho, n.dim_in())?;
    Ok(von_neumann_entropy(&n.apply(rho)?.hermitian_part())?
        - von_neumann_entropy(&n.complementary().apply(rho)?.hermitian_part())?)
}

fn check_state(rho: &Matrix, d: usize) -> Result<()> {
    if rho.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!("expected a {d}x{d} state, got {}x{}", rho.rows(), rho.cols())));
    }
    let t = Tolerances::DEFAULT;
    let dev = rho.hermiticity_deviation();
    if dev > t.hermiticity {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let e = eig_hermitian(&rho.hermitian_part())?;
    if e.min() < t.psd_floor {
        return Err(Error::NotPositive { min_eigenvalue: e.min() });
    }
    let dev = (rho.trace().re - 1.0).abs();
    if dev > t.trace {
        return Err(Error::TraceCondition { deviation: dev });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CoherentInfoOptions {
    pub restarts: usize,
    pub fd_step: f64,
    /// Stop a run once an accepted step improves by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Bloch-ball grid size for qubit inputs (0 disables the grid).
    pub bloch_points: usize,
    pub seed: u64,
}

impl Default for CoherentInfoOptions {
    fn default() -> Self {
        Self { restarts: 20, fd_step: 1e-5, tol: 1e-10, max_iter: 2000, bloch_points: 1000, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct CoherentInfo {
    pub value: f64,
    pub maximizer: Matrix,
}

struct Objective {
    n: Channel,
    nc: Channel,
    basis: Vec<Matrix>,
}

impl Objective {
    fn new(n: &Channel) -> Self {
        Self { n: n.clone(), nc: n.complementary(), basis: hermitian_basis(n.dim_in()) }
    }

    // Evaluated on Hermitian perturbations of states too, so small negative
    // output eigenvalues are tolerated and dropped by the entropy cutoff.
    fn value(&self, rho: &Matrix) -> Result<f64> {
        let s = |m: Matrix| -> Result<f64> { Ok(entropy_of_eigenvalues(&eig_hermitian(&m.hermitian_part())?.eigenvalues)) };
        Ok(s(self.n.apply(rho)?)? - s(self.nc.apply(rho)?)?)
    }

    fn gradient(&self, rho: &Matrix, h: f64) -> Result<Matrix> {
        let d = rho.rows();
        let mut g = Matrix::zeros(d, d);
        for b in &self.basis {
            let up = self.value(&(rho + &b.scale_real(h)))?;
            let down = self.value(&(rho - &b.scale_real(h)))?;
            g += &b.scale_real((up - down) / (2.0 * h));
        }
        Ok(g)
    }

    fn ascend(&self, start: Matrix, opts: &CoherentInfoOptions) -> Result<CoherentInfo> {
        let mut rho = start;
        let mut f = self.value(&rho)?;
        let mut step = 1.0;
        for _ in 0..opts.max_iter {
            let grad = self.gradient(&rho, opts.fd_step)?;
            let mut t = step;
            let mut accepted = None;
            while t > 1e-12 {
                let cand = project_density(&(&rho + &grad.scale_real(t)))?;
                let fc = self.value(&cand)?;
                if fc >= f + 1e-4 * grad.inner(&(&cand - &rho)).re {
                    accepted = Some((cand, fc));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, fc)) = accepted else { break };
            let improvement = fc - f;
            if improvement > 0.0 {
                rho = cand;
                f = fc;
            }
            if improvement < opts.tol {
                break;
            }
            step = (2.0 * t).min(1e3);
        }
        Ok(CoherentInfo { value: f, maximizer: rho })
    }
}

/// Orthonormal basis of `d × d` Hermitian matrices.
fn hermitian_basis(d: usize) -> Vec<Matrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis: Vec<Matrix> = (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect();
    for i in 0..d {
        for j in i + 1..d {
            basis.push(Matrix::from_fn(d, d, |a, b| match (a, b) {
                _ if (a, b) == (i, j) || (a, b) == (j, i) => C64::new(s, 0.0),
                _ => C64::new(0.0, 0.0),
            }));
            basis.push(Matrix::from_fn(d, d, |a, b| match (a, b) {
                _ if (a, b) == (i, j) => C64::new(0.0, -s),
                _ if (a, b) == (j, i) => C64::new(0.0, s),
                _ => C64::new(0.0, 0.0),
            }));
        }
    }
    basis
}

/// Euclidean projection of a Hermitian matrix onto density matrices.
pub fn project_density(h: &Matrix) -> Result<Matrix> {
    let e = eig_hermitian(&h.hermitian_part())?;
    let lambda = project_simplex(&e.eigenvalues);
    let v = &e.eigenvectors;
    Ok(v.matmul(&Matrix::from_diag(&lambda)).matmul(&v.dagger()).hermitian_part())
}

fn project_simplex(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    x.iter().map(|&v| (v - theta).max(0.0)).collect()
}

fn bloch_grid(points: usize) -> Vec<Matrix> {
    let radii = 10.min(points.max(1));
    let dirs = (points / radii).max(1);
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(radii * dirs);
    for ir in 1..=radii {
        let r = ir as f64 / radii as f64;
        for k in 0..dirs {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / dirs as f64;
            let rho_xy = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            let (x, y, z) = (r * rho_xy * phi.cos(), r * rho_xy * phi.sin(), r * z);
            let entries = [
                C64::new((1.0 + z) / 2.0, 0.0),
                C64::new(x / 2.0, -y / 2.0),
                C64::new(x / 2.0, y / 2.0),
                C64::new((1.0 - z) / 2.0, 0.0),
            ];
            out.push(Matrix::from_fn(2, 2, |i, j| entries[2 * i + j]));
        }
    }
    out
}

/// `I_c(N) = max_ρ I_c(ρ; N)` with default options.
pub fn coherent_information(n: &Channel) -> Result<CoherentInfo> {
    coherent_information_with(n, &CoherentInfoOptions::default())
}

/// Projected gradient ascent from `I/d` and `opts.restarts` random states,
/// plus a Bloch-ball grid for qubits. The result is the best value found,
/// so it is a lower bound on the true maximum.
pub fn coherent_information_with(n: &Channel, opts: &CoherentInfoOptions) -> Result<CoherentInfo> {
    let obj = Objective::new(n);
    let d = n.dim_in();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![Matrix::identity(d).scale_real(1.0 / d as f64)];
    starts.extend((0..opts.restarts).map(|_| random_density(&mut rng, d)));

    let mut best: Option<CoherentInfo> = None;
    let mut consider = |c: CoherentInfo| {
        if best.as_ref().is_none_or(|b| c.value > b.value) {
            best = Some(c);
        }
    };
    for s in starts {
        consider(obj.ascend(s, opts)?);
    }
    if d == 2 && opts.bloch_points > 0 {
        for rho in bloch_grid(opts.bloch_points) {
            let value = obj.value(&rho)?;
            consider(CoherentInfo { value, maximizer: rho });
        }
    }
    Ok(best.expect("at least one start"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaSource {
    Sdp,
    Constructed,
}

impl fmt::Display for EtaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EtaSource::Sdp => "sdp",
            EtaSource::Constructed => "constructed",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CapacityReport {
    pub ic: f64,
    pub maximizer: Matrix,
    pub eta: f64,
    pub eta_source: EtaSource,
    /// `|E|`, the numerical Choi rank.
    pub choi_rank: usize,
    /// Relative eigenvalue threshold used for `choi_rank`.
    pub rank_threshold: f64,
    pub q_interval: (f64, f64),
    pub p_interval: (f64, f64),
}

impl CapacityReport {
    pub const ROW_HEADER: &'static str = "ic eta eta_source choi_rank q_lower q_upper p_lower p_upper";

    /// One whitespace-separated line matching [`Self::ROW_HEADER`].
    pub fn row(&self) -> String {
        format!(
            "{:.12e} {:.12e} {} {} {:.12e} {:.12e} {:.12e} {:.12e}",
            self.ic,
            self.eta,
            self.eta_source,
            self.choi_rank,
            self.q_interval.0,
            self.q_interval.1,
            self.p_interval.0,
            self.p_interval.1
        )
    }
}

impl fmt::Display for CapacityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coherent information  {:.10}", self.ic)?;
        writeln!(f, "degradability eta     {:.6e} ({})", self.eta, self.eta_source)?;
        writeln!(f, "environment |E|       {} (Choi rank, relative threshold {:.0e})", self.choi_rank, self.rank_threshold)?;
        writeln!(f, "Q interval            [{:.10}, {:.10}]", self.q_interval.0, self.q_interval.1)?;
        writeln!(f, "P interval            [{:.10}, {:.10}]", self.p_interval.0, self.p_interval.1)?;
        writeln!(f, "maximizer")?;
        for i in 0..self.maximizer.rows() {
            let cells: Vec<String> = (0..self.maximizer.cols())
                .map(|j| {
                    let z = self.maximizer.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", cells.join("  "))?;
        }
        write!(f, "note: {OPTIMIZER_CAVEAT}")
    }
}

/// Capacity intervals with `η` from the degradability SDP.
pub fn capacity_interval(n: &Channel) -> Result<CapacityReport> {
    capacity_interval_with(n, None, &SdpOptions::default(), &CoherentInfoOptions::default())
}

/// Capacity intervals; a `constructed_eta` (from an explicit degrading map)
/// replaces the SDP value when given.
pub fn capacity_interval_with(
    n: &Channel,
    constructed_eta: Option<f64>,
    sdp: &SdpOptions,
    ic_opts: &CoherentInfoOptions,
) -> Result<CapacityReport> {
    let (eta, eta_source) = match constructed_eta {
        Some(eta) if eta.is_finite() && eta >= 0.0 => (eta, EtaSource::Constructed),
        Some(eta) => return Err(Error::OutOfRange(format!("η must be finite and nonnegative, got {eta}"))),
        None => {
            let report = dg_sdp_with(n, sdp)?;
            (report.eta_sdp.unwrap_or(0.0), EtaSource::Sdp)
        }
    };
    let ic = coherent_information_with(n, ic_opts)?;
    let rank_threshold = Tolerances::DEFAULT.rank_relative;
    let choi_rank = n.choi().rank(rank_threshold);
    let (q_gap, p_gap) = if eta < ETA_MIN { (0.0, 0.0) } else { (f1(eta, choi_rank)?, f2(eta, choi_rank)?) };
    Ok(CapacityReport {
        ic: ic.value,
        maximizer: ic.maximizer,
        eta,
        eta_source,
        choi_rank,
        rank_threshold,
        q_interval: (ic.value, ic.value + q_gap),
        p_interval: (ic.value, ic.value + p_gap),
    })
}
