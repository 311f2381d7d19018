//! Homogeneous self-dual interior point method for
//! `min qᵀx  s.t.  F0_b + Σ_i x_i F_ib ⪰ 0` over real symmetric blocks.
//!
//! Internally the standard conic form `Ax + s = b, s ⪰ 0` is used with
//! `A_i = −F_i` and `b = F0`; the dual is `max −⟨b, z⟩ s.t. Aᵀz + q = 0`.

use nalgebra::{DMatrix, DVector};

use super::{SdpOptions, SdpStatus};

/// Sparse symmetric matrix as `(row, col, value)` with both triangles listed.
pub(crate) type Sparse = Vec<(usize, usize, f64)>;

pub(crate) struct Block {
    pub size: usize,
    pub constant: DMatrix<f64>,
    /// Distinct variable indices with their coefficient matrices.
    pub terms: Vec<(usize, Sparse)>,
}

pub(crate) struct ConeProblem {
    pub num_vars: usize,
    pub q: Vec<f64>,
    pub blocks: Vec<Block>,
}

pub(crate) struct ConeSolution {
    pub status: SdpStatus,
    pub x: Vec<f64>,
    pub primal: f64,
    pub dual: f64,
    pub iterations: usize,
}

const STEP_FRACTION: f64 = 0.98;
const INFEASIBILITY_TOL: f64 = 1e-8;

type Blocks = Vec<DMatrix<f64>>;

fn sparse_inner(f: &Sparse, m: &DMatrix<f64>) -> f64 {
    f.iter().map(|&(r, c, a)| a * m[(r, c)]).sum()
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

fn inner_blocks(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| inner(x, y)).sum()
}

fn max_abs_blocks(a: &Blocks) -> f64 {
    a.iter().map(|m| m.amax()).fold(0.0, f64::max)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// Nesterov–Todd scaling of one block: `RᵀZR = R⁻¹SR⁻ᵀ = Λ`.
struct Scaling {
    r: DMatrix<f64>,
    r_inv: DMatrix<f64>,
    lambda: DVector<f64>,
    /// `R⁻ᵀR⁻¹`, so `H⁻¹(X) = g X g`.
    g: DMatrix<f64>,
}

impl Scaling {
    fn new(s: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Self> {
        let l1 = s.clone().cholesky()?.l();
        let l2 = z.clone().cholesky()?.l();
        let svd = (l2.transpose() * &l1).svd(true, true);
        let (u, v_t) = (svd.u?, svd.v_t?);
        let lambda = svd.singular_values;
        if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return None;
        }
        let inv_sqrt = DMatrix::from_diagonal(&lambda.map(|l| 1.0 / l.sqrt()));
        let r = &l1 * v_t.transpose() * &inv_sqrt;
        let r_inv = &inv_sqrt * u.transpose() * l2.transpose();
        let g = r_inv.transpose() * &r_inv;
        Some(Self { r, r_inv, lambda, g })
    }

    /// `λ \ D`: solves `λ ∘ X = D` for the Jordan product.
    fn lambda_solve(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        let l = &self.lambda;
        DMatrix::from_fn(d.nrows(), d.ncols(), |i, j| 2.0 * d[(i, j)] / (l[i] + l[j]))
    }

    /// `Wᵀ(Y) = R Y Rᵀ`.
    fn w_t(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        &self.r * y * self.r.transpose()
    }

    /// `W(Z) = Rᵀ Z R`.
    fn w(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        self.r.transpose() * z * &self.r
    }

    /// `W⁻ᵀ(S) = R⁻¹ S R⁻ᵀ`.
    fn w_inv_t(&self, s: &DMatrix<f64>) -> DMatrix<f64> {
        &self.r_inv * s * self.r_inv.transpose()
    }

    fn h_inv(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.g * x * &self.g
    }

    /// Largest `α ≤ 1/…` keeping `Λ + α D ⪰ 0` (`D` already scaled).
    fn max_step(&self, d: &DMatrix<f64>) -> f64 {
        let l = &self.lambda;
        let p = DMatrix::from_fn(d.nrows(), d.ncols(), |i, j| d[(i, j)] / (l[i] * l[j]).sqrt());
        let m = min_eigenvalue(&p);
        if m < 0.0 {
            -1.0 / m
        } else {
            f64::INFINITY
        }
    }
}

struct Direction {
    x: Vec<f64>,
    s: Blocks,
    z: Blocks,
    tau: f64,
    kappa: f64,
}

struct Solver<'a> {
    p: &'a ConeProblem,
    opts: &'a SdpOptions,
    norm_b: f64,
    norm_q: f64,
    degree: usize,
}

impl<'a> Solver<'a> {
    fn a_op(&self, x: &[f64]) -> Blocks {
        self.p
            .blocks
            .iter()
            .map(|b| {
                let mut m = DMatrix::zeros(b.size, b.size);
                for (v, f) in &b.terms {
                    for &(r, c, a) in f {
                        m[(r, c)] -= a * x[*v];
                    }
                }
                m
            })
            .collect()
    }

    fn at_op(&self, z: &Blocks) -> Vec<f64> {
        let mut out = vec![0.0; self.p.num_vars];
        for (b, zb) in self.p.blocks.iter().zip(z) {
            for (v, f) in &b.terms {
                out[*v] -= sparse_inner(f, zb);
            }
        }
        out
    }

    fn b_dot(&self, z: &Blocks) -> f64 {
        self.p.blocks.iter().zip(z).map(|(b, zb)| inner(&b.constant, zb)).sum()
    }

    fn q_dot(&self, x: &[f64]) -> f64 {
        self.p.q.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn constants(&self) -> Blocks {
        self.p.blocks.iter().map(|b| b.constant.clone()).collect()
    }

    /// Schur complement `M = Aᵀ H⁻¹ A` with `H⁻¹(X) = gXg` per block.
    fn schur(&self, g: &[&DMatrix<f64>]) -> DMatrix<f64> {
        let n = self.p.num_vars;
        let mut m = DMatrix::zeros(n, n);
        for (b, gb) in self.p.blocks.iter().zip(g) {
            let size = b.size;
            let scaled: Vec<DMatrix<f64>> = b
                .terms
                .iter()
                .map(|(_, f)| {
                    if f.len() <= size {
                        let mut t = DMatrix::zeros(size, size);
                        for &(r, c, a) in f {
                            t.ger(a, &gb.column(r), &gb.column(c), 1.0);
                        }
                        t
                    } else {
                        let mut dense = DMatrix::zeros(size, size);
                        for &(r, c, a) in f {
                            dense[(r, c)] += a;
                        }
                        *gb * dense * *gb
                    }
                })
                .collect();
            for (ia, (i, fi)) in b.terms.iter().enumerate() {
                for (jb, (j, _)) in b.terms.iter().enumerate().skip(ia) {
                    let val = sparse_inner(fi, &scaled[jb]);
                    m[(*i, *j)] += val;
                    if i != j {
                        m[(*j, *i)] += val;
                    }
                }
            }
        }
        m
    }

    fn run(&self) -> ConeSolution {
        let p = self.p;
        let n = p.num_vars;
        let nb = p.blocks.len();
        let ident: Vec<DMatrix<f64>> = p.blocks.iter().map(|b| DMatrix::identity(b.size, b.size)).collect();
        let ident_refs: Vec<&DMatrix<f64>> = ident.iter().collect();

        // Initial point: least-norm s and z, shifted into the cone.
        let m0 = self.schur(&ident_refs);
        let Some(m0_solve) = FactoredSchur::new(m0) else {
            return self.failure(vec![0.0; n], 0, SdpStatus::NumericalFailure);
        };
        let b = self.constants();
        let atb = self.at_op(&b);
        let mut x = m0_solve.solve(&atb);
        let ax = self.a_op(&x);
        let mut s: Blocks = b.iter().zip(&ax).map(|(bb, a)| bb - a).collect();
        let w = m0_solve.solve(&p.q);
        let mut z: Blocks = self.a_op(&w).into_iter().map(|m| -m).collect();
        for blk in s.iter_mut().chain(z.iter_mut()) {
            symmetrize(blk);
            let lo = min_eigenvalue(blk);
            if lo < f64::EPSILON.sqrt() {
                let shift = 1.0 - lo;
                for i in 0..blk.nrows() {
                    blk[(i, i)] += shift;
                }
            }
        }
        let (mut tau, mut kappa) = (1.0, 1.0);

        for iter in 0..=self.opts.max_iter {
            // Residuals.
            let ax = self.a_op(&x);
            let r_z: Blocks = (0..nb).map(|k| &ax[k] + &s[k] - &b[k] * tau).collect();
            let atz = self.at_op(&z);
            let r_x: Vec<f64> = (0..n).map(|i| atz[i] + p.q[i] * tau).collect();
            let (qx, bz) = (self.q_dot(&x), self.b_dot(&z));
            let r_tau = qx + bz + kappa;

            if !(qx.is_finite() && bz.is_finite() && tau.is_finite() && kappa.is_finite()) {
                return self.failure(x, iter, SdpStatus::NumericalFailure);
            }

            // Termination on the normalised iterate.
            let xn: Vec<f64> = x.iter().map(|v| v / tau).collect();
            let primal = qx / tau;
            let dual = -bz / tau;
            let pres = max_abs_blocks(&r_z) / tau
                / (1.0f64).max(self.norm_b + max_abs(&xn) + max_abs_blocks(&s) / tau);
            let dres = max_abs(&r_x) / tau / (1.0f64).max(self.norm_q + max_abs_blocks(&z) / tau);
            let gap = (primal - dual).abs();
            if pres <= self.opts.feas_tol && dres <= self.opts.feas_tol && gap <= self.opts.gap_tol {
                return ConeSolution { status: SdpStatus::Optimal, x: xn, primal, dual, iterations: iter };
            }
            let z_norm = max_abs_blocks(&z);
            if bz < 0.0 && z_norm > 0.0 {
                let scaled_bz = bz / z_norm;
                if -scaled_bz > INFEASIBILITY_TOL && max_abs(&atz) / z_norm <= INFEASIBILITY_TOL * -scaled_bz {
                    return ConeSolution { status: SdpStatus::Infeasible, x: xn, primal, dual, iterations: iter };
                }
            }
            let x_norm = max_abs(&x).max(max_abs_blocks(&s));
            if qx < 0.0 && x_norm > 0.0 {
                let scaled_qx = qx / x_norm;
                let axs: Blocks = (0..nb).map(|k| &ax[k] + &s[k]).collect();
                if -scaled_qx > INFEASIBILITY_TOL && max_abs_blocks(&axs) / x_norm <= INFEASIBILITY_TOL * -scaled_qx {
                    return ConeSolution { status: SdpStatus::Infeasible, x: xn, primal, dual, iterations: iter };
                }
            }
            if iter == self.opts.max_iter {
                return ConeSolution { status: SdpStatus::MaxIterations, x: xn, primal, dual, iterations: iter };
            }

            // Scaling and Schur factorisation.
            let Some(scalings) = s.iter().zip(&z).map(|(sb, zb)| Scaling::new(sb, zb)).collect::<Option<Vec<_>>>() else {
                return self.failure(x, iter, SdpStatus::NumericalFailure);
            };
            let g: Vec<&DMatrix<f64>> = scalings.iter().map(|sc| &sc.g).collect();
            let Some(schur) = FactoredSchur::new(self.schur(&g)) else {
                return self.failure(x, iter, SdpStatus::NumericalFailure);
            };
            let solve_k = |r1: &[f64], r2: &Blocks| -> (Vec<f64>, Blocks) {
                let hr2: Blocks = (0..nb).map(|k| scalings[k].h_inv(&r2[k])).collect();
                let at_hr2 = self.at_op(&hr2);
                let rhs: Vec<f64> = (0..n).map(|i| r1[i] + at_hr2[i]).collect();
                let mut dx = schur.solve(&rhs);
                let adx = self.a_op(&dx);
                let mut dz: Blocks = (0..nb).map(|k| scalings[k].h_inv(&(&adx[k] - &r2[k]))).collect();
                // Refine against the unreduced equation Aᵀ Δz = r1.
                let mut err = f64::INFINITY;
                for _ in 0..3 {
                    let atdz = self.at_op(&dz);
                    let e1: Vec<f64> = (0..n).map(|i| r1[i] - atdz[i]).collect();
                    let e = max_abs(&e1);
                    if !(e < 0.5 * err) || e == 0.0 {
                        break;
                    }
                    err = e;
                    let cx = schur.solve(&e1);
                    let acx = self.a_op(&cx);
                    for i in 0..n {
                        dx[i] += cx[i];
                    }
                    for k in 0..nb {
                        dz[k] += scalings[k].h_inv(&acx[k]);
                    }
                }
                (dx, dz)
            };
            let neg_q: Vec<f64> = p.q.iter().map(|v| -v).collect();
            let (x1, z1) = solve_k(&neg_q, &b);
            let denom1 = self.q_dot(&x1) + self.b_dot(&z1) - kappa / tau;

            let direction = |eta: f64, d_s: &Blocks, d_kappa: f64| -> Direction {
                let wt: Blocks = (0..nb).map(|k| scalings[k].w_t(&scalings[k].lambda_solve(&d_s[k]))).collect();
                let r1: Vec<f64> = r_x.iter().map(|v| -eta * v).collect();
                let r2: Blocks = (0..nb).map(|k| &wt[k] - &r_z[k] * eta).collect();
                let (x2, z2) = solve_k(&r1, &r2);
                let dtau = (-eta * r_tau - self.q_dot(&x2) - self.b_dot(&z2) + d_kappa / tau) / denom1;
                let dx: Vec<f64> = (0..n).map(|i| x2[i] + dtau * x1[i]).collect();
                let dz: Blocks = (0..nb).map(|k| &z2[k] + &z1[k] * dtau).collect();
                // Δs from the linearised primal equation rather than from
                // complementarity, so that roundoff in H does not leak into
                // primal feasibility.
                let adx = self.a_op(&dx);
                let ds: Blocks = (0..nb).map(|k| &b[k] * dtau - &adx[k] - &r_z[k] * eta).collect();
                let dkappa = -(d_kappa + kappa * dtau) / tau;
                Direction { x: dx, s: ds, z: dz, tau: dtau, kappa: dkappa }
            };
            let step = |d: &Direction| -> (f64, Blocks, Blocks) {
                let mut alpha = f64::INFINITY;
                let ds: Blocks = (0..nb).map(|k| scalings[k].w_inv_t(&d.s[k])).collect();
                let dz: Blocks = (0..nb).map(|k| scalings[k].w(&d.z[k])).collect();
                for k in 0..nb {
                    alpha = alpha.min(scalings[k].max_step(&ds[k])).min(scalings[k].max_step(&dz[k]));
                }
                if d.tau < 0.0 {
                    alpha = alpha.min(-tau / d.tau);
                }
                if d.kappa < 0.0 {
                    alpha = alpha.min(-kappa / d.kappa);
                }
                (alpha, ds, dz)
            };

            let mu = (inner_blocks(&s, &z) + tau * kappa) / (self.degree + 1) as f64;
            let lambda_sq: Blocks = scalings.iter().map(|sc| DMatrix::from_diagonal(&sc.lambda.map(|l| l * l))).collect();

            // Predictor.
            let affine = direction(1.0, &lambda_sq, tau * kappa);
            let (alpha_aff, ds_aff, dz_aff) = step(&affine);
            let sigma = (1.0 - alpha_aff.min(1.0)).powi(3);

            // Corrector with Mehrotra's second-order term.
            let d_s: Blocks = (0..nb)
                .map(|k| {
                    let cross = (&ds_aff[k] * &dz_aff[k] + &dz_aff[k] * &ds_aff[k]) * 0.5;
                    &lambda_sq[k] + cross - &ident[k] * (sigma * mu)
                })
                .collect();
            let d_kappa = tau * kappa + affine.tau * affine.kappa - sigma * mu;
            let dir = direction(1.0 - sigma, &d_s, d_kappa);
            let (alpha_max, _, _) = step(&dir);
            let alpha = (STEP_FRACTION * alpha_max).min(1.0);
            if !(alpha > 1e-12) {
                return self.failure(x, iter, SdpStatus::NumericalFailure);
            }

            for (xi, di) in x.iter_mut().zip(&dir.x) {
                *xi += alpha * di;
            }
            for k in 0..nb {
                s[k] += &dir.s[k] * alpha;
                z[k] += &dir.z[k] * alpha;
                symmetrize(&mut s[k]);
                symmetrize(&mut z[k]);
            }
            tau += alpha * dir.tau;
            kappa += alpha * dir.kappa;
        }
        unreachable!("loop returns at max_iter")
    }

    fn failure(&self, x: Vec<f64>, iterations: usize, status: SdpStatus) -> ConeSolution {
        ConeSolution { status, x, primal: f64::NAN, dual: f64::NAN, iterations }
    }
}

/// Cholesky factor of `M + δI` with iterative refinement against `M`.
struct FactoredSchur {
    m: DMatrix<f64>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl FactoredSchur {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        let n = m.nrows();
        let scale = (0..n).map(|i| m[(i, i)].abs()).fold(1.0, f64::max);
        let mut reg = 1e-14 * scale;
        for _ in 0..8 {
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[(i, i)] += reg;
            }
            if let Some(chol) = shifted.cholesky() {
                return Some(Self { m, chol });
            }
            reg *= 100.0;
        }
        None
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let r = DVector::from_column_slice(rhs);
        let mut y = self.chol.solve(&r);
        for _ in 0..3 {
            let res = &r - &self.m * &y;
            y += self.chol.solve(&res);
        }
        y.as_slice().to_vec()
    }
}

pub(crate) fn solve(problem: &ConeProblem, opts: &SdpOptions) -> ConeSolution {
    let norm_b = problem.blocks.iter().map(|b| b.constant.amax()).fold(0.0, f64::max);
    let solver = Solver {
        p: problem,
        opts,
        norm_b,
        norm_q: max_abs(&problem.q),
        degree: problem.blocks.iter().map(|b| b.size).sum(),
    };
    if problem.num_vars == 0 {
        // Pure feasibility of constant blocks.
        let feasible = problem.blocks.iter().all(|b| b.size == 0 || min_eigenvalue(&b.constant) >= -opts.feas_tol);
        let status = if feasible { SdpStatus::Optimal } else { SdpStatus::Infeasible };
        return ConeSolution { status, x: vec![], primal: 0.0, dual: 0.0, iterations: 0 };
    }
    solver.run()
}
