//! Small dense semidefinite programming with complex Hermitian variables.
//!
//! Problems are written over real scalar variables and Hermitian matrix
//! variables, with constraints that affine Hermitian expressions are PSD or
//! zero. Equalities are eliminated exactly, Hermitian blocks are lowered to
//! real symmetric ones by [`hermitian_to_real`], and the result is handed to
//! a homogeneous self-dual interior point method with Nesterov–Todd scaling.
//!
//! ```
//! use lownoise::sdp::{HermExpr, SdpOptions, SdpProblem, SdpStatus};
//! use lownoise::Matrix;
//!
//! // Largest eigenvalue of diag(1, 2, 5).
//! let mut p = SdpProblem::new();
//! let mu = p.scalar();
//! let d = Matrix::from_diag(&[1.0, 2.0, 5.0]);
//! p.psd(HermExpr::scalar_identity(mu, 3) - HermExpr::constant(d));
//! p.minimize(mu.into());
//! let sol = p.solve(&SdpOptions::default()).unwrap();
//! assert_eq!(sol.status, SdpStatus::Optimal);
//! assert!((sol.value(mu) - 5.0).abs() < 1e-7);
//! ```

mod expr;
mod ipm;

use std::collections::BTreeMap;

use nalgebra::DMatrix;

pub use expr::{HermExpr, HermitianVar, LinExpr, ScalarVar};

use crate::linalg::max_norm;
use crate::{Error, Matrix, Result, Tolerances};
#[cfg(test)]
use crate::{linalg::Keep, C64};

/// Termination state of [`SdpProblem::solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// A primal or dual infeasibility certificate was found.
    Infeasible,
    MaxIterations,
    NumericalFailure,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::MaxIterations => "max_iterations",
            SdpStatus::NumericalFailure => "numerical_failure",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    /// Bound on `|primal − dual|` at termination.
    pub gap_tol: f64,
    /// Bound on the normalised primal and dual residuals.
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-8, feas_tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    values: Vec<f64>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    /// `|primal − dual|`.
    pub fn gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }

    /// Turns any non-optimal status into [`Error::Solver`].
    pub fn into_optimal(self) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(Error::Solver { status: self.status, iterations: self.iterations })
        }
    }

    /// All scalar parameters in declaration order.
    pub fn variables(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: ScalarVar) -> f64 {
        self.values[v.index()]
    }

    pub fn matrix(&self, v: &HermitianVar) -> Matrix {
        v.assemble(&self.values)
    }

    pub fn eval(&self, e: &LinExpr) -> f64 {
        e.eval(&self.values)
    }

    pub fn eval_matrix(&self, e: &HermExpr) -> Matrix {
        e.eval(&self.values)
    }
}

/// `H ↦ [[Re H, −Im H], [Im H, Re H]]`.
pub fn hermitian_to_real(h: &Matrix) -> Result<DMatrix<f64>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("Hermitian block must be square".into()));
    }
    let dev = h.hermiticity_deviation();
    if dev > Tolerances::DEFAULT.hermiticity * (1.0 + max_norm(h)) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = h.rows();
    Ok(DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h.get(r % n, c % n);
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

/// Sparse lowering of a Hermitian coefficient matrix.
fn lower_sparse(m: &Matrix) -> ipm::Sparse {
    let n = m.rows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if z.re != 0.0 {
                out.push((i, j, z.re));
                out.push((n + i, n + j, z.re));
            }
            if z.im != 0.0 {
                out.push((i, n + j, -z.im));
                out.push((n + i, j, z.im));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    num_vars: usize,
    objective: LinExpr,
    psd: Vec<HermExpr>,
    equalities: Vec<HermExpr>,
    scalar_equalities: Vec<LinExpr>,
}

/// Row of a linear system `Σ a_v x_v = rhs`.
struct Equation {
    coeffs: BTreeMap<usize, f64>,
    rhs: f64,
}

/// Affine parametrisation `x_v = offset_v + Σ_f map_v[f] y_f` of the
/// solution set of the equality constraints.
struct Reduction {
    offset: Vec<f64>,
    map: Vec<BTreeMap<usize, f64>>,
    free: usize,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scalar(&mut self) -> ScalarVar {
        let v = ScalarVar::new(self.num_vars);
        self.num_vars += 1;
        v
    }

    /// Hermitian `dim × dim` variable with `dim²` real parameters.
    pub fn hermitian(&mut self, dim: usize) -> HermitianVar {
        let v = HermitianVar::new(self.num_vars, dim);
        self.num_vars += dim * dim;
        v
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Objective to minimise.
    pub fn minimize(&mut self, objective: LinExpr) {
        self.objective = objective;
    }

    /// `expr ⪰ 0`.
    pub fn psd(&mut self, expr: HermExpr) {
        self.psd.push(expr);
    }

    /// `expr ≥ 0` for a real expression.
    pub fn nonneg(&mut self, expr: LinExpr) {
        self.psd.push(HermExpr::from_lin(&expr));
    }

    /// `expr = 0` entrywise.
    pub fn equal(&mut self, expr: HermExpr) {
        self.equalities.push(expr);
    }

    pub fn equal_scalar(&mut self, expr: LinExpr) {
        self.scalar_equalities.push(expr);
    }

    fn check(&self) -> Result<()> {
        let bad = |k: usize| k >= self.num_vars;
        let herm = self.psd.iter().chain(&self.equalities);
        if herm.clone().any(|e| e.var_indices().any(bad))
            || self.objective.var_indices().any(bad)
            || self.scalar_equalities.iter().any(|e| e.var_indices().any(bad))
        {
            return Err(Error::Malformed("expression references an undeclared variable".into()));
        }
        for e in herm {
            let dev = e.hermiticity_deviation();
            if dev > Tolerances::DEFAULT.hermiticity * (1.0 + e.scale()) {
                return Err(Error::NotHermitian { deviation: dev });
            }
        }
        Ok(())
    }

    fn equations(&self) -> Vec<Equation> {
        let mut rows = Vec::new();
        for e in &self.scalar_equalities {
            rows.push(Equation { coeffs: e.coefficients().clone(), rhs: -e.constant_term() });
        }
        for e in &self.equalities {
            let n = e.dim();
            for i in 0..n {
                for j in i..n {
                    let mut re = Equation { coeffs: BTreeMap::new(), rhs: -e.constant_part().get(i, j).re };
                    let mut im = Equation { coeffs: BTreeMap::new(), rhs: -e.constant_part().get(i, j).im };
                    for (v, m) in e.terms() {
                        let z = m.get(i, j);
                        if z.re != 0.0 {
                            re.coeffs.insert(*v, z.re);
                        }
                        if z.im != 0.0 {
                            im.coeffs.insert(*v, z.im);
                        }
                    }
                    rows.push(re);
                    if i != j {
                        rows.push(im);
                    }
                }
            }
        }
        rows
    }

    /// Gauss–Jordan elimination with partial pivoting. `None` when the
    /// equalities are inconsistent.
    fn reduce(&self) -> Option<Reduction> {
        let n = self.num_vars;
        let rows = self.equations();
        let m = rows.len();
        let mut a = DMatrix::<f64>::zeros(m, n + 1);
        for (r, eq) in rows.iter().enumerate() {
            for (&v, &c) in &eq.coeffs {
                a[(r, v)] += c;
            }
            a[(r, n)] = eq.rhs;
        }
        let scale = a.amax().max(1.0);
        let eps = 1e-12 * scale;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let (best, val) = (row..m)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if val <= eps {
                continue;
            }
            a.swap_rows(row, best);
            let p = a[(row, col)];
            for c in 0..=n {
                a[(row, c)] /= p;
            }
            for r in 0..m {
                if r != row {
                    let f = a[(r, col)];
                    if f != 0.0 {
                        for c in 0..=n {
                            a[(r, c)] -= f * a[(row, c)];
                        }
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        if (row..m).any(|r| a[(r, n)].abs() > 1e-9 * scale) {
            return None;
        }
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; n];
            for &(_, c) in &pivots {
                v[c] = true;
            }
            v
        };
        let free_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut offset = vec![0.0; n];
        let mut map = vec![BTreeMap::new(); n];
        for (f, &c) in free_cols.iter().enumerate() {
            map[c].insert(f, 1.0);
        }
        for &(r, c) in &pivots {
            offset[c] = a[(r, n)];
            for (f, &fc) in free_cols.iter().enumerate() {
                let coef = a[(r, fc)];
                if coef != 0.0 {
                    map[c].insert(f, -coef);
                }
            }
        }
        Some(Reduction { offset, map, free: free_cols.len() })
    }

    /// Solves the problem. Structural problems (undeclared variables,
    /// non-Hermitian blocks) are errors; solver outcomes are reported in
    /// [`SdpSolution::status`].
    pub fn solve(&self, opts: &SdpOptions) -> Result<SdpSolution> {
        self.check()?;
        let Some(red) = self.reduce() else {
            return Ok(SdpSolution {
                status: SdpStatus::Infeasible,
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                iterations: 0,
                values: vec![0.0; self.num_vars],
            });
        };

        let mut blocks = Vec::with_capacity(self.psd.len());
        for e in &self.psd {
            let n = e.dim();
            let mut constant = e.constant_part().clone();
            let mut reduced: BTreeMap<usize, Matrix> = BTreeMap::new();
            for (v, m) in e.terms() {
                if red.offset[*v] != 0.0 {
                    constant += &m.scale_real(red.offset[*v]);
                }
                for (&f, &c) in &red.map[*v] {
                    let acc = reduced.entry(f).or_insert_with(|| Matrix::zeros(n, n));
                    *acc += &m.scale_real(c);
                }
            }
            let terms = reduced
                .into_iter()
                .map(|(f, m)| (f, lower_sparse(&m.hermitian_part())))
                .filter(|(_, s)| !s.is_empty())
                .collect();
            blocks.push(ipm::Block {
                size: 2 * n,
                constant: hermitian_to_real(&constant.hermitian_part())?,
                terms,
            });
        }

        let mut q = vec![0.0; red.free];
        let mut obj_const = self.objective.constant_term();
        for (&v, &c) in self.objective.coefficients() {
            obj_const += c * red.offset[v];
            for (&f, &t) in &red.map[v] {
                q[f] += c * t;
            }
        }

        let cone = ipm::ConeProblem { num_vars: red.free, q, blocks };
        let sol = ipm::solve(&cone, opts);
        let values = (0..self.num_vars)
            .map(|v| red.offset[v] + red.map[v].iter().map(|(&f, &c)| c * sol.x.get(f).copied().unwrap_or(0.0)).sum::<f64>())
            .collect();
        Ok(SdpSolution {
            status: sol.status,
            primal_objective: sol.primal + obj_const,
            dual_objective: sol.dual + obj_const,
            iterations: sol.iterations,
            values,
        })
    }
}
