use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::{max_norm, partial_trace, Keep};
use crate::{Matrix, Result, C64};

/// Real scalar decision variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarVar(usize);

impl ScalarVar {
    pub(crate) fn new(index: usize) -> Self {
        Self(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// Hermitian matrix variable. Its `dim²` real parameters are the diagonal
/// entries followed by `(Re X_ij, Im X_ij)` for `i < j` in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianVar {
    offset: usize,
    dim: usize,
}

impl HermitianVar {
    pub(crate) fn new(offset: usize, dim: usize) -> Self {
        Self { offset, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn num_params(&self) -> usize {
        self.dim * self.dim
    }

    /// `(i, j, is_imaginary)` for each parameter.
    fn params(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        let n = self.dim;
        let diag = (0..n).map(|i| (i, i, false));
        let off = (0..n).flat_map(move |i| (i + 1..n).flat_map(move |j| [(i, j, false), (i, j, true)]));
        diag.chain(off)
    }

    fn basis(i: usize, j: usize, imag: bool, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        if i == j {
            m[(i, i)] = C64::new(1.0, 0.0);
        } else if imag {
            m[(i, j)] = C64::new(0.0, 1.0);
            m[(j, i)] = C64::new(0.0, -1.0);
        } else {
            m[(i, j)] = C64::new(1.0, 0.0);
            m[(j, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn expr(&self) -> HermExpr {
        let terms = self
            .params()
            .enumerate()
            .map(|(k, (i, j, imag))| (self.offset + k, Self::basis(i, j, imag, self.dim)))
            .collect();
        HermExpr { dim: self.dim, constant: Matrix::zeros(self.dim, self.dim), terms }
    }

    /// `tr X`.
    pub fn trace(&self) -> LinExpr {
        LinExpr {
            coeffs: (0..self.dim).map(|k| (self.offset + k, 1.0)).collect(),
            constant: 0.0,
        }
    }

    /// `Re tr(M X)`.
    pub fn real_inner(&self, m: &Matrix) -> LinExpr {
        let coeffs = self
            .params()
            .enumerate()
            .map(|(k, (i, j, imag))| {
                let c = if i == j {
                    m.get(i, i).re
                } else if imag {
                    m.get(i, j).im - m.get(j, i).im
                } else {
                    m.get(i, j).re + m.get(j, i).re
                };
                (self.offset + k, c)
            })
            .filter(|(_, c)| *c != 0.0)
            .collect();
        LinExpr { coeffs, constant: 0.0 }
    }

    pub(crate) fn assemble(&self, values: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (k, (i, j, imag)) in self.params().enumerate() {
            let v = values[self.offset + k];
            if i == j {
                m[(i, i)].re = v;
            } else if imag {
                m[(i, j)].im = v;
                m[(j, i)].im = -v;
            } else {
                m[(i, j)].re = v;
                m[(j, i)].re = v;
            }
        }
        m
    }
}

/// Real affine expression `c + Σ a_v x_v`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    coeffs: BTreeMap<usize, f64>,
    constant: f64,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        Self { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn term(v: ScalarVar, c: f64) -> Self {
        Self { coeffs: BTreeMap::from([(v.0, c)]), constant: 0.0 }
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, f64> {
        &self.coeffs
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub(crate) fn var_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub(crate) fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().map(|(&v, &c)| c * values[v]).sum::<f64>()
    }
}

impl From<ScalarVar> for LinExpr {
    fn from(v: ScalarVar) -> Self {
        Self::term(v, 1.0)
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        for (v, c) in rhs.coeffs {
            *self.coeffs.entry(v).or_insert(0.0) += c;
        }
        self.constant += rhs.constant;
        self
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1.0
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, c: f64) -> LinExpr {
        self.coeffs.values_mut().for_each(|a| *a *= c);
        self.constant *= c;
        self
    }
}

/// Hermitian-valued affine expression `C + Σ x_v M_v`.
#[derive(Clone, Debug)]
pub struct HermExpr {
    dim: usize,
    constant: Matrix,
    terms: BTreeMap<usize, Matrix>,
}

impl HermExpr {
    pub fn zero(dim: usize) -> Self {
        Self::constant(Matrix::zeros(dim, dim))
    }

    /// Constant square matrix.
    pub fn constant(m: Matrix) -> Self {
        assert!(m.is_square(), "constant block must be square");
        Self { dim: m.rows(), constant: m, terms: BTreeMap::new() }
    }

    /// `x · I_dim`.
    pub fn scalar_identity(v: ScalarVar, dim: usize) -> Self {
        Self::scalar_times(v, Matrix::identity(dim))
    }

    /// `x · M`.
    pub fn scalar_times(v: ScalarVar, m: Matrix) -> Self {
        assert!(m.is_square(), "coefficient must be square");
        Self { dim: m.rows(), constant: Matrix::zeros(m.rows(), m.rows()), terms: BTreeMap::from([(v.0, m)]) }
    }

    pub(crate) fn from_lin(e: &LinExpr) -> Self {
        let one = |c: f64| Matrix::from_diag(&[c]);
        Self {
            dim: 1,
            constant: one(e.constant),
            terms: e.coeffs.iter().map(|(&v, &c)| (v, one(c))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant_part(&self) -> &Matrix {
        &self.constant
    }

    pub(crate) fn terms(&self) -> impl Iterator<Item = (&usize, &Matrix)> {
        self.terms.iter()
    }

    pub(crate) fn var_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub(crate) fn hermiticity_deviation(&self) -> f64 {
        self.terms.values().chain([&self.constant]).map(|m| m.hermiticity_deviation()).fold(0.0, f64::max)
    }

    pub(crate) fn scale(&self) -> f64 {
        self.terms.values().chain([&self.constant]).map(max_norm).fold(0.0, f64::max)
    }

    /// Applies a linear map to every coefficient.
    pub fn map(&self, f: impl Fn(&Matrix) -> Result<Matrix>) -> Result<Self> {
        let constant = f(&self.constant)?;
        let dim = constant.rows();
        let mut terms = BTreeMap::new();
        for (&v, m) in &self.terms {
            terms.insert(v, f(m)?);
        }
        Ok(Self { dim, constant, terms })
    }

    pub fn partial_trace(&self, dims: (usize, usize), keep: Keep) -> Result<Self> {
        self.map(|m| partial_trace(m, dims, keep))
    }

    pub(crate) fn eval(&self, values: &[f64]) -> Matrix {
        let mut out = self.constant.clone();
        for (&v, m) in &self.terms {
            out += &m.scale_real(values[v]);
        }
        out
    }
}

impl From<&HermitianVar> for HermExpr {
    fn from(v: &HermitianVar) -> Self {
        v.expr()
    }
}

impl Add for HermExpr {
    type Output = HermExpr;
    fn add(mut self, rhs: HermExpr) -> HermExpr {
        assert_eq!(self.dim, rhs.dim, "adding Hermitian expressions of different sizes");
        self.constant += &rhs.constant;
        for (v, m) in rhs.terms {
            match self.terms.get_mut(&v) {
                Some(acc) => *acc += &m,
                None => {
                    self.terms.insert(v, m);
                }
            }
        }
        self
    }
}

impl Neg for HermExpr {
    type Output = HermExpr;
    fn neg(self) -> HermExpr {
        self * -1.0
    }
}

impl Sub for HermExpr {
    type Output = HermExpr;
    fn sub(self, rhs: HermExpr) -> HermExpr {
        self + (-rhs)
    }
}

impl Mul<f64> for HermExpr {
    type Output = HermExpr;
    fn mul(mut self, c: f64) -> HermExpr {
        self.constant = self.constant.scale_real(c);
        self.terms.values_mut().for_each(|m| *m = m.scale_real(c));
        self
    }
}
