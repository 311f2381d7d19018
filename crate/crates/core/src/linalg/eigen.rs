use num_complex::Complex;
use num_traits::Zero;

use super::{tol, ComplexMatrix};
use crate::{Error, Real, Result, Tolerances};

/// Spectral decomposition `H = U diag(λ) U†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigenResult<T: Real> {
    /// Eigenvalues in nondecreasing order.
    pub eigenvalues: Vec<T>,
    /// Orthonormal eigenvectors, one per column, in the same order.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigenResult<T> {
    /// `U diag(f(λ)) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex::zero();
            for (k, &lam) in self.eigenvalues.iter().enumerate() {
                let w = f(lam);
                if w != T::zero() {
                    acc += u.get(i, k) * u.get(j, k).conj() * w;
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.reconstruct_with(|x| x)
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Input must satisfy `‖h - h†‖_max ≤ 1e-9` (or a few ulps of the scalar type,
/// whichever is larger); the Hermitian part is diagonalised.
pub fn eig_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigenResult<T>> {
    let dev = h.hermiticity_deviation();
    let scale = T::one() + super::max_norm(h);
    if !(dev <= tol::<T>(Tolerances::DEFAULT.hermiticity) * scale) {
        return Err(Error::NotHermitian { deviation: dev.as_f64() });
    }
    Ok(jacobi(h.hermitian_part()))
}

fn jacobi<T: Real>(a: ComplexMatrix<T>) -> HermitianEigenResult<T> {
    let n = a.rows();
    let mut a = a;
    let mut v = ComplexMatrix::<T>::identity(n);
    let total: T = a.frobenius_norm();
    let threshold = T::epsilon() * T::lit(0.5) * total;

    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= threshold || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.get(p, q);
                let mag = g.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let phase = g / mag; // e^{iφ}
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (T::lit(2.0) * mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();

                // A <- A U, U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on columns p, q.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a[(k, p)] = akp * c - akq * ph_conj * s;
                    a[(k, q)] = akp * s + akq * ph_conj * c;
                }
                // A <- U† A on rows p, q.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a.get(p, p).re, T::zero());
                a[(q, q)] = Complex::new(a.get(q, q).re, T::zero());
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v[(k, p)] = vkp * c - vkq * ph_conj * s;
                    v[(k, q)] = vkp * s + vkq * ph_conj * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigenvalues = order.iter().map(|&i| a.get(i, i).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    HermitianEigenResult { eigenvalues, eigenvectors }
}
