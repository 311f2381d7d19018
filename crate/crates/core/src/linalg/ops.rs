use num_complex::Complex;
use num_traits::Zero;

use super::{eig_hermitian, tol, ComplexMatrix};
use crate::{Error, Real, Result, Tolerances};

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

/// Partial trace of an operator on `d1 ⊗ d2`, keeping the requested factor.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    dims: (usize, usize),
    keep: Keep,
) -> Result<ComplexMatrix<T>> {
    let (d1, d2) = dims;
    if d1 == 0 || d2 == 0 || !m.is_square() || m.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {d1}x{d2} needs a square matrix of side {}, got {}x{}",
            d1 * d2,
            m.rows(),
            m.cols()
        )));
    }
    Ok(match keep {
        Keep::First => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).fold(Complex::zero(), |acc, k| acc + m.get(i * d2 + k, j * d2 + k))
        }),
        Keep::Second => ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).fold(Complex::zero(), |acc, k| acc + m.get(k * d2 + i, k * d2 + j))
        }),
    })
}

/// Singular values in nonincreasing order, from the spectrum of `M†M`.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let gram = if m.rows() >= m.cols() {
        m.dagger().matmul(m)
    } else {
        m.matmul(&m.dagger())
    };
    let e = eig_hermitian(&gram.hermitian_part()).expect("Gram matrix is Hermitian");
    let mut sv: Vec<T> = e.eigenvalues.iter().map(|&l| l.max(T::zero()).sqrt()).collect();
    sv.reverse();
    sv
}

fn is_hermitian<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.is_square()
        && m.hermiticity_deviation()
            <= tol::<T>(Tolerances::DEFAULT.hermiticity) * (T::one() + max_norm(m))
}

/// `‖M‖₁ = tr √(M†M)`; sum of absolute eigenvalues for Hermitian input.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    if is_hermitian(m) {
        let e = eig_hermitian(m).expect("checked Hermitian");
        return e.eigenvalues.iter().map(|l| l.abs()).sum();
    }
    singular_values(m).into_iter().sum()
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    if is_hermitian(m) {
        let e = eig_hermitian(m).expect("checked Hermitian");
        return e.min().abs().max(e.max().abs());
    }
    singular_values(m)[0]
}

/// Entrywise maximum modulus in the computational basis.
pub fn max_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.data().iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function<T: Real>(
    h: &ComplexMatrix<T>,
    f: impl Fn(T) -> T,
) -> Result<ComplexMatrix<T>> {
    Ok(eig_hermitian(h)?.reconstruct_with(f))
}

/// Square root of a PSD matrix; negative eigenvalues are clamped to zero.
pub fn psd_sqrt<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    hermitian_function(h, |l| l.max(T::zero()).sqrt())
}

/// Nearest PSD matrix in Frobenius norm.
pub fn project_psd<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    hermitian_function(h, |l| l.max(T::zero()))
}

/// `-Σ λ log₂ λ` over a spectrum; eigenvalues below the zero cutoff contribute nothing.
pub fn entropy_of_eigenvalues<T: Real>(eigenvalues: &[T]) -> T {
    let cutoff = T::lit(Tolerances::DEFAULT.eigenvalue_zero);
    eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy<T: Real>(rho: &ComplexMatrix<T>) -> Result<T> {
    let e = eig_hermitian(rho)?;
    let t = Tolerances::DEFAULT;
    if e.min() < -tol::<T>(-t.psd_floor) {
        return Err(Error::NotPositive { min_eigenvalue: e.min().as_f64() });
    }
    let trace: T = e.eigenvalues.iter().copied().sum();
    if (trace - T::one()).abs() > tol::<T>(t.trace) {
        return Err(Error::TraceCondition { deviation: (trace - T::one()).abs().as_f64() });
    }
    Ok(entropy_of_eigenvalues(&e.eigenvalues))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{random_hermitian, random_matrix, rng};
    use crate::C64;
    use proptest::prelude::*;

    type M = ComplexMatrix<f64>;

    fn x() -> M {
        M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }
    fn y() -> M {
        M::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ])
        .unwrap()
    }
    fn z() -> M {
        M::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn random_state(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> M {
        let g = random_matrix(r, n, n);
        let rho = g.matmul(&g.dagger());
        let t = rho.trace().re;
        rho.scale_real(1.0 / t)
    }

    fn random_unitary(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> M {
        let h = random_hermitian(r, n);
        let e = eig_hermitian(&h).unwrap();
        // exp(iH) from the spectral decomposition.
        let u = &e.eigenvectors;
        let d = M::from_complex_diag(
            &e.eigenvalues.iter().map(|&l| C64::new(0.0, l).exp()).collect::<Vec<_>>(),
        );
        u.matmul(&d).matmul(&u.dagger())
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&M::identity(2), &M::identity(2)), M::identity(4));
        assert_eq!(kron(&z(), &z()), M::from_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_x_identity_flips_first_qubit() {
        let ket00 = M::ket(4, 0);
        let out = kron(&x(), &M::identity(2)).matmul(&ket00);
        assert_eq!(out, M::ket(4, 2));
    }

    #[test]
    fn partial_trace_of_unnormalised_bell_projector() {
        let mut g = M::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            g[(i, j)] = C64::new(1.0, 0.0);
        }
        let first = partial_trace(&g, (2, 2), Keep::First).unwrap();
        assert_eq!(first, M::identity(2));
    }

    #[test]
    fn partial_trace_matches_index_loop() {
        let mut r = rng(11);
        for (d1, d2) in [(2, 2), (2, 3), (3, 2)] {
            let m = random_hermitian(&mut r, d1 * d2);
            // Independent oracle: explicit four-index summation.
            let mut keep1 = M::zeros(d1, d1);
            let mut keep2 = M::zeros(d2, d2);
            for a in 0..d1 {
                for b in 0..d2 {
                    for a2 in 0..d1 {
                        for b2 in 0..d2 {
                            let v = m.get(a * d2 + b, a2 * d2 + b2);
                            if b == b2 {
                                keep1[(a, a2)] += v;
                            }
                            if a == a2 {
                                keep2[(b, b2)] += v;
                            }
                        }
                    }
                }
            }
            let p1 = partial_trace(&m, (d1, d2), Keep::First).unwrap();
            let p2 = partial_trace(&m, (d1, d2), Keep::Second).unwrap();
            assert!(p1.max_abs_diff(&keep1) < 1e-12);
            assert!(p2.max_abs_diff(&keep2) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        assert!(partial_trace(&M::identity(4), (2, 3), Keep::First).is_err());
        assert!(partial_trace(&M::zeros(4, 2), (2, 2), Keep::First).is_err());
    }

    #[test]
    fn trace_norm_basic() {
        assert!((trace_norm(&z()) - 2.0).abs() < 1e-14);
        assert_eq!(trace_norm(&M::zeros(3, 3)), 0.0);
    }

    #[test]
    fn trace_norm_matches_svd_oracle() {
        let mut r = rng(5);
        for _ in 0..20 {
            let m = random_matrix(&mut r, 3, 3);
            let na = nalgebra::DMatrix::from_fn(3, 3, |i, j| {
                let z = m.get(i, j);
                nalgebra::Complex::new(z.re, z.im)
            });
            let oracle: f64 = na.singular_values().iter().sum();
            assert!((trace_norm(&m) - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn operator_norm_basic() {
        assert!((operator_norm(&M::identity(5)) - 1.0).abs() < 1e-14);
        assert!((operator_norm(&M::from_diag(&[3.0, -5.0])) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn max_norm_basic() {
        assert_eq!(max_norm(&M::identity(2)), 1.0);
        let xy = &x() + &y().scale(C64::new(0.0, 1.0));
        assert!((max_norm(&xy) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_bounded_by_max_norm_times_dimension() {
        let mut r = rng(21);
        for n in 2..=8 {
            let h = random_hermitian(&mut r, n);
            assert!(operator_norm(&h) <= n as f64 * max_norm(&h) + 1e-12);
        }
    }

    #[test]
    fn entropy_fixed_points() {
        let pure = M::from_diag(&[1.0, 0.0]);
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
        let mixed = M::identity(2).scale_real(0.5);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);
        let p: f64 = 0.1;
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        let s = von_neumann_entropy(&M::from_diag(&[p, 1.0 - p])).unwrap();
        assert!((s - h).abs() < 1e-14);
        assert!((s - 0.468_995_593_589_281).abs() < 1e-12);
    }

    #[test]
    fn entropy_precondition_errors() {
        assert!(matches!(
            von_neumann_entropy(&M::from_diag(&[1.5, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            von_neumann_entropy(&M::from_diag(&[0.5, 0.4])),
            Err(Error::TraceCondition { .. })
        ));
        assert!(matches!(
            von_neumann_entropy(&M::from_real(2, 2, &[0.5, 0.5, 0.0, 0.5]).unwrap()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn entropy_unitarily_invariant() {
        let mut r = rng(9);
        for n in [2, 3, 4] {
            let rho = random_state(&mut r, n);
            let u = random_unitary(&mut r, n);
            let s1 = von_neumann_entropy(&rho).unwrap();
            let s2 = von_neumann_entropy(&u.sandwich(&rho).hermitian_part()).unwrap();
            assert!((s1 - s2).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_ordering_on_random_matrices() {
        let mut r = rng(1);
        for k in 0..100 {
            let n = 2 + k % 5;
            let m = random_matrix(&mut r, n, n);
            let t = trace_norm(&m);
            let o = operator_norm(&m);
            let mx = max_norm(&m);
            assert!(t + 1e-12 >= o && o + 1e-12 >= mx);
            assert!(o * o <= t * o + 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut r = rng(2);
        for _ in 0..10 {
            let rho = random_state(&mut r, 2);
            let sigma = random_hermitian(&mut r, 3);
            let pt = partial_trace(&kron(&rho, &sigma), (2, 3), Keep::First).unwrap();
            assert!(pt.max_abs_diff(&rho.scale(sigma.trace())) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn kron_trace_is_multiplicative(seed in 0u64..1000, n in 1usize..4, m in 1usize..4) {
            let mut r = rng(seed);
            let a = random_matrix(&mut r, n, n);
            let b = random_matrix(&mut r, m, m);
            let lhs = kron(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn psd_projection_is_psd(seed in 0u64..1000, n in 1usize..6) {
            let mut r = rng(seed);
            let h = random_hermitian(&mut r, n);
            let p = project_psd(&h).unwrap();
            prop_assert!(eig_hermitian(&p).unwrap().min() > -1e-12);
        }
    }

    #[test]
    fn generic_over_f32() {
        let a = z().cast::<f32>();
        let k = kron(&a, &a);
        assert_eq!(k.get(1, 1).re, -1.0f32);
        let s = von_neumann_entropy(&ComplexMatrix::<f32>::identity(2).scale_real(0.5)).unwrap();
        assert!((s - 1.0).abs() < 1e-6);
    }
}
