use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::channel::{depolarizing, epolarizing, pauli, pauli_matrices, xz_channel};
use crate::linalg::psd_sqrt;
use crate::random::{random_channel, random_cp_choi, random_pauli_probabilities};
use crate::{Error, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn identity() -> Channel {
    Channel::identity(2)
}

/// `max_ρ ‖(√ρ ⊗ I) J (√ρ ⊗ I)‖₁` over the Bloch ball: a coarse spherical grid
/// followed by repeated zooming around the incumbent.
fn grid_oracle(j: &Matrix, dim_out: usize) -> f64 {
    let [_, x, y, z] = pauli_matrices::<f64>();
    let value = |r: f64, theta: f64, phi: f64| {
        let r = r.clamp(0.0, 1.0);
        let v = [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()];
        let rho = (&(&Matrix::identity(2) + &x.scale_real(v[0])) + &(&y.scale_real(v[1]) + &z.scale_real(v[2])))
            .scale_real(0.5);
        let s = kron(&psd_sqrt(&rho).unwrap(), &Matrix::identity(dim_out));
        trace_norm(&s.matmul(j).matmul(&s))
    };
    let pi = std::f64::consts::PI;
    let mut best = (0.0, 0.0, 0.0, -1.0);
    let (nr, nt, np) = (8, 16, 32);
    for ir in 0..=nr {
        for it in 0..=nt {
            for ip in 0..np {
                let (r, t, p) = (ir as f64 / nr as f64, pi * it as f64 / nt as f64, 2.0 * pi * ip as f64 / np as f64);
                let v = value(r, t, p);
                if v > best.3 {
                    best = (r, t, p, v);
                }
            }
        }
    }
    let (mut hr, mut ht, mut hp) = (1.0 / nr as f64, pi / nt as f64, 2.0 * pi / np as f64);
    for _ in 0..25 {
        let (r0, t0, p0, _) = best;
        for dr in -4..=4 {
            for dt in -4..=4 {
                for dp in -4..=4 {
                    let (r, t, p) = (r0 + hr * dr as f64 / 4.0, t0 + ht * dt as f64 / 4.0, p0 + hp * dp as f64 / 4.0);
                    let v = value(r, t, p);
                    if v > best.3 {
                        best = (r.clamp(0.0, 1.0), t, p, v);
                    }
                }
            }
        }
        hr *= 0.5;
        ht *= 0.5;
        hp *= 0.5;
    }
    best.3
}

#[test]
fn same_channel_has_zero_distance() {
    let n = random_channel(&mut rng(1), 2, 2, 3);
    let d = diamond_norm_diff(&n, &n).unwrap();
    assert!(d.value < 1e-7);
    assert_eq!(d.method, DiamondMethod::Sdp);
}

#[test]
fn depolarizing_distance_from_identity() {
    for p in [0.01, 0.05, 0.1] {
        let d = diamond_norm_diff(&identity(), &depolarizing(p).unwrap()).unwrap();
        assert!((d.value - 2.0 * p).abs() < 1e-6, "p = {p}: {}", d.value);
    }
}

#[test]
fn pauli_distance_from_identity() {
    let mut r = rng(2);
    for _ in 0..5 {
        let probs = random_pauli_probabilities(&mut r, 0.3);
        let d = diamond_norm_diff(&identity(), &pauli(probs).unwrap()).unwrap();
        assert!((d.value - 2.0 * (1.0 - probs[0])).abs() < 1e-6);
    }
}

#[test]
fn sdp_matches_grid_oracle() {
    let mut r = rng(3);
    for _ in 0..2 {
        let n1 = random_channel(&mut r, 2, 2, 2);
        let n2 = random_channel(&mut r, 2, 2, 3);
        let phi = HermitianPreservingMap::difference(&n1, &n2).unwrap();
        let sdp = diamond_norm_diff(&n1, &n2).unwrap().value;
        let grid = grid_oracle(phi.choi(), 2);
        assert!((sdp - grid).abs() < 1e-4, "sdp {sdp} grid {grid}");
    }
}

#[test]
fn general_program_matches_grid_oracle_on_non_trace_annihilating_map() {
    let mut r = rng(4);
    let n1 = random_channel(&mut r, 2, 2, 2);
    let n2 = random_channel(&mut r, 2, 2, 2);
    let j = &n1.choi().into_matrix() - &n2.choi().into_matrix().scale_real(0.5);
    let phi = HermitianPreservingMap::new(j.clone(), 2, 2).unwrap();
    assert!(!phi.is_trace_annihilating());
    let sdp = diamond_norm_hp(&phi).unwrap().value;
    assert!((sdp - grid_oracle(&j, 2)).abs() < 1e-4);
}

#[test]
fn cp_map_norm_is_partial_trace_norm() {
    let j = random_cp_choi(&mut rng(5), 2, 3, 2);
    let phi = HermitianPreservingMap::new(j.clone(), 2, 3).unwrap();
    let exact = operator_norm(&partial_trace(&j, (2, 3), Keep::First).unwrap());
    assert!((diamond_norm_hp(&phi).unwrap().value - exact).abs() < 1e-6 * (1.0 + exact));
}

#[test]
fn zero_map_and_homogeneity() {
    let zero = HermitianPreservingMap::new(Matrix::zeros(4, 4), 2, 2).unwrap();
    assert!(diamond_norm_hp(&zero).unwrap().value < 1e-7);
    assert_eq!(covariant_diamond(&zero), 0.0);
    let mut r = rng(6);
    let phi = HermitianPreservingMap::difference(&random_channel(&mut r, 2, 2, 2), &random_channel(&mut r, 2, 2, 2)).unwrap();
    let a = diamond_norm_hp(&phi).unwrap().value;
    let b = diamond_norm_hp(&phi.scale(-2.0)).unwrap().value;
    assert!((b - 2.0 * a).abs() < 1e-6);
}

fn depolarizing_residual(p: f64) -> HermitianPreservingMap {
    let s = p + 8.0 / 3.0 * p * p;
    let degraded = epolarizing(s).unwrap().compose(&depolarizing(p).unwrap()).unwrap();
    HermitianPreservingMap::difference(&epolarizing(p).unwrap(), &degraded).unwrap()
}

fn xz_residual(p: f64) -> HermitianPreservingMap {
    let s = p + 4.0 * p * p;
    let n = xz_channel(p, p).unwrap();
    let degraded = xz_channel(s, s).unwrap().complementary().compose(&n).unwrap();
    HermitianPreservingMap::difference(&n.complementary(), &degraded).unwrap()
}

#[test]
fn covariant_closed_form_matches_sdp() {
    for phi in [depolarizing_residual(0.05), xz_residual(0.05)] {
        let sdp = diamond_norm_hp(&phi).unwrap().value;
        assert!((covariant_diamond(&phi) - sdp).abs() < 1e-6, "{sdp}");
    }
}

#[test]
fn max_norm_bound_values() {
    let id = identity().choi().into_matrix();
    assert_eq!(max_norm_bound(&id, 2, 2).unwrap(), 8.0);
    let mut r = rng(7);
    for _ in 0..10 {
        let j = random_cp_choi(&mut r, 2, 2, 3);
        let phi = HermitianPreservingMap::new(j.clone(), 2, 2).unwrap();
        assert!(max_norm_bound(&j, 2, 2).unwrap() >= diamond_norm_hp(&phi).unwrap().value);
    }
    let not_psd = Matrix::from_diag(&[1.0, -1.0, 0.0, 0.0]);
    assert!(matches!(max_norm_bound(&not_psd, 2, 2), Err(Error::NotPositive { .. })));
}

#[test]
fn max_norm_bound_tracks_small_choi_entries() {
    let p = 1e-3;
    let j = Matrix::from_fn(4, 4, |i, k| C64::new(if i == k { p * p } else { 0.0 }, 0.0));
    assert!((max_norm_bound(&j, 2, 2).unwrap() - 8.0 * p * p).abs() < 1e-18);
}

#[test]
fn triangle_inequality_and_diameter() {
    let mut r = rng(8);
    let chans: Vec<Channel> = (0..3).map(|k| random_channel(&mut r, 2, 2, k + 1)).collect();
    let d = |a: usize, b: usize| diamond_norm_diff(&chans[a], &chans[b]).unwrap().value;
    let (ab, bc, ac) = (d(0, 1), d(1, 2), d(0, 2));
    assert!(ac <= ab + bc + 1e-6);
    assert!([ab, bc, ac].iter().all(|&v| v <= 2.0 + 1e-6));
}

#[test]
fn dimension_mismatch_propagates() {
    let n = random_channel(&mut rng(9), 2, 3, 2);
    assert!(matches!(diamond_norm_diff(&identity(), &n), Err(Error::DimensionMismatch(_))));
}

#[test]
fn stinespring_bounds_vanish_for_equal_channels() {
    let n = random_channel(&mut rng(10), 2, 2, 3);
    let (lo, hi) = stinespring_distance_bounds(&n, &n).unwrap();
    assert!(lo < 1e-12 && hi < 1e-6);
}

#[test]
fn stinespring_upper_bound_dominates_diamond() {
    let p = 0.05;
    let dp = depolarizing(p).unwrap();
    let (_, hi) = stinespring_distance_bounds(&identity(), &dp).unwrap();
    assert!(hi >= 2.0 * p);
    let d = (2.0 - 2.0 * (1.0 - p).sqrt()).sqrt();
    assert!((hi - 2.0 * d).abs() < 1e-6, "{hi}");
    let mut r = rng(11);
    let (n1, n2) = (random_channel(&mut r, 2, 2, 2), random_channel(&mut r, 2, 2, 3));
    let (_, hi) = stinespring_distance_bounds(&n1, &n2).unwrap();
    assert!(hi + 1e-9 >= diamond_norm_diff(&n1, &n2).unwrap().value);
}
