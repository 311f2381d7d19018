use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{kron, trace_norm};
use crate::random::{random_channel, random_density, random_pauli_probabilities};
use crate::C64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn choi_distance(a: &Channel<f64>, b: &Channel<f64>) -> f64 {
    a.choi().matrix().max_abs_diff(b.choi().matrix())
}

#[test]
fn identity_choi_is_gamma() {
    let j = Channel::<f64>::identity(2).choi();
    let gamma = ComplexMatrix::from_real(4, 4, &[
        1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1.,
    ])
    .unwrap();
    assert_eq!(j.matrix(), &gamma);
}

#[test]
fn choi_matches_definition() {
    let n = random_channel(&mut rng(1), 2, 3, 2);
    let mut expected = ComplexMatrix::zeros(6, 6);
    for i in 0..2 {
        for j in 0..2 {
            let eij = ComplexMatrix::unit(2, i, j);
            expected += &kron(&eij, &n.apply(&eij).unwrap());
        }
    }
    assert!(n.choi().matrix().max_abs_diff(&expected) < 1e-14);
}

#[test]
fn choi_apply_agrees_with_kraus_apply() {
    let mut r = rng(2);
    let n = random_channel(&mut r, 3, 2, 4);
    let rho = random_density(&mut r, 3);
    let via_kraus = n.apply(&rho).unwrap();
    let via_choi = n.choi().apply(&rho).unwrap();
    assert!(via_kraus.max_abs_diff(&via_choi) < 1e-13);
}

#[test]
fn choi_round_trip() {
    let mut r = rng(3);
    for (a, b, k) in [(2, 2, 1), (2, 2, 4), (2, 3, 2), (3, 2, 5), (4, 4, 3)] {
        let n = random_channel(&mut r, a, b, k);
        let back = Channel::from_choi(&n.choi()).unwrap();
        assert!(back.num_kraus() <= k);
        assert!(choi_distance(&n, &back) < 1e-10, "{a}->{b} with {k} Kraus");
    }
}

#[test]
fn from_choi_fixes_phases() {
    let n = depolarizing(0.2f64).unwrap();
    let back = Channel::from_choi(&n.choi()).unwrap();
    for k in back.kraus() {
        let first = k.data().iter().find(|z| z.norm() > 1e-12).unwrap();
        assert!(first.im.abs() < 1e-12 && first.re > 0.0);
    }
}

#[test]
fn choi_validation() {
    let j = depolarizing(0.1).unwrap().choi().into_matrix();
    assert!(ChoiMatrix::new(j.clone(), 2, 2).is_ok());
    assert!(matches!(ChoiMatrix::new(j.scale_real(1.1), 2, 2), Err(Error::TraceCondition { .. })));
    assert!(matches!(ChoiMatrix::new(j.clone(), 4, 1), Err(Error::TraceCondition { .. })));
    assert!(matches!(ChoiMatrix::new(j.clone(), 2, 3), Err(Error::DimensionMismatch(_))));
    let not_psd = &j - &ComplexMatrix::identity(4).scale_real(0.5);
    assert!(matches!(ChoiMatrix::new_cp(not_psd, 2, 2), Err(Error::NotPositive { .. })));
}

#[test]
fn kraus_validation() {
    let bad = vec![ComplexMatrix::<f64>::identity(2).scale_real(0.9)];
    assert!(matches!(Channel::new(bad), Err(Error::TraceCondition { .. })));
    let mixed = vec![ComplexMatrix::<f64>::identity(2), ComplexMatrix::zeros(3, 2)];
    assert!(matches!(Channel::new(mixed), Err(Error::DimensionMismatch(_))));
    assert!(Channel::<f64>::new(vec![]).is_err());
}

#[test]
fn channel_outputs_are_states() {
    let mut r = rng(4);
    for _ in 0..20 {
        let n = random_channel(&mut r, 2, 3, 3);
        let rho = random_density(&mut r, 2);
        let out = n.apply(&rho).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-12);
        assert!(crate::linalg::eig_hermitian(&out).unwrap().min() > -1e-12);
    }
}

#[test]
fn compose_matches_sequential_application() {
    let mut r = rng(5);
    let n = random_channel(&mut r, 2, 3, 2);
    let m = random_channel(&mut r, 3, 2, 3);
    let mn = m.compose(&n).unwrap();
    assert_eq!(mn.num_kraus(), 6);
    let rho = random_density(&mut r, 2);
    let seq = m.apply(&n.apply(&rho).unwrap()).unwrap();
    assert!(mn.apply(&rho).unwrap().max_abs_diff(&seq) < 1e-13);
    assert!(matches!(n.compose(&n), Err(Error::DimensionMismatch(_))));
}

#[test]
fn link_product_matches_composition() {
    let mut r = rng(6);
    let n = random_channel(&mut r, 2, 3, 2);
    let m = random_channel(&mut r, 3, 4, 2);
    let linked = link_choi(n.choi().matrix(), (2, 3), m.choi().matrix(), (3, 4)).unwrap();
    let direct = m.compose(&n).unwrap().choi().into_matrix();
    assert!(linked.max_abs_diff(&direct) < 1e-13);
}

#[test]
fn stinespring_is_isometry_and_reproduces_channel() {
    let mut r = rng(7);
    let n = random_channel(&mut r, 3, 2, 4);
    let v = n.stinespring();
    assert_eq!((v.dim_in(), v.dim_out(), v.dim_env()), (3, 2, 4));
    assert!(v.isometry_deviation() < 1e-12);
    let rho = random_density(&mut r, 3);
    assert!(v.channel_output(&rho).unwrap().max_abs_diff(&n.apply(&rho).unwrap()) < 1e-13);
    assert!(choi_distance(&v.channel(), &n) < 1e-14);
}

#[test]
fn complementary_of_complementary_is_equivalent() {
    let mut r = rng(8);
    let n = random_channel(&mut r, 2, 2, 3);
    let ncc = n.complementary().complementary();
    assert!(choi_distance(&n, &ncc) < 1e-13);
}

#[test]
fn complementary_matches_partial_trace_over_output() {
    let mut r = rng(9);
    let n = random_channel(&mut r, 2, 3, 2);
    let rho = random_density(&mut r, 2);
    let v = n.stinespring();
    let direct = v.complement_output(&rho).unwrap();
    assert!(n.complementary().apply(&rho).unwrap().max_abs_diff(&direct) < 1e-13);
}

#[test]
fn complementary_depends_on_kraus_order_only_by_a_unitary() {
    let mut r = rng(10);
    let n = random_channel(&mut r, 2, 2, 3);
    let permuted = n.permute_kraus(&[2, 0, 1]).unwrap();
    assert!(choi_distance(&n, &permuted) < 1e-14);
    let rho = random_density(&mut r, 2);
    let a = n.complementary().apply(&rho).unwrap();
    let b = permuted.complementary().apply(&rho).unwrap();
    let spec = |m: &ComplexMatrix<f64>| crate::linalg::eig_hermitian(m).unwrap().eigenvalues;
    for (x, y) in spec(&a).iter().zip(spec(&b)) {
        assert!((x - y).abs() < 1e-13);
    }
    assert!(n.permute_kraus(&[0, 0, 1]).is_err());
}

#[test]
fn choi_rank_counts_independent_kraus() {
    assert_eq!(Channel::<f64>::identity(3).choi_rank(), 1);
    assert_eq!(depolarizing(0.1).unwrap().choi_rank(), 4);
    assert_eq!(depolarizing(0.0).unwrap().choi_rank(), 1);
    assert_eq!(xz_channel(0.1, 0.0).unwrap().choi_rank(), 2);
    let n = random_channel(&mut rng(11), 2, 2, 3);
    assert_eq!(n.choi_rank(), 3);
}

#[test]
fn pauli_channel_acts_on_bloch_vector() {
    let probs = [0.7, 0.1, 0.15, 0.05];
    let n = pauli(probs).unwrap();
    let [_, x, y, z] = pauli_matrices::<f64>();
    let r = [0.3, -0.4, 0.5];
    let rho = (&(&ComplexMatrix::identity(2) + &x.scale_real(r[0])) + &(&y.scale_real(r[1]) + &z.scale_real(r[2])))
        .scale_real(0.5);
    let out = n.apply(&rho).unwrap();
    let shrink = [
        probs[0] + probs[1] - probs[2] - probs[3],
        probs[0] - probs[1] + probs[2] - probs[3],
        probs[0] - probs[1] - probs[2] + probs[3],
    ];
    for (k, s) in [x, y, z].iter().enumerate() {
        let coord = s.matmul(&out).trace().re;
        assert!((coord - shrink[k] * r[k]).abs() < 1e-14);
    }
}

#[test]
fn pauli_validation() {
    assert!(matches!(pauli([0.5, 0.5, 0.1, -0.1]), Err(Error::InvalidDistribution(_))));
    assert!(matches!(pauli([0.5, 0.5, 0.1, 0.0]), Err(Error::InvalidDistribution(_))));
    assert!(matches!(depolarizing(1.5), Err(Error::OutOfRange(_))));
    assert!(matches!(xz_channel(0.1, -0.1), Err(Error::OutOfRange(_))));
}

#[test]
fn noiseless_pauli_is_identity() {
    let n = pauli([1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(choi_distance(&n, &Channel::identity(2)) < 1e-15);
}

#[test]
fn epolarizing_output_matches_closed_form() {
    let mut r = rng(12);
    let probs = [0.91, 0.03, 0.03, 0.03];
    for p in [0.0, 0.09, 0.5] {
        let probs = if p == 0.09 { probs } else { [1.0 - p, p / 3.0, p / 3.0, p / 3.0] };
        let n = pauli(probs).unwrap();
        for _ in 0..5 {
            let rho = random_density(&mut r, 2);
            let a = n.complementary().apply(&rho).unwrap();
            let b = pauli_complement_action(probs, &rho).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
    }
    let e = epolarizing(0.3).unwrap();
    assert_eq!((e.dim_in(), e.dim_out()), (2, 4));
}

#[test]
fn epolarizing_entries_for_z_eigenstate() {
    let p = 0.12f64;
    let rho = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let out = epolarizing(p).unwrap().apply(&rho).unwrap();
    let a = ((1.0 - p) * p / 3.0).sqrt();
    assert!((out[(0, 0)].re - (1.0 - p)).abs() < 1e-15);
    assert!((out[(0, 3)] - C64::new(a, 0.0)).norm() < 1e-15);
    assert!((out[(1, 2)] - C64::new(0.0, -p / 3.0)).norm() < 1e-15);
    assert!(out[(0, 1)].norm() < 1e-15);
}

#[test]
fn generalized_pauli_reduces_to_pauli() {
    let d = 2;
    // order (k, l): I, Z, X, XZ ∝ Y
    let gp = generalized_pauli(d, &[0.7, 0.05, 0.1, 0.15]).unwrap();
    let p = pauli([0.7, 0.1, 0.15, 0.05]).unwrap();
    assert!(choi_distance(&gp, &p) < 1e-14);
}

#[test]
fn generalized_pauli_is_unital_and_valid() {
    let d = 3;
    let mut probs = vec![0.02; 9];
    probs[0] = 1.0 - 0.16;
    let n = generalized_pauli(d, &probs).unwrap();
    assert!(n.completeness_deviation() < 1e-14);
    let out = n.apply(&ComplexMatrix::identity(3)).unwrap();
    assert!(out.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    assert!(generalized_pauli(1, &[1.0]).is_err());
    assert!(generalized_pauli(3, &[1.0]).is_err());
}

#[test]
fn weyl_operators_are_orthogonal() {
    let d = 3;
    let n = generalized_pauli(d, &[1.0 / 9.0; 9]).unwrap();
    for (a, ka) in n.kraus().iter().enumerate() {
        for (b, kb) in n.kraus().iter().enumerate() {
            let ip = ka.inner(kb);
            let expected = if a == b { 3.0 / 9.0 } else { 0.0 };
            assert!((ip - C64::new(expected, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn hp_difference_is_trace_annihilating() {
    let mut r = rng(13);
    let a = random_channel(&mut r, 2, 2, 2);
    let b = random_channel(&mut r, 2, 2, 3);
    let d = HermitianPreservingMap::difference(&a, &b).unwrap();
    assert!(d.is_trace_annihilating());
    assert!(!HermitianPreservingMap::from_channel(&a).is_trace_annihilating());
    let rho = random_density(&mut r, 2);
    let expected = &a.apply(&rho).unwrap() - &b.apply(&rho).unwrap();
    assert!(d.apply(&rho).unwrap().max_abs_diff(&expected) < 1e-13);
    let c = random_channel(&mut r, 2, 3, 1);
    assert!(matches!(HermitianPreservingMap::difference(&a, &c), Err(Error::DimensionMismatch(_))));
}

#[test]
fn hp_map_rejects_non_hermitian() {
    let m = ComplexMatrix::from_fn(4, 4, |i, j| C64::new(0.0, (i + 2 * j) as f64));
    assert!(matches!(HermitianPreservingMap::new(m, 2, 2), Err(Error::NotHermitian { .. })));
}

#[test]
fn pauli_family_presets() {
    let dep = PauliFamily::<f64>::depolarizing();
    assert_eq!(dep.linear_coefficients(), [1.0 / 3.0; 3]);
    let xz = PauliFamily::<f64>::xz();
    assert_eq!(xz.linear_coefficients(), [1.0, 0.0, 1.0]);
    let p = 0.1;
    let expected = xz_channel(p, p).unwrap();
    assert!(choi_distance(&xz.channel(p).unwrap(), &expected) < 1e-15);
    assert!(choi_distance(&dep.channel(p).unwrap(), &depolarizing(p).unwrap()) < 1e-15);
}

#[test]
fn pauli_family_validation() {
    assert!(matches!(
        PauliFamily::new([vec![0.1, 1.0], vec![0.0], vec![0.0]], 0.5),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        PauliFamily::new([vec![0.0, -1.0], vec![0.0], vec![0.0]], 0.5),
        Err(Error::InvalidDistribution(_))
    ));
    let f = PauliFamily::new([vec![0.0, 2.0], vec![0.0, 2.0], vec![]], 0.25).unwrap();
    assert!(f.probabilities(0.2).is_ok());
    assert!(f.probabilities(0.3).is_err());
}

#[test]
fn single_precision_channels() {
    let n = depolarizing(0.1f32).unwrap();
    let back = Channel::from_choi(&n.choi()).unwrap();
    assert!(n.choi().matrix().max_abs_diff(back.choi().matrix()) < 1e-5);
    let rho = ComplexMatrix::<f32>::identity(2).scale_real(0.5);
    assert!(n.apply(&rho).unwrap().max_abs_diff(&rho) < 1e-6);
}

proptest! {
    #[test]
    fn pauli_channels_are_unital(seed in 0u64..1000) {
        let probs = random_pauli_probabilities(&mut rng(seed), 0.5);
        let n = pauli(probs).unwrap();
        let out = n.apply(&ComplexMatrix::identity(2)).unwrap();
        prop_assert!(out.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        prop_assert!((trace_norm(n.choi().matrix()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complement_preserves_trace(seed in 0u64..1000, k in 1usize..5) {
        let mut r = rng(seed);
        let n = random_channel(&mut r, 2, 2, k);
        let rho = random_density(&mut r, 2);
        let out = n.complementary().apply(&rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
    }
}
