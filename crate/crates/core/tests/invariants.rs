use std::f64::consts::PI;

use ocp2d_core::configuration::{generate_lattice_disk, PointCluster};
use ocp2d_core::freeenergy::{brute_force_det_expansion, multihole_prediction, translation_shift, KernelMode};
use ocp2d_core::kernel::{eval_finite, eval_infinite, kernel_matrix, BackgroundScale, GinibreKernel};
use ocp2d_core::meanfield::{emf_energy, mf_identity_check, MeanFieldProblem};
use ocp2d_core::numerics::LogValue;
use ocp2d_core::oracle::mc_coulomb;
use ocp2d_core::oracle::Disk;
use ocp2d_core::Complex64;
use proptest::prelude::*;

fn scale(n: f64) -> BackgroundScale {
    BackgroundScale::new(n).unwrap()
}

fn point(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(x, y)| Complex64::new(x, y))
}

fn signed() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        Just(0.0),
        (-300.0..300.0f64).prop_map(|e| 10f64.powf(e / 10.0))
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn infinite_logdet(n: f64, points: &[Complex64]) -> f64 {
    kernel_matrix(&GinibreKernel::infinite(scale(n)), points)
        .unwrap()
        .log_det()
        .unwrap()
        .log_mag()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn logvalue_arithmetic(a in signed(), b in signed()) {
        let (la, lb) = (LogValue::from_f64(a), LogValue::from_f64(b));
        prop_assert!(close((la * lb).to_f64(), a * b, 1e-13));
        prop_assert!(close((la + lb).to_f64(), a + b, 1e-12) || (a + b).abs() < 1e-12 * a.abs().max(b.abs()));
        prop_assert!((la - la).is_zero());
        prop_assert!(close((-la).to_f64(), -a, 1e-13));
    }

    #[test]
    fn kernels_are_hermitian(n in 1.0..50.0f64, top in 0usize..40, z in point(1.5), w in point(1.5)) {
        let s = scale(n);
        let (kzw, kwz) = (eval_infinite(s, z, w).to_complex(), eval_infinite(s, w, z).to_complex());
        prop_assert!((kzw - kwz.conj()).norm() <= 1e-13 * kzw.norm().max(1e-300));
        let (fzw, fwz) = (eval_finite(s, top, z, w).unwrap().to_complex(), eval_finite(s, top, w, z).unwrap().to_complex());
        prop_assert!((fzw - fwz.conj()).norm() <= 1e-12 * fzw.norm().max(1e-300));
        prop_assert!(eval_finite(s, top, z, z).unwrap().to_complex().re >= 0.0);
    }

    #[test]
    fn infinite_logdet_is_rigid_motion_invariant(
        center in point(0.3), a in point(0.1), angle in 0.0..(2.0 * PI), m in 2usize..12,
    ) {
        let n = 400.0;
        let cluster = generate_lattice_disk(scale(n), m, center).unwrap();
        let base = infinite_logdet(n, &cluster.effective_points());
        let moved = infinite_logdet(n, &cluster.with_translation(a).effective_points());
        let turned = infinite_logdet(n, &cluster.rotated(angle).effective_points());
        prop_assert!((base - moved).abs() <= 1e-8 * base.abs().max(1.0));
        prop_assert!((base - turned).abs() <= 1e-8 * base.abs().max(1.0));
    }

    #[test]
    fn mean_field_identity(c1 in 1e-4..0.2f64, c2 in 1e-4..0.2f64) {
        prop_assert!(mf_identity_check(c1, c2).abs() < 1e-12);
    }

    #[test]
    fn expansion_equals_determinant(
        a in proptest::collection::vec(point(0.6), 1..=3),
        b in proptest::collection::vec(point(0.6), 1..=3),
        n in 5.0..30.0f64,
    ) {
        let all: Vec<Complex64> = a.iter().chain(&b).copied().collect();
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                prop_assume!((p - q).norm() * n.sqrt() > 1.0);
            }
        }
        let (ca, cb) = (PointCluster::at_rest(a).unwrap(), PointCluster::at_rest(b).unwrap());
        let e = brute_force_det_expansion(&ca, &cb, scale(n)).unwrap();
        prop_assert!((e.total - e.direct).abs() <= 1e-12 * e.direct.abs().max(1e-300));
        prop_assert!(e.exchange_part.abs() <= e.hadamard_bound * (1.0 + 1e-12));
    }

    #[test]
    fn single_hole_prediction_vanishes(n in 50.0..2000.0f64, c in 1e-3..0.2f64) {
        prop_assert_eq!(multihole_prediction(n, c, &[c]).unwrap().total, 0.0);
    }

    #[test]
    fn finite_kernel_approaches_infinite(z in point(0.5), w in point(0.5)) {
        let s = scale(20.0);
        let inf = eval_infinite(s, z, w).to_complex();
        let fin = eval_finite(s, 200, z, w).unwrap().to_complex();
        prop_assert!((inf - fin).norm() <= 1e-12 * inf.norm().max(1e-300));
    }
}

#[test]
fn mean_field_energy_is_point_reflection_invariant() {
    let s = scale(100.0);
    let cluster = generate_lattice_disk(s, 3, Complex64::new(0.1, -0.05)).unwrap();
    let mirrored = PointCluster::at_rest(cluster.points().iter().map(|p| -p).collect()).unwrap();
    let energy = |c: &PointCluster| {
        emf_energy(&MeanFieldProblem::neutral(s, vec![c.clone()]).unwrap())
            .unwrap()
            .energy
    };
    let (e, f) = (energy(&cluster), energy(&mirrored));
    assert!((e - f).abs() < 1e-12 * e.abs());
}

#[test]
fn translation_shift_at_rest_is_zero() {
    let s = scale(100.0);
    let cluster = generate_lattice_disk(s, 2, Complex64::new(0.0, 0.0)).unwrap();
    let shift = translation_shift(&cluster, s, Complex64::new(0.0, 0.0), KernelMode::Finite).unwrap();
    assert!(shift.shift.is_zero());
}

#[test]
fn monte_carlo_is_seed_deterministic() {
    let d = Disk::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
    let a = mc_coulomb(&d, &d, 50_000, 3).unwrap();
    let b = mc_coulomb(&d, &d, 50_000, 3).unwrap();
    let other = mc_coulomb(&d, &d, 50_000, 4).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_ne!(a.estimate.to_bits(), other.estimate.to_bits());
}
