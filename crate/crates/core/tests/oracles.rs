//! Frozen values from closed forms that do not go through the kernel code.
//!
//! Partition functions below use Gaussian moments `int |z|^{2k} e^{-N|z|^2} d^2z = pi k! / N^{k+1}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use ocp2d_core::configuration::PointCluster;
use ocp2d_core::freeenergy::{ginibre_log_z_exact, log_z_pinned_particles, KernelMode};
use ocp2d_core::kernel::BackgroundScale;
use ocp2d_core::numerics::{hermitian_logdet, zeta_prime_minus_one, ComplexMatrix};
use ocp2d_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scale(n: f64) -> BackgroundScale {
    BackgroundScale::new(n).unwrap()
}

fn pinned_log_z(n_particles: usize, n: f64, points: &[Complex64]) -> f64 {
    let cluster = PointCluster::at_rest(points.to_vec()).unwrap();
    let report = log_z_pinned_particles(&[cluster], n_particles, scale(n), KernelMode::Finite).unwrap();
    report.log_z.log_mag()
}

#[test]
fn ginibre_small_j() {
    // Z_J = pi^J prod_{k=1..J} k! / N^{J(J+1)/2}.
    let cases = [
        (1, 1.0, PI.ln()),
        (2, 1.0, (2.0 * PI * PI).ln()),
        (2, 3.0, (2.0 * PI * PI / 27.0).ln()),
        (3, 1.0, (12.0 * PI.powi(3)).ln()),
    ];
    for (j, n, expected) in cases {
        let got = ginibre_log_z_exact(j, scale(n)).unwrap();
        assert!((got - expected).abs() < 1e-13, "J={j} N={n}: {got} vs {expected}");
    }
}

#[test]
fn one_mobile_one_pinned() {
    for (n, w) in [
        (1.0, c(0.0, 0.0)),
        (1.0, c(0.3, -0.2)),
        (2.5, c(-0.7, 0.1)),
        (7.0, c(0.05, 0.4)),
    ] {
        let expected = (PI / n * (1.0 / n + w.norm_sqr())).ln();
        let got = pinned_log_z(1, n, &[w]);
        assert!((got - expected).abs() < 1e-12, "N={n} w={w}: {got} vs {expected}");
    }
}

#[test]
fn one_mobile_two_pinned() {
    // |(z-a)(z-b)|^2 = |z^2 - (a+b) z + ab|^2 and distinct powers are orthogonal.
    for (n, a, b) in [
        (1.0, c(0.5, 0.0), c(-0.5, 0.0)),
        (3.0, c(0.1, 0.2), c(-0.3, 0.4)),
        (6.0, c(0.2, 0.0), c(0.0, 0.2)),
    ] {
        let expected = (PI / n * (2.0 / (n * n) + (a + b).norm_sqr() / n + (a * b).norm_sqr())).ln();
        let got = pinned_log_z(1, n, &[a, b]);
        assert!((got - expected).abs() < 1e-12, "N={n}: {got} vs {expected}");
    }
}

#[test]
fn two_mobile_pinned_at_origin() {
    // |z1 z2 (z1 - z2)|^2 averages to 2 * (2/N^2) * (1/N).
    for n in [1.0, 2.0, 5.0] {
        let expected = ((PI / n).powi(2) * 4.0 / n.powi(3)).ln();
        let got = pinned_log_z(2, n, &[c(0.0, 0.0)]);
        assert!((got - expected).abs() < 1e-12, "N={n}: {got} vs {expected}");
    }
}

#[test]
fn zeta_prime_reference() {
    assert!((zeta_prime_minus_one() - (-0.165_421_143_700_450_9)).abs() < 1e-14);
}

fn random_gram(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, DMatrix<Complex64>) {
    let rows = dim + 3;
    let a = DMatrix::from_fn(rows, dim, |_, _| {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let gram = a.adjoint() * &a;
    let ours = ComplexMatrix::from_fn(dim, |i, j| gram[(i, j)]);
    (ours, gram)
}

#[test]
fn logdet_matches_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in [1, 2, 5, 12, 30] {
        let (ours, gram) = random_gram(&mut rng, dim);
        let expected: f64 = gram.symmetric_eigenvalues().iter().map(|l| l.ln()).sum();
        let got = hermitian_logdet(&ours).unwrap();
        assert!(got.sign().as_f64() > 0.0);
        assert!(
            (got.log_mag() - expected).abs() < 1e-10 * (1.0 + expected.abs()),
            "dim {dim}"
        );
    }
}

#[test]
fn logdet_of_indefinite_matrix_matches_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for dim in [3, 8] {
        let (_, gram) = random_gram(&mut rng, dim);
        let shifted = gram - DMatrix::identity(dim, dim) * c(0.05 + rng.random::<f64>() * 0.1, 0.0);
        let eig = shifted.clone().symmetric_eigenvalues();
        let expected_log: f64 = eig.iter().map(|l| l.abs().ln()).sum();
        let expected_sign: f64 = eig.iter().map(|l| l.signum()).product();
        let ours = ComplexMatrix::from_fn(dim, |i, j| shifted[(i, j)]);
        let got = hermitian_logdet(&ours).unwrap();
        assert_eq!(got.sign().as_f64(), expected_sign);
        assert!((got.log_mag() - expected_log).abs() < 1e-9 * (1.0 + expected_log.abs()));
    }
}
