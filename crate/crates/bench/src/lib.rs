//! Fixtures shared by the benchmarks.

use ocp2d_core::configuration::{generate_lattice_disk, PointCluster};
use ocp2d_core::kernel::{kernel_matrix, BackgroundScale, GinibreKernel};
use ocp2d_core::numerics::ComplexMatrix;
use ocp2d_core::Complex64;

pub fn scale(n: f64) -> BackgroundScale {
    BackgroundScale::new(n).expect("positive scale")
}

/// Lattice cluster of `m` points centred at `center`.
pub fn lattice(n: f64, m: usize, center: Complex64) -> PointCluster {
    generate_lattice_disk(scale(n), m, center).expect("lattice fits")
}

/// Positive-definite infinite-kernel Gram matrix of dimension `m`.
pub fn gram_matrix(n: f64, m: usize) -> ComplexMatrix {
    let points = lattice(n, m, Complex64::new(0.0, 0.0)).effective_points();
    kernel_matrix(&GinibreKernel::infinite(scale(n)), &points)
        .expect("distinct points")
        .to_complex()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ocp2d_core::numerics::hermitian_logdet;

    #[test]
    fn gram_matrix_is_positive_definite() {
        let det = hermitian_logdet(&gram_matrix(400.0, 16)).unwrap();
        assert!(det.log_mag().is_finite());
    }
}
