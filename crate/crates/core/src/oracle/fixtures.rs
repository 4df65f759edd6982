//! Tiny systems small enough for the Monte Carlo partition oracle.

use num_complex::Complex64;

use crate::configuration::PointCluster;
use crate::error::Result;
use crate::freeenergy::{log_z_pinned_particles, FreeEnergyReport, KernelMode};
use crate::kernel::BackgroundScale;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionFixture {
    pub name: String,
    pub n_particles: usize,
    pub scale: BackgroundScale,
    pub clusters: Vec<PointCluster>,
}

impl PartitionFixture {
    /// The exact pinned-charge formula with the finite kernel.
    pub fn exact(&self) -> Result<FreeEnergyReport> {
        log_z_pinned_particles(&self.clusters, self.n_particles, self.scale, KernelMode::Finite)
    }

    pub fn pinned(&self) -> usize {
        self.clusters.iter().map(|c| c.count()).sum()
    }
}

fn fixture(n_particles: usize, scale: f64, points: &[(f64, f64)], translation: (f64, f64)) -> PartitionFixture {
    let points: Vec<Complex64> = points.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
    let cluster = PointCluster::new(points, Complex64::new(translation.0, translation.1))
        .expect("fixture points are distinct and finite");
    let scale = BackgroundScale::new(scale).expect("fixture scale is positive");
    PartitionFixture {
        name: format!("n{}-m{}-N{}", n_particles, cluster.count(), scale.value()),
        n_particles,
        scale,
        clusters: vec![cluster],
    }
}

/// Ten configurations with `n in {2, 3}` mobile and `M in {1, 2}` pinned charges.
pub fn exact_formula_fixtures() -> Vec<PartitionFixture> {
    let mut fixtures = vec![
        fixture(2, 1.0, &[(0.0, 0.0)], (0.0, 0.0)),
        fixture(2, 1.0, &[(0.3, 0.0)], (0.0, 0.0)),
        fixture(2, 2.0, &[(0.2, -0.4)], (0.0, 0.0)),
        fixture(2, 1.0, &[(0.5, 0.0), (-0.5, 0.0)], (0.0, 0.0)),
        fixture(2, 2.0, &[(0.1, 0.1), (-0.3, 0.2)], (0.05, 0.0)),
        fixture(3, 1.0, &[(0.3, 0.0)], (0.0, 0.0)),
        fixture(3, 3.0, &[(-0.2, 0.1)], (0.0, 0.0)),
        fixture(3, 1.0, &[(0.4, 0.0), (-0.4, 0.0)], (0.0, 0.0)),
        fixture(3, 3.0, &[(0.2, 0.3), (-0.1, -0.3)], (0.0, 0.0)),
        fixture(2, 4.0, &[(0.3, 0.0), (0.0, 0.3)], (0.0, -0.1)),
    ];
    for (i, f) in fixtures.iter_mut().enumerate() {
        f.name = format!("fixture-{}-{}", i + 1, f.name);
    }
    fixtures
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_ranges() {
        let fixtures = exact_formula_fixtures();
        assert_eq!(fixtures.len(), 10);
        for f in &fixtures {
            assert!(matches!(f.n_particles, 2 | 3));
            assert!(matches!(f.pinned(), 1 | 2));
            assert!(f.exact().unwrap().log_z.log_mag().is_finite());
        }
    }
}
