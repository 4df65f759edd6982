//! The full set of oracle cross-checks with pass/fail per item.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::configuration::{generate_lattice_disk, PointCluster};
use crate::error::Result;
use crate::freeenergy::{brute_force_det_expansion, ginibre_log_z_exact};
use crate::kernel::{BackgroundScale, GinibreKernel, IndexConvention};
use crate::meanfield::{
    disk_self_energy, emf_energy, emf_gradient, mf_identity_check, pinning_cancellation, MeanFieldProblem,
};

use super::deterministic::{default_trace_cutoff, finite_difference_gradient, kernel_trace};
use super::fixtures::exact_formula_fixtures;
use super::montecarlo::{mc_coulomb, mc_partition, Disk, GENERATOR_NAME};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryOptions {
    pub seed: u64,
    pub samples: usize,
    /// Multiplies every tolerance; zero makes every item fail.
    pub tolerance_scale: f64,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions {
            seed: 20_240_611,
            samples: 1_000_000,
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryItem {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BatteryItem {
    fn new(name: impl Into<String>, value: f64, reference: f64, deviation: f64, tolerance: f64) -> Self {
        BatteryItem {
            name: name.into(),
            value,
            reference,
            deviation,
            tolerance,
            passed: deviation < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub options: BatteryOptions,
    pub generator_name: String,
    pub index_convention: String,
    pub items: Vec<BatteryItem>,
    pub passed: bool,
}

impl BatteryReport {
    pub fn failures(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|i| !i.passed)
            .map(|i| i.name.as_str())
            .collect()
    }
}

fn random_pair(rng: &mut ChaCha20Rng, center: Complex64) -> Vec<Complex64> {
    loop {
        let pts: Vec<Complex64> = (0..2)
            .map(|_| center + Complex64::from_polar(0.2 * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>()))
            .collect();
        if (pts[0] - pts[1]).norm() > 0.05 {
            return pts;
        }
    }
}

/// Random two-point clusters around `-0.2` and `0.2` used by the expansion check.
pub fn random_expansion_pairs(seed: u64, count: usize) -> Vec<(PointCluster, PointCluster)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..count)
        .map(|_| {
            let a = PointCluster::at_rest(random_pair(&mut rng, Complex64::new(-0.2, 0.0))).expect("distinct points");
            let b = PointCluster::at_rest(random_pair(&mut rng, Complex64::new(0.2, 0.0))).expect("distinct points");
            (a, b)
        })
        .collect()
}

pub fn run_battery(options: &BatteryOptions) -> Result<BatteryReport> {
    let k = 3.0 * options.tolerance_scale;
    let tol = |t: f64| t * options.tolerance_scale;
    let mut items = Vec::new();

    let s = BackgroundScale::new(1.0)?;
    let mc = mc_partition(2, &[], s, options.samples, options.seed)?;
    let exact = ginibre_log_z_exact(2, s)?;
    items.push(BatteryItem::new(
        "mc-partition-ginibre-n2",
        mc.estimate,
        exact,
        (mc.estimate - exact).abs(),
        k * mc.stderr,
    ));

    for f in exact_formula_fixtures() {
        let mc = mc_partition(f.n_particles, &f.clusters, f.scale, options.samples, options.seed)?;
        let exact = f.exact()?.log_z.log_mag();
        items.push(BatteryItem::new(
            format!("mc-partition-{}", f.name),
            mc.estimate,
            exact,
            (mc.estimate - exact).abs(),
            k * mc.stderr,
        ));
    }

    for r in [0.5, 1.0, 2.0, 0.25f64.exp()] {
        let d = Disk::new(Complex64::new(0.0, 0.0), r)?;
        let mc = mc_coulomb(&d, &d, options.samples, options.seed)?;
        let exact = disk_self_energy(r);
        items.push(BatteryItem::new(
            format!("mc-coulomb-disk-r{r:.4}"),
            mc.estimate,
            exact,
            (mc.estimate - exact).abs(),
            k * mc.stderr,
        ));
    }

    for n in [1.0, 10.0] {
        let s = BackgroundScale::new(n)?;
        for top in 0..=10usize {
            let kernel = GinibreKernel::finite(s, top);
            let trace = kernel_trace(&kernel, default_trace_cutoff(&kernel)?, 16)?;
            let expected = (top + 1) as f64;
            items.push(BatteryItem::new(
                format!("kernel-trace-N{n}-top{top}"),
                trace,
                expected,
                (trace - expected).abs(),
                tol(1e-6),
            ));
        }
    }

    let s = BackgroundScale::new(100.0)?;
    let cluster = generate_lattice_disk(s, 2, Complex64::new(0.1, 0.05))?;
    let energy_at = |a: Complex64| -> Result<f64> {
        Ok(emf_energy(&MeanFieldProblem::neutral(s, vec![cluster.with_translation(a)])?)?.energy)
    };
    let fd = finite_difference_gradient(energy_at, Complex64::new(0.0, 0.0), 1e-5)?;
    let analytic = emf_gradient(&MeanFieldProblem::neutral(s, vec![cluster])?, 0)?;
    items.push(BatteryItem::new(
        "emf-gradient-finite-difference",
        fd.norm(),
        analytic.norm(),
        (fd - analytic).norm() / analytic.norm(),
        tol(1e-6),
    ));

    let mut rng = ChaCha20Rng::seed_from_u64(options.seed);
    rng.set_stream(2);
    let worst_identity = (0..100)
        .map(|_| mf_identity_check(0.2 * rng.random::<f64>(), 0.2 * rng.random::<f64>()).abs())
        .fold(0.0, f64::max);
    items.push(BatteryItem::new(
        "mf-identity",
        worst_identity,
        0.0,
        worst_identity,
        tol(1e-12),
    ));

    let mut worst_cancellation: f64 = 0.0;
    for _ in 0..10 {
        let n = [50.0, 100.0, 200.0][rng.random_range(0..3)];
        let s = BackgroundScale::new(n)?;
        let m = rng.random_range(1..=8);
        let center = Complex64::from_polar(0.5 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let cluster = generate_lattice_disk(s, m, center)?;
        worst_cancellation = worst_cancellation.max(pinning_cancellation(s, &cluster)?.abs() / (n * n));
    }
    items.push(BatteryItem::new(
        "pinning-cancellation",
        worst_cancellation,
        0.0,
        worst_cancellation,
        tol(1e-9),
    ));

    let s = BackgroundScale::new(20.0)?;
    let mut worst_expansion: f64 = 0.0;
    for (a, b) in random_expansion_pairs(options.seed, 20) {
        let e = brute_force_det_expansion(&a, &b, s)?;
        worst_expansion = worst_expansion.max((e.total - e.direct).abs() / e.direct.abs());
    }
    items.push(BatteryItem::new(
        "det-expansion",
        worst_expansion,
        0.0,
        worst_expansion,
        tol(1e-12),
    ));

    let passed = items.iter().all(|i| i.passed);
    Ok(BatteryReport {
        options: *options,
        generator_name: GENERATOR_NAME.to_string(),
        index_convention: IndexConvention::RESOLVED.describe().to_string(),
        items,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tolerance_fails_every_item() {
        let options = BatteryOptions {
            samples: 20_000,
            tolerance_scale: 0.0,
            ..BatteryOptions::default()
        };
        let report = run_battery(&options).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failures().len(), report.items.len());
    }
}
