//! Seeded Monte Carlo estimators of partition integrals and Coulomb energies.
//!
//! Samples come in fixed-size batches. Batch `b` draws from ChaCha20 seeded with the run
//! seed on stream `b`, batches run in parallel, and their statistics are merged in batch
//! order, so an estimate depends only on the seed and the sample count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{concatenated_points, PointCluster};
use crate::error::{Error, Result};
use crate::kernel::BackgroundScale;

pub const GENERATOR_NAME: &str = "ChaCha20";
pub const BATCH_SIZE: usize = 1 << 16;
pub const MIN_SAMPLES: usize = 10_000;
/// Largest number of mobile particles accepted by [`mc_partition`].
pub const MAX_MC_PARTICLES: usize = 4;
/// `stderr / mean` above which the log transform is reported as biased.
pub const BIAS_WARNING_RATIO: f64 = 0.1;
/// `stderr / mean` above which the estimate is rejected.
pub const VARIANCE_EXPLOSION_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub generator_name: &'static str,
    pub bias_warning: bool,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

/// Welford accumulator, merged with the Chan update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / total as f64;
        self.mean += delta * weight;
        self.m2 += other.m2 + delta * delta * self.count as f64 * weight;
        self.count = total;
    }

    fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

fn run_batches<F>(samples: usize, seed: u64, sample: F) -> Result<RunningStats>
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    let batches = samples.div_ceil(BATCH_SIZE);
    let partial: Vec<RunningStats> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            let mut stats = RunningStats::default();
            for _ in 0..len {
                stats.push(sample(&mut rng));
            }
            stats
        })
        .collect();
    let mut total = RunningStats::default();
    for p in &partial {
        total.merge(p);
    }
    if !total.mean.is_finite() || !total.m2.is_finite() {
        return Err(Error::NonFinite("Monte Carlo average"));
    }
    Ok(total)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::domain(
            "Monte Carlo",
            format!("need at least {MIN_SAMPLES} samples, got {samples}"),
        ));
    }
    Ok(())
}

/// Estimates `ln Z` for `n_particles` mobile charges at scale `N` around pinned clusters.
///
/// Positions are drawn from the density `(N/pi) exp(-N |z|^2)` and the squared
/// Vandermonde-type products are averaged; `ln Z = n ln(pi/N) + ln(mean)` with a
/// delta-method standard error.
pub fn mc_partition(
    n_particles: usize,
    clusters: &[PointCluster],
    scale: BackgroundScale,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_particles == 0 || n_particles > MAX_MC_PARTICLES {
        return Err(Error::domain(
            "mc_partition",
            format!("between 1 and {MAX_MC_PARTICLES} mobile particles supported, got {n_particles}"),
        ));
    }
    check_samples(samples)?;
    let pinned = concatenated_points(clusters);
    let sigma = (0.5 / scale.value()).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::domain("mc_partition", e.to_string()))?;
    let stats = run_batches(samples, seed, |rng| {
        let mut z = [Complex64::new(0.0, 0.0); MAX_MC_PARTICLES];
        for zi in z.iter_mut().take(n_particles) {
            *zi = Complex64::new(normal.sample(rng), normal.sample(rng));
        }
        let mut weight = 1.0;
        for j in 0..n_particles {
            for k in (j + 1)..n_particles {
                weight *= (z[j] - z[k]).norm_sqr();
            }
            for w in &pinned {
                weight *= (z[j] - w).norm_sqr();
            }
        }
        weight
    })?;
    let ratio = stats.stderr() / stats.mean;
    if !(ratio <= VARIANCE_EXPLOSION_RATIO) {
        return Err(Error::VarianceExplosion { ratio });
    }
    Ok(McEstimate {
        estimate: stats.mean.ln() + n_particles as f64 * (PI / scale.value()).ln(),
        stderr: ratio,
        samples,
        seed,
        generator_name: GENERATOR_NAME,
        bias_warning: ratio > BIAS_WARNING_RATIO,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(
                "Disk::new",
                format!("radius must be positive, got {radius}"),
            ));
        }
        Ok(Disk { center, radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    fn sample(&self, rng: &mut ChaCha20Rng) -> Complex64 {
        let r = self.radius * rng.random::<f64>().sqrt();
        self.center + Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
    }
}

/// Estimates `D(1_A, 1_B) = int_A int_B -ln |x - y|` by uniform sampling of `A x B`.
pub fn mc_coulomb(a: &Disk, b: &Disk, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    let stats = run_batches(samples, seed, |rng| loop {
        let (x, y) = (a.sample(rng), b.sample(rng));
        let d = (x - y).norm();
        if d > 0.0 {
            break -d.ln();
        }
    })?;
    let volume = a.area() * b.area();
    let estimate = volume * stats.mean;
    let stderr = volume * stats.stderr();
    Ok(McEstimate {
        estimate,
        stderr,
        samples,
        seed,
        generator_name: GENERATOR_NAME,
        bias_warning: false,
    })
}
