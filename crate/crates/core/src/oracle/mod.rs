//! Independent checks: Monte Carlo integrals, quadrature and finite differences.

mod battery;
mod deterministic;
mod fixtures;
mod montecarlo;

pub use battery::{random_expansion_pairs, run_battery, BatteryItem, BatteryOptions, BatteryReport};
pub use deterministic::{default_trace_cutoff, finite_difference_gradient, kernel_trace, TRACE_INTEGER_TOLERANCE};
pub use fixtures::{exact_formula_fixtures, PartitionFixture};
pub use montecarlo::{
    mc_coulomb, mc_partition, Disk, McEstimate, BATCH_SIZE, BIAS_WARNING_RATIO, GENERATOR_NAME, MAX_MC_PARTICLES,
    MIN_SAMPLES, VARIANCE_EXPLOSION_RATIO,
};
