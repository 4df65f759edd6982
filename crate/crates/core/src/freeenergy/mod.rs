//! Exact and asymptotic free energies of the pinned-charge system.
//!
//! Free energies follow `F = -(1/2) ln Z`; mean-field energies are at the `N^2` scale, so
//! `F_corr = F - E_MF` with no further factor.

mod decouple;
mod pinned;
mod series;

pub use decouple::{
    brute_force_det_expansion, cluster_split_residual, decoupled_logdet, lowdet_bound_check, multihole_residual,
    ClusterSplitResidual, DecoupledLogDet, DetExpansion, LowDetCheck, MultiholeResidual, EXPANSION_LIMIT,
};
pub use pinned::{
    correlation_energy, kernel_correction, log_z_pinned, log_z_pinned_particles, neutral_particles, rotation_shift,
    translation_shift, CorrelationEnergy, CorrelationShift, FreeEnergyReport, KernelMode, PinnedDecomposition,
};
pub use series::{
    a_mn, ginibre_constant_estimate, ginibre_constant_extrapolated, ginibre_log_z_asymptotic, ginibre_log_z_exact,
    ginibre_residual, ginibre_series, holed_droplet_series, multihole_prediction, AmnMode, ExpansionSeries,
    GinibreAsymptotic, MultiholePrediction, Remainder,
};
