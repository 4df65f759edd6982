//! Parameter sweeps over the scale grid with machine-readable output.

mod config;
mod drivers;
mod table;

pub use config::{pinned_count, resolve_clusters, ClusterSpec, ExperimentConfig, ExperimentKind, SystemSpec};
pub use drivers::{
    run_decouple, run_experiment, run_ginibre_asymptotics, run_multihole, run_oracle_battery, run_rotate,
    run_translate, GINIBRE_CONSTANT_LIMIT, GINIBRE_RESIDUAL_LIMIT, INVARIANCE_LIMIT,
};
pub use table::{Cell, Check, ExperimentOutput, Table};
