//! Experiment configuration: per-experiment presets overlaid with a JSON file.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::configuration::{generate_lattice_disk, AssumptionConstants, PointCluster};
use crate::error::{Error, Result};
use crate::freeenergy::KernelMode;
use crate::kernel::BackgroundScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Translate,
    Rotate,
    Decouple,
    Multihole,
    GinibreAsymptotics,
    OracleBattery,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Translate => "translate",
            ExperimentKind::Rotate => "rotate",
            ExperimentKind::Decouple => "decouple",
            ExperimentKind::Multihole => "multihole",
            ExperimentKind::GinibreAsymptotics => "ginibre-asymptotics",
            ExperimentKind::OracleBattery => "oracle-battery",
        }
    }
}

/// How a cluster of pinned charges is produced for a given `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClusterSpec {
    /// `M = c N` triangular-lattice points around `center`.
    Lattice { charge: f64, center: [f64; 2] },
    /// Fixed points, independent of `N`.
    Points {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        translation: [f64; 2],
    },
    /// A cluster JSON file.
    File { path: PathBuf },
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `c N` as an integer, or an error when it is not one.
pub fn pinned_count(charge: f64, n: f64) -> Result<usize> {
    let m = charge * n;
    let rounded = m.round();
    if !(charge > 0.0) || rounded < 1.0 || (m - rounded).abs() > 1e-9 * m.abs().max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "charge {charge} at N = {n} gives M = {m}, which is not a positive integer"
        )));
    }
    Ok(rounded as usize)
}

impl ClusterSpec {
    pub fn lattice(charge: f64, center: [f64; 2]) -> Self {
        ClusterSpec::Lattice { charge, center }
    }

    pub fn resolve(&self, scale: BackgroundScale) -> Result<PointCluster> {
        match self {
            ClusterSpec::Lattice { charge, center } => {
                generate_lattice_disk(scale, pinned_count(*charge, scale.value())?, complex(*center))
            }
            ClusterSpec::Points { points, translation } => {
                PointCluster::new(points.iter().copied().map(complex).collect(), complex(*translation))
            }
            ClusterSpec::File { path } => PointCluster::read(path),
        }
    }

    pub fn charge(&self) -> Option<f64> {
        match self {
            ClusterSpec::Lattice { charge, .. } => Some(*charge),
            _ => None,
        }
    }
}

pub fn resolve_clusters(specs: &[ClusterSpec], scale: BackgroundScale) -> Result<Vec<PointCluster>> {
    specs.iter().map(|s| s.resolve(scale)).collect()
}

/// A single system: scale, pinned clusters and the mobile charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub scale: f64,
    #[serde(default)]
    pub clusters: Vec<ClusterSpec>,
    /// Number of mobile particles; `N` when absent.
    #[serde(default)]
    pub particles: Option<usize>,
    #[serde(default = "default_kernel_mode")]
    pub kernel_mode: KernelMode,
}

fn default_kernel_mode() -> KernelMode {
    KernelMode::Finite
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn background(&self) -> Result<BackgroundScale> {
        BackgroundScale::new(self.scale)
    }

    pub fn resolve(&self) -> Result<Vec<PointCluster>> {
        resolve_clusters(&self.clusters, self.background()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub scale_grid: Vec<f64>,
    pub clusters: Vec<ClusterSpec>,
    /// Translations `a` of the single cluster in `translate`.
    pub translations: Vec<[f64; 2]>,
    /// Angles of the joint rotation in `rotate`.
    pub rotations: Vec<f64>,
    /// Centre distances of the two clusters in `decouple`.
    pub separations: Vec<f64>,
    pub kernel_mode: KernelMode,
    pub seed: u64,
    /// Monte Carlo samples per battery item.
    pub samples: usize,
    /// Multiplies every acceptance tolerance.
    pub tolerance_scale: f64,
    pub assumptions: AssumptionConstants,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for one experiment.
    pub fn preset(kind: ExperimentKind) -> Self {
        let mut config = ExperimentConfig {
            experiment: kind,
            scale_grid: vec![100.0, 200.0, 400.0],
            clusters: vec![ClusterSpec::lattice(0.02, [0.0, 0.0])],
            translations: vec![[0.0, 0.0], [0.025, 0.0], [0.0, 0.05], [0.05, 0.0]],
            rotations: vec![0.0, 0.5, 1.0, 2.0],
            separations: vec![0.3, 0.4, 0.5, 0.6],
            kernel_mode: KernelMode::Finite,
            seed: 20_240_611,
            samples: 1_000_000,
            tolerance_scale: 1.0,
            assumptions: AssumptionConstants::default(),
            output: None,
        };
        match kind {
            ExperimentKind::Rotate => {
                config.clusters = vec![ClusterSpec::lattice(0.02, [0.2, 0.0])];
            }
            ExperimentKind::Decouple => {
                config.clusters = vec![
                    ClusterSpec::lattice(0.01, [0.0, 0.0]),
                    ClusterSpec::lattice(0.01, [0.0, 0.0]),
                ];
            }
            ExperimentKind::Multihole => {
                config.clusters = vec![
                    ClusterSpec::lattice(0.01, [-0.3, 0.0]),
                    ClusterSpec::lattice(0.01, [0.3, 0.0]),
                ];
                config.assumptions.r1 = 0.5;
                config.assumptions.r2 = 1.0;
            }
            ExperimentKind::GinibreAsymptotics => {
                config.scale_grid = vec![50.0, 100.0, 200.0, 400.0, 800.0];
                config.clusters = Vec::new();
            }
            ExperimentKind::Translate | ExperimentKind::OracleBattery => {}
        }
        config
    }

    /// The preset for `kind` with the keys of a JSON object replacing its fields.
    pub fn from_json(kind: ExperimentKind, text: &str) -> Result<Self> {
        let overrides: Value = serde_json::from_str(text)?;
        let Value::Object(overrides) = overrides else {
            return Err(Error::InvalidConfig("configuration must be a JSON object".into()));
        };
        let mut merged = serde_json::to_value(Self::preset(kind))?;
        let Value::Object(ref mut fields) = merged else {
            unreachable!("a struct serializes to an object");
        };
        for (key, value) in overrides {
            fields.insert(key, value);
        }
        let config: ExperimentConfig = serde_json::from_value(merged)?;
        if config.experiment != kind {
            return Err(Error::InvalidConfig(format!(
                "configuration is for '{}' but '{}' was requested",
                config.experiment.name(),
                kind.name()
            )));
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale_grid.is_empty() {
            return Err(Error::InvalidConfig("scale_grid is empty".into()));
        }
        if self.scale_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig("scale_grid must be strictly increasing".into()));
        }
        for &n in &self.scale_grid {
            if !(n >= 1.0) || n.fract() != 0.0 || n > 1e7 {
                return Err(Error::InvalidConfig(format!("N = {n} is not a positive integer")));
            }
            for spec in &self.clusters {
                if let Some(c) = spec.charge() {
                    pinned_count(c, n)?;
                }
            }
        }
        if !(self.tolerance_scale >= 0.0) {
            return Err(Error::InvalidConfig("tolerance_scale must be non-negative".into()));
        }
        let needed = match self.experiment {
            ExperimentKind::Translate => Some((1, 1)),
            ExperimentKind::Rotate => Some((1, usize::MAX)),
            ExperimentKind::Decouple => Some((2, 2)),
            ExperimentKind::Multihole => Some((2, usize::MAX)),
            ExperimentKind::GinibreAsymptotics | ExperimentKind::OracleBattery => None,
        };
        if let Some((lo, hi)) = needed {
            let k = self.clusters.len();
            if k < lo || k > hi {
                return Err(Error::InvalidConfig(format!(
                    "'{}' needs between {lo} and {hi} clusters, got {k}",
                    self.experiment.name()
                )));
            }
        }
        if self.experiment == ExperimentKind::Decouple && self.clusters.iter().any(|c| c.charge().is_none()) {
            return Err(Error::InvalidConfig("'decouple' places lattice clusters itself".into()));
        }
        if self.experiment == ExperimentKind::GinibreAsymptotics && self.scale_grid[0] < 2.0 {
            return Err(Error::InvalidConfig("ginibre-asymptotics needs N >= 2".into()));
        }
        Ok(())
    }
}
