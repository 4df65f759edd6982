//! Pinned charge clusters, their disk holes and the admissibility checks on them.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{check_distinct, BackgroundScale};
use crate::meanfield::disk_self_energy;
use crate::numerics::CompensatedSum;

/// Pinned unit charges at `points + translation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClusterRecord", into = "ClusterRecord")]
pub struct PointCluster {
    points: Vec<Complex64>,
    translation: Complex64,
}

/// On-disk form of a cluster: `{"points": [[re, im], ...], "translation": [re, im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub translation: [f64; 2],
}

impl TryFrom<ClusterRecord> for PointCluster {
    type Error = Error;

    fn try_from(record: ClusterRecord) -> Result<Self> {
        PointCluster::new(
            record.points.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            Complex64::new(record.translation[0], record.translation[1]),
        )
    }
}

impl From<PointCluster> for ClusterRecord {
    fn from(cluster: PointCluster) -> Self {
        ClusterRecord {
            points: cluster.points.iter().map(|p| [p.re, p.im]).collect(),
            translation: [cluster.translation.re, cluster.translation.im],
        }
    }
}

impl PointCluster {
    pub fn new(points: Vec<Complex64>, translation: Complex64) -> Result<Self> {
        if points
            .iter()
            .chain(std::iter::once(&translation))
            .any(|p| !(p.re.is_finite() && p.im.is_finite()))
        {
            return Err(Error::NonFinite("cluster coordinates"));
        }
        check_distinct(&points)?;
        Ok(PointCluster { points, translation })
    }

    pub fn at_rest(points: Vec<Complex64>) -> Result<Self> {
        Self::new(points, Complex64::new(0.0, 0.0))
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn translation(&self) -> Complex64 {
        self.translation
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn effective_points(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p + self.translation).collect()
    }

    pub fn with_translation(&self, translation: Complex64) -> PointCluster {
        PointCluster {
            points: self.points.clone(),
            translation,
        }
    }

    /// Rotates the effective positions by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> PointCluster {
        let r = Complex64::from_polar(1.0, angle);
        PointCluster {
            points: self.points.iter().map(|p| p * r).collect(),
            translation: self.translation * r,
        }
    }

    /// Mean of the effective positions.
    pub fn centroid(&self) -> Complex64 {
        centroid(&self.effective_points())
    }

    /// Mean of the reference positions.
    pub fn reference_centroid(&self) -> Complex64 {
        centroid(&self.points)
    }

    pub fn hole(&self, scale: BackgroundScale) -> HoleModel {
        HoleModel::disk(self.centroid(), self.count(), scale)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

fn centroid(points: &[Complex64]) -> Complex64 {
    if points.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for p in points {
        re.add(p.re);
        im.add(p.im);
    }
    Complex64::new(re.value(), im.value()) / points.len() as f64
}

/// Every effective position of a list of clusters, in cluster order.
pub fn concatenated_points(clusters: &[PointCluster]) -> Vec<Complex64> {
    clusters.iter().flat_map(|c| c.effective_points()).collect()
}

/// Disk of area `pi M / N` standing in for the screening region of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleModel {
    pub center: Complex64,
    pub radius: f64,
    pub area: f64,
}

impl HoleModel {
    pub fn disk(center: Complex64, charge: usize, scale: BackgroundScale) -> HoleModel {
        let r2 = charge as f64 / scale.value();
        HoleModel {
            center,
            radius: r2.sqrt(),
            area: PI * r2,
        }
    }

    /// `int_H |x|^2 dx = pi r^2 (|z0|^2 + r^2/2)`.
    pub fn second_moment(&self) -> f64 {
        self.area * (self.center.norm_sqr() + 0.5 * self.radius * self.radius)
    }

    /// Coulomb self-energy `D(1_H, 1_H)`.
    pub fn self_energy(&self) -> f64 {
        disk_self_energy(self.radius)
    }
}

/// Triangular lattice spacing at density `N / pi`.
pub fn lattice_constant(scale: BackgroundScale) -> f64 {
    (2.0 * PI / (3f64.sqrt() * scale.value())).sqrt()
}

/// The `m` sites of a triangular lattice of density `N / pi` closest to `center`.
///
/// One site sits on `center`; ties in distance are broken by angle.
pub fn generate_lattice_disk(scale: BackgroundScale, m: usize, center: Complex64) -> Result<PointCluster> {
    if m == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let spacing = lattice_constant(scale);
    let a = Complex64::new(spacing, 0.0);
    let b = Complex64::new(0.5 * spacing, 0.5 * 3f64.sqrt() * spacing);
    let reach = ((m as f64).sqrt() as i64) + 3;
    let mut sites = Vec::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            let offset = a * i as f64 + b * j as f64;
            let shell = (offset.norm_sqr() / (spacing * spacing) * 1e6).round() as i64;
            let mut angle = offset.arg();
            if angle < -1e-12 {
                angle += 2.0 * PI;
            }
            sites.push((shell, (angle * 1e9).round() as i64, offset));
        }
    }
    sites.sort_by_key(|&(shell, angle, _)| (shell, angle));
    let points = sites.into_iter().take(m).map(|(_, _, o)| center + o).collect();
    PointCluster::at_rest(points)
}

/// Nearest-neighbour distances of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborStats {
    pub min_nn: f64,
    pub max_nn: f64,
}

pub fn nearest_neighbor_stats(cluster: &PointCluster) -> Result<NeighborStats> {
    let pts = cluster.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let mut min_nn = f64::INFINITY;
    let mut max_nn = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        let nn = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| (p - q).norm())
            .fold(f64::INFINITY, f64::min);
        min_nn = min_nn.min(nn);
        max_nn = max_nn.max(nn);
    }
    Ok(NeighborStats { min_nn, max_nn })
}

/// `(N/2) sum |p_k|^2 - sum_{k<l} ln |p_k - p_l|` over arbitrary distinct points.
pub fn pinned_hamiltonian_points(points: &[Complex64], scale: BackgroundScale) -> Result<f64> {
    check_distinct(points)?;
    let mut sum = CompensatedSum::new();
    for p in points {
        sum.add(0.5 * scale.value() * p.norm_sqr());
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            sum.add(-(points[i] - points[j]).norm().ln());
        }
    }
    Ok(sum.value())
}

/// Energy of a cluster's effective positions in the background potential.
pub fn pinned_hamiltonian(cluster: &PointCluster, scale: BackgroundScale) -> Result<f64> {
    pinned_hamiltonian_points(&cluster.effective_points(), scale)
}

/// Disk-hole approximation of [`pinned_hamiltonian`], term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskReference {
    /// `(N^2 / 2 pi) int_H |x|^2`; depends on the hole centre.
    pub background_term: f64,
    /// `(N^2 / 2 pi^2) D(1_H, 1_H)`; independent of the hole centre.
    pub self_energy_term: f64,
    /// `-(1/2) M ln M`.
    pub count_term: f64,
    pub total: f64,
}

pub fn hamiltonian_disk_reference(hole: &HoleModel, m: usize, scale: BackgroundScale) -> DiskReference {
    let n = scale.value();
    let background_term = n * n / (2.0 * PI) * hole.second_moment();
    let self_energy_term = n * n / (2.0 * PI * PI) * hole.self_energy();
    let mf = m as f64;
    let count_term = if m == 0 { 0.0 } else { -0.5 * mf * mf.ln() };
    DiskReference {
        background_term,
        self_energy_term,
        count_term,
        total: background_term + self_energy_term + count_term,
    }
}

/// Tunable constants of the admissibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssumptionConstants {
    /// Lower spacing window as a multiple of the lattice constant.
    pub spacing_lower: f64,
    /// Upper spacing window as a multiple of the lattice constant.
    pub spacing_upper: f64,
    /// Largest accepted `|H_N - reference| / M`.
    pub energy_residual_limit: f64,
    pub r1: f64,
    pub r2: f64,
}

impl Default for AssumptionConstants {
    fn default() -> Self {
        AssumptionConstants {
            spacing_lower: 0.5,
            spacing_upper: 1.5,
            energy_residual_limit: 5.0,
            r1: 0.1,
            r2: 0.1,
        }
    }
}

/// Spacing check of one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    /// `None` for single-point clusters, where the check is vacuous.
    pub stats: Option<NeighborStats>,
    /// `C1` in `C1 M^{-1/2} <= nn`.
    pub c1: f64,
    /// `C2` in `nn <= C2 M^{-1/2}`.
    pub c2: f64,
    pub ok: bool,
}

/// Geometry of the cluster-separation condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub centers: Vec<Complex64>,
    /// Centroid-centred radius covering the effective points and the hole.
    pub enclosing_radii: Vec<f64>,
    pub outer_radius: f64,
    pub min_pair_distance: Option<f64>,
    pub min_boundary_distance: f64,
    /// `max R_j / min pair distance`, compared with `r1`.
    pub hole_to_pair_ratio: Option<f64>,
    /// `min pair distance / min boundary distance`, compared with `r2`.
    pub pair_to_boundary_ratio: Option<f64>,
    pub r1: f64,
    pub r2: f64,
    pub ok: bool,
}

/// Checks `R_j <= r1 d_pair <= r1 r2 d_boundary` for the centroid-centred disks of the clusters.
///
/// With a single cluster there is no pair distance and the check reduces to the
/// enclosing disk lying strictly inside the outer circle of radius `sqrt(1 + M/N)`.
pub fn separation_check(
    clusters: &[PointCluster],
    scale: BackgroundScale,
    r1: f64,
    r2: f64,
) -> Result<SeparationReport> {
    if clusters.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let total: usize = clusters.iter().map(|c| c.count()).sum();
    let outer_radius = (1.0 + total as f64 / scale.value()).sqrt();
    let mut centers = Vec::with_capacity(clusters.len());
    let mut enclosing_radii = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let center = cluster.centroid();
        let spread = cluster
            .effective_points()
            .iter()
            .map(|p| (p - center).norm())
            .fold(0.0, f64::max);
        centers.push(center);
        enclosing_radii.push(spread.max(cluster.hole(scale).radius));
    }
    let min_boundary_distance = centers
        .iter()
        .map(|c| outer_radius - c.norm())
        .fold(f64::INFINITY, f64::min);
    let mut min_pair: Option<f64> = None;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let d = (centers[i] - centers[j]).norm();
            min_pair = Some(min_pair.map_or(d, |m| m.min(d)));
        }
    }
    let max_radius = enclosing_radii.iter().copied().fold(0.0, f64::max);
    let (hole_to_pair_ratio, pair_to_boundary_ratio, ok) = match min_pair {
        Some(d) => {
            let hp = max_radius / d;
            let pb = d / min_boundary_distance;
            (Some(hp), Some(pb), min_boundary_distance > 0.0 && hp <= r1 && pb <= r2)
        }
        None => {
            let inside = centers
                .iter()
                .zip(&enclosing_radii)
                .all(|(c, r)| c.norm() + r < outer_radius);
            (None, None, inside)
        }
    };
    Ok(SeparationReport {
        centers,
        enclosing_radii,
        outer_radius,
        min_pair_distance: min_pair,
        min_boundary_distance,
        hole_to_pair_ratio,
        pair_to_boundary_ratio,
        r1,
        r2,
        ok,
    })
}

/// All admissibility checks for a list of clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionsReport {
    pub constants: AssumptionConstants,
    pub spacing: Vec<SpacingReport>,
    pub spacing_ok: bool,
    /// `(H_N(cluster) - disk reference) / M` per cluster.
    pub energy_residual: Vec<f64>,
    pub energy_ok: bool,
    pub separation: SeparationReport,
    pub separation_ok: bool,
}

impl AssumptionsReport {
    pub fn admissible(&self) -> bool {
        self.spacing_ok && self.energy_ok && self.separation_ok
    }

    /// Human-readable reasons for rejection.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (j, s) in self.spacing.iter().enumerate() {
            if !s.ok {
                out.push(format!(
                    "cluster {j}: nearest-neighbour spacing outside [{:.4}, {:.4}] M^-1/2",
                    s.c1, s.c2
                ));
            }
        }
        for (j, r) in self.energy_residual.iter().enumerate() {
            if !(r.abs() <= self.constants.energy_residual_limit) {
                out.push(format!(
                    "cluster {j}: energy residual per point {r:.4} exceeds {}",
                    self.constants.energy_residual_limit
                ));
            }
        }
        if !self.separation_ok {
            out.push(format!(
                "clusters not separated: hole/pair {:?} (r1 = {}), pair/boundary {:?} (r2 = {})",
                self.separation.hole_to_pair_ratio,
                self.separation.r1,
                self.separation.pair_to_boundary_ratio,
                self.separation.r2
            ));
        }
        out
    }
}

pub fn check_assumptions(
    clusters: &[PointCluster],
    scale: BackgroundScale,
    constants: &AssumptionConstants,
) -> Result<AssumptionsReport> {
    let spacing_unit = lattice_constant(scale);
    let mut spacing = Vec::with_capacity(clusters.len());
    let mut energy_residual = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let root_m = (cluster.count() as f64).sqrt();
        let (lower, upper) = (
            constants.spacing_lower * spacing_unit,
            constants.spacing_upper * spacing_unit,
        );
        let stats = if cluster.count() >= 2 {
            Some(nearest_neighbor_stats(cluster)?)
        } else {
            None
        };
        let ok = stats.is_none_or(|s| s.min_nn >= lower && s.max_nn <= upper);
        spacing.push(SpacingReport {
            stats,
            c1: lower * root_m,
            c2: upper * root_m,
            ok,
        });
        let reference = hamiltonian_disk_reference(&cluster.hole(scale), cluster.count(), scale);
        let energy = pinned_hamiltonian(cluster, scale)?;
        energy_residual.push((energy - reference.total) / cluster.count().max(1) as f64);
    }
    let separation = separation_check(clusters, scale, constants.r1, constants.r2)?;
    Ok(AssumptionsReport {
        constants: *constants,
        spacing_ok: spacing.iter().all(|s| s.ok),
        spacing,
        energy_ok: energy_residual
            .iter()
            .all(|r| r.abs() <= constants.energy_residual_limit),
        energy_residual,
        separation_ok: separation.ok,
        separation,
    })
}
