//! Closed-form mean-field energies of the droplet punctured by disk holes.
//!
//! Energies are kept at the `N^2` scale: for `J` mobile charges in the potential
//! `N |x|^2` the equilibrium measure is uniform on `D(0, R) \ (holes)` with
//! `R^2 = (J + M) / N`, and
//! `E = C_R / 2 - (N^2 / 2 pi^2) D(1_{D \ H}, 1_{D \ H})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::configuration::{HoleModel, PointCluster};
use crate::error::{Error, Result};
use crate::kernel::BackgroundScale;
use crate::numerics::CompensatedSum;

/// Overlap margin between disk holes.
pub const HOLE_SEPARATION_MARGIN: f64 = 1e-9;

/// `-(1/pi) (ln|.| * 1_{D(0,R)})(x)`.
pub fn newton_potential_disk(x: Complex64, radius: f64) -> f64 {
    let r2 = radius * radius;
    let d = x.norm();
    if d >= radius {
        -r2 * d.ln()
    } else {
        -0.5 * d * d + 0.5 * r2 - r2 * radius.ln()
    }
}

/// `D(1_{D(0,R)}, 1_{D(0,R)}) = pi^2 R^4 / 4 - pi^2 R^4 ln R`.
pub fn disk_self_energy(radius: f64) -> f64 {
    let r4 = radius.powi(4);
    PI * PI * r4 * (0.25 - radius.ln())
}

/// `C_R = N J R^2 - 2 N J R^2 ln R`.
pub fn c_r_constant(n: f64, j: f64, radius: f64) -> f64 {
    let r2 = radius * radius;
    n * j * r2 * (1.0 - 2.0 * radius.ln())
}

/// `D(1_{D(0,R)}, 1_H)` for a disk hole inside `D(0, R)`.
fn disk_hole_interaction(radius: f64, hole: &HoleModel) -> f64 {
    let r2 = radius * radius;
    PI * (hole.area * (0.5 * r2 - r2 * radius.ln()) - 0.5 * hole.second_moment())
}

/// `sum_{k, l} ln |p_k - q_l|`.
fn cross_log_sum(p: &[Complex64], q: &[Complex64]) -> f64 {
    let mut sum = CompensatedSum::new();
    for a in p {
        for b in q {
            sum.add((a - b).norm().ln());
        }
    }
    sum.value()
}

/// Mobile charge `J`, background scale `N` and the pinned clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldProblem {
    pub scale: BackgroundScale,
    pub charge: f64,
    pub clusters: Vec<PointCluster>,
}

impl MeanFieldProblem {
    pub fn new(scale: BackgroundScale, charge: f64, clusters: Vec<PointCluster>) -> Result<Self> {
        if !(charge > 0.0 && charge.is_finite()) {
            return Err(Error::domain(
                "MeanFieldProblem::new",
                format!("charge must be positive, got {charge}"),
            ));
        }
        Ok(MeanFieldProblem {
            scale,
            charge,
            clusters,
        })
    }

    /// Problem with `J = N`.
    pub fn neutral(scale: BackgroundScale, clusters: Vec<PointCluster>) -> Result<Self> {
        Self::new(scale, scale.value(), clusters)
    }

    pub fn pinned_charge(&self) -> usize {
        self.clusters.iter().map(|c| c.count()).sum()
    }

    pub fn droplet_radius(&self) -> f64 {
        ((self.charge + self.pinned_charge() as f64) / self.scale.value()).sqrt()
    }

    pub fn holes(&self) -> Vec<HoleModel> {
        self.clusters.iter().map(|c| c.hole(self.scale)).collect()
    }

    /// Checks the holes are disjoint disks inside the droplet.
    pub fn validate(&self) -> Result<Vec<HoleModel>> {
        let holes = self.holes();
        let radius = self.droplet_radius();
        for (i, h) in holes.iter().enumerate() {
            if h.center.norm() + h.radius > radius {
                return Err(Error::HoleOutsideDroplet { index: i });
            }
            for (j, g) in holes.iter().enumerate().skip(i + 1) {
                if (h.center - g.center).norm() <= h.radius + g.radius + HOLE_SEPARATION_MARGIN {
                    return Err(Error::OverlappingHoles { first: i, second: j });
                }
            }
        }
        Ok(holes)
    }
}

/// Named pieces of `D(1_{D \ H}, 1_{D \ H})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldComponents {
    /// `D(1_D, 1_D)`.
    pub disk_self_energy: f64,
    /// `D(1_{H_j}, 1_{H_j})` per hole.
    pub hole_self_energies: Vec<f64>,
    /// `D(1_D, 1_{H_j})` per hole.
    pub disk_hole_cross: Vec<f64>,
    /// `sum_{j<k} D(1_{H_j}, 1_{H_k})` through the point-charge screening identity.
    pub hole_hole_cross: f64,
    /// `sum_{j<k} sum ln |w_j - w_k|` over points of distinct clusters.
    pub interaction_log_sum: f64,
    /// `D(1_{D \ H}, 1_{D \ H})`.
    pub punctured_self_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldResult {
    /// Mean-field energy at the `N^2` scale.
    pub energy: f64,
    /// `energy / N^2`.
    pub normalized_energy: f64,
    pub c_r: f64,
    pub droplet_radius: f64,
    pub components: MeanFieldComponents,
}

pub fn emf_energy(problem: &MeanFieldProblem) -> Result<MeanFieldResult> {
    let holes = problem.validate()?;
    let n = problem.scale.value();
    let radius = problem.droplet_radius();
    let disk = disk_self_energy(radius);
    let hole_self_energies: Vec<f64> = holes.iter().map(|h| h.self_energy()).collect();
    let disk_hole_cross: Vec<f64> = holes.iter().map(|h| disk_hole_interaction(radius, h)).collect();
    let effective: Vec<Vec<Complex64>> = problem.clusters.iter().map(|c| c.effective_points()).collect();
    let mut interaction = CompensatedSum::new();
    for i in 0..effective.len() {
        for j in (i + 1)..effective.len() {
            interaction.add(cross_log_sum(&effective[i], &effective[j]));
        }
    }
    let interaction_log_sum = interaction.value();
    let hole_hole_cross = -(PI * PI) / (n * n) * interaction_log_sum;

    let mut punctured = CompensatedSum::new();
    punctured.add(disk);
    for (&self_energy, &cross) in hole_self_energies.iter().zip(&disk_hole_cross) {
        punctured.add(-2.0 * cross);
        punctured.add(self_energy);
    }
    punctured.add(2.0 * hole_hole_cross);
    let punctured_self_energy = punctured.value();

    let c_r = c_r_constant(n, problem.charge, radius);
    let energy = 0.5 * c_r - n * n / (2.0 * PI * PI) * punctured_self_energy;
    if !energy.is_finite() {
        return Err(Error::NonFinite("mean-field energy"));
    }
    Ok(MeanFieldResult {
        energy,
        normalized_energy: energy / (n * n),
        c_r,
        droplet_radius: radius,
        components: MeanFieldComponents {
            disk_self_energy: disk,
            hole_self_energies,
            disk_hole_cross,
            hole_hole_cross,
            interaction_log_sum,
            punctured_self_energy,
        },
    })
}

/// Gradient of [`emf_energy`] in the translation of one cluster, as `d/dx + i d/dy`.
///
/// The background part is `-N sum_k (w_k + a)`; with several clusters the
/// point-charge interaction with the others adds `sum (p - q) / |p - q|^2`.
pub fn emf_gradient(problem: &MeanFieldProblem, cluster_index: usize) -> Result<Complex64> {
    problem.validate()?;
    let cluster = problem
        .clusters
        .get(cluster_index)
        .ok_or_else(|| Error::domain("emf_gradient", format!("no cluster {cluster_index}")))?;
    let own = cluster.effective_points();
    let n = problem.scale.value();
    let mut gradient: Complex64 = own.iter().map(|p| -n * p).sum();
    for (j, other) in problem.clusters.iter().enumerate() {
        if j == cluster_index {
            continue;
        }
        for q in other.effective_points() {
            for p in &own {
                let d = p - q;
                gradient += d / d.norm_sqr();
            }
        }
    }
    Ok(gradient)
}

/// Terms of `E_12 - E_1 - E_2` for two clusters sharing `N` and `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitDifference {
    /// `(C_{R12} - C_{R1} - C_{R2}) / 2`.
    pub constant_term: f64,
    /// `sum ln |w_1 - w_2|`.
    pub interaction: f64,
    /// `-(N^2/2)` times the `R^4/4 - R^4 ln R` differences.
    pub disk_term: f64,
    /// Annulus terms carried by the first and second cluster.
    pub first_annulus: f64,
    pub second_annulus: f64,
    pub total: f64,
}

/// `E_12 - E_1 - E_2` from the closed forms, without assembling any single energy.
pub fn emf_split_difference(problem: &MeanFieldProblem) -> Result<SplitDifference> {
    if problem.clusters.len() != 2 {
        return Err(Error::domain("emf_split_difference", "need exactly two clusters"));
    }
    problem.validate()?;
    let n = problem.scale.value();
    let j = problem.charge;
    let m1 = problem.clusters[0].count() as f64;
    let m2 = problem.clusters[1].count() as f64;
    let r12 = ((j + m1 + m2) / n).sqrt();
    let r1 = ((j + m1) / n).sqrt();
    let r2 = ((j + m2) / n).sqrt();
    let quartic = |r: f64| r.powi(4) * (0.25 - r.ln());
    let annulus = |r: f64| r * r * (0.5 - r.ln());
    let constant_term = 0.5 * (c_r_constant(n, j, r12) - c_r_constant(n, j, r1) - c_r_constant(n, j, r2));
    let interaction = cross_log_sum(
        &problem.clusters[0].effective_points(),
        &problem.clusters[1].effective_points(),
    );
    let disk_term = -0.5 * n * n * (quartic(r12) - quartic(r1) - quartic(r2));
    let first_annulus = m1 * n * (annulus(r12) - annulus(r1));
    let second_annulus = m2 * n * (annulus(r12) - annulus(r2));
    let total = constant_term + interaction + disk_term + first_annulus + second_annulus;
    Ok(SplitDifference {
        constant_term,
        interaction,
        disk_term,
        first_annulus,
        second_annulus,
        total,
    })
}

/// `(3/8)((1 - n) + c^2 - sum c_j^2 - (2/3)(1+c)^2 ln(1+c) + (2/3) sum (1+c_j)^2 ln(1+c_j))`,
/// the `N^2` coefficient of `E(all) - sum_j E(j)` at `J = N`.
pub fn split_energy_bracket(charges: &[f64]) -> f64 {
    let c: f64 = charges.iter().sum();
    let n = charges.len() as f64;
    let g = |x: f64| (1.0 + x).powi(2) * x.ln_1p();
    let mut s = CompensatedSum::new();
    s.add(1.0 - n);
    s.add(c * c);
    s.add(-(2.0 / 3.0) * g(c));
    for &cj in charges {
        s.add(-cj * cj);
        s.add((2.0 / 3.0) * g(cj));
    }
    0.375 * s.value()
}

/// Residual of the two-cluster identity between the `N^2` bracket and the closed
/// forms at `N = 1`, `R_j^2 = 1 + c_j`, `R_12^2 = 1 + c_1 + c_2`.
pub fn mf_identity_check(c1: f64, c2: f64) -> f64 {
    let c = c1 + c2;
    let lhs = split_energy_bracket(&[c1, c2]);
    let (r1, r2, r12) = ((1.0 + c1).sqrt(), (1.0 + c2).sqrt(), (1.0 + c).sqrt());
    let cr = |r: f64| r * r * (1.0 - 2.0 * r.ln());
    let quartic = |r: f64| r.powi(4) * (0.25 - r.ln());
    let annulus = |r: f64| r * r * r.ln() - 0.5 * r * r;
    let mut rhs = CompensatedSum::new();
    rhs.add(0.5 * (cr(r12) - cr(r1) - cr(r2)));
    rhs.add(-0.5 * (quartic(r12) - quartic(r1) - quartic(r2)));
    rhs.add(-c1 * (annulus(r12) - annulus(r1)));
    rhs.add(-c2 * (annulus(r12) - annulus(r2)));
    lhs - rhs.value()
}

/// `2 E(J = N + M, no hole) - 2 E(J = N, one hole) - (N^2/pi) int_H |x|^2 - (N^2/pi^2) D(1_H, 1_H)`,
/// which vanishes for a disk hole of charge `M`.
pub fn pinning_cancellation(scale: BackgroundScale, cluster: &PointCluster) -> Result<f64> {
    let n = scale.value();
    let m = cluster.count() as f64;
    let free = emf_energy(&MeanFieldProblem::new(scale, n + m, Vec::new())?)?;
    let holed = emf_energy(&MeanFieldProblem::neutral(scale, vec![cluster.clone()])?)?;
    let hole = cluster.hole(scale);
    Ok(2.0 * free.energy
        - 2.0 * holed.energy
        - n * n / PI * hole.second_moment()
        - n * n / (PI * PI) * hole.self_energy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::generate_lattice_disk;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scale(n: f64) -> BackgroundScale {
        BackgroundScale::new(n).unwrap()
    }

    #[test]
    fn newton_examples() {
        assert!((newton_potential_disk(c(0.0, 0.0), 1.0) - 0.5).abs() < 1e-16);
        assert!((newton_potential_disk(c(0.0, 2.0), 1.0) + 2f64.ln()).abs() < 1e-16);
        let inside = newton_potential_disk(c(1.0 - 1e-12, 0.0), 1.0);
        let outside = newton_potential_disk(c(1.0, 0.0), 1.0);
        assert!(inside.abs() < 1e-11 && outside.abs() < 1e-16);
    }

    #[test]
    fn disk_self_energy_examples() {
        assert!((disk_self_energy(1.0) - PI * PI / 4.0).abs() < 1e-15);
        assert!(disk_self_energy(0.25f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn c_r_examples() {
        assert_eq!(c_r_constant(1.0, 1.0, 1.0), 1.0);
        assert_eq!(c_r_constant(7.0, 7.0, 1.0), 49.0);
        assert!(c_r_constant(2.0, 3.0, 0.5f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn hole_free_energy_is_three_eighths() {
        let n = 120.0;
        let r = emf_energy(&MeanFieldProblem::neutral(scale(n), Vec::new()).unwrap()).unwrap();
        assert!((r.energy - 0.375 * n * n).abs() < 1e-9);
        assert!((r.normalized_energy - 0.375).abs() < 1e-15);
    }

    #[test]
    fn homogeneity() {
        let n = 40.0;
        let cl = PointCluster::at_rest(vec![c(0.1, 0.0), c(-0.1, 0.05)]).unwrap();
        let cl2 = PointCluster::at_rest(vec![c(0.1, 0.0), c(-0.1, 0.05), c(0.0, 0.1), c(0.02, -0.08)]).unwrap();
        let a = MeanFieldProblem::new(scale(n), 30.0, vec![cl]).unwrap();
        let b = MeanFieldProblem::new(scale(2.0 * n), 60.0, vec![cl2]).unwrap();
        assert!((a.droplet_radius() - b.droplet_radius()).abs() < 1e-15);
        let ca = c_r_constant(n, 30.0, a.droplet_radius());
        let cb = c_r_constant(2.0 * n, 60.0, b.droplet_radius());
        assert!((cb - 4.0 * ca).abs() < 1e-10);
    }

    #[test]
    fn gradient_examples() {
        let n = 25.0;
        let single = PointCluster::new(vec![c(0.0, 0.0)], c(0.1, 0.0)).unwrap();
        let g = emf_gradient(&MeanFieldProblem::neutral(scale(n), vec![single]).unwrap(), 0).unwrap();
        assert!((g - c(-0.1 * n, 0.0)).norm() < 1e-14);
        let centred = PointCluster::at_rest(vec![c(0.1, 0.0), c(-0.1, 0.0)]).unwrap();
        let g = emf_gradient(&MeanFieldProblem::neutral(scale(n), vec![centred]).unwrap(), 0).unwrap();
        assert!(g.norm() < 1e-14);
    }

    #[test]
    fn overlapping_holes_are_rejected() {
        let s = scale(100.0);
        let a = generate_lattice_disk(s, 4, c(0.0, 0.0)).unwrap();
        let b = generate_lattice_disk(s, 4, c(0.1, 0.0)).unwrap();
        let p = MeanFieldProblem::neutral(s, vec![a, b]).unwrap();
        assert!(matches!(emf_energy(&p), Err(Error::OverlappingHoles { .. })));
        assert!(matches!(emf_split_difference(&p), Err(Error::OverlappingHoles { .. })));
        let far = generate_lattice_disk(s, 4, c(0.99, 0.0)).unwrap();
        let p = MeanFieldProblem::neutral(s, vec![far]).unwrap();
        assert!(matches!(emf_energy(&p), Err(Error::HoleOutsideDroplet { index: 0 })));
    }

    #[test]
    fn split_examples() {
        let s = scale(200.0);
        let a = generate_lattice_disk(s, 4, c(0.3, 0.1)).unwrap();
        let b = generate_lattice_disk(s, 6, c(-0.35, -0.2)).unwrap();
        let p12 = MeanFieldProblem::neutral(s, vec![a.clone(), b.clone()]).unwrap();
        let p21 = MeanFieldProblem::neutral(s, vec![b.clone(), a.clone()]).unwrap();
        let d12 = emf_split_difference(&p12).unwrap().total;
        let d21 = emf_split_difference(&p21).unwrap().total;
        assert!((d12 - d21).abs() < 1e-9 * d12.abs());
        let e12 = emf_energy(&p12).unwrap().energy;
        let e1 = emf_energy(&MeanFieldProblem::neutral(s, vec![a.clone()]).unwrap())
            .unwrap()
            .energy;
        let e2 = emf_energy(&MeanFieldProblem::neutral(s, vec![b.clone()]).unwrap())
            .unwrap()
            .energy;
        assert!((d12 - (e12 - e1 - e2)).abs() < 1e-9 * d12.abs());
        let bracket = s.value().powi(2) * split_energy_bracket(&[4.0 / 200.0, 6.0 / 200.0]);
        let interaction = emf_split_difference(&p12).unwrap().interaction;
        assert!((d12 - (bracket + interaction)).abs() < 1e-9 * d12.abs());
    }

    #[test]
    fn identity_examples() {
        assert_eq!(mf_identity_check(0.0, 0.0), 0.0);
        assert!(mf_identity_check(0.1, 0.1).abs() < 1e-12);
        assert!(mf_identity_check(0.02, 0.17).abs() < 1e-12);
    }

    #[test]
    fn cancellation_vanishes() {
        let s = scale(300.0);
        let cl = generate_lattice_disk(s, 9, c(0.2, -0.3)).unwrap();
        let residual = pinning_cancellation(s, &cl).unwrap();
        assert!(residual.abs() < 1e-9 * s.value().powi(2));
    }
}
