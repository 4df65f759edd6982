//! Decoupling of well separated clusters and the multi-hole expansions built on it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::configuration::PointCluster;
use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, BackgroundScale, GinibreKernel, IndexConvention};
use crate::meanfield::split_energy_bracket;
use crate::numerics::{lu_determinant, CompensatedSum, ComplexMatrix, Sign};

use super::pinned::{correlation_energy, log_z_pinned, neutral_particles, KernelMode};
use super::series::{multihole_prediction, MultiholePrediction};

/// Largest `M_A + M_B` accepted by [`brute_force_det_expansion`].
pub const EXPANSION_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoupledLogDet {
    /// Log-determinant of each cluster's own `(pi/N) K_inf` block.
    pub blocks: Vec<f64>,
    pub sum_blocks: f64,
    /// Log-determinant of the concatenated matrix.
    pub full: f64,
    /// `full - sum_blocks`.
    pub gap: f64,
}

fn positive_logdet(points: &[Complex64], scale: BackgroundScale) -> Result<f64> {
    let ld = kernel_matrix(&GinibreKernel::infinite(scale), points)?.log_det()?;
    if ld.sign() != Sign::Positive {
        return Err(Error::SingularMatrix {
            step: points.len(),
            pivot: 0.0,
        });
    }
    Ok(ld.log_mag())
}

/// Compares the `K_inf` determinant of all clusters with the product of per-cluster ones.
///
/// Separation is not enforced here; see [`crate::configuration::separation_check`].
pub fn decoupled_logdet(clusters: &[PointCluster], scale: BackgroundScale) -> Result<DecoupledLogDet> {
    if clusters.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: clusters.len(),
        });
    }
    let blocks = clusters
        .iter()
        .map(|c| positive_logdet(&c.effective_points(), scale))
        .collect::<Result<Vec<f64>>>()?;
    let sum_blocks = blocks.iter().copied().collect::<CompensatedSum>().value();
    let full = positive_logdet(&crate::configuration::concatenated_points(clusters), scale)?;
    Ok(DecoupledLogDet {
        blocks,
        sum_blocks,
        full,
        gap: full - sum_blocks,
    })
}

/// Laplace expansion of a two-cluster determinant grouped by the exchange number `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetExpansion {
    /// Sum of all terms with exactly `m` columns exchanged, `m = 0..=min(M_A, M_B)`.
    pub by_exchange: Vec<f64>,
    pub total: f64,
    /// LU determinant of the full matrix.
    pub direct: f64,
    /// `sum_{m >= 1}` of [`DetExpansion::by_exchange`].
    pub exchange_part: f64,
    /// Sum over `m >= 1` of Hadamard bounds on both block minors.
    pub hadamard_bound: f64,
}

fn row_norm(m: &ComplexMatrix, row: usize, cols: &[usize]) -> f64 {
    cols.iter().map(|&j| m.get(row, j).norm_sqr()).sum::<f64>().sqrt()
}

/// Expands `det[(pi/N) K_inf]` over the points of `a` followed by `b` along the rows of `a`.
pub fn brute_force_det_expansion(a: &PointCluster, b: &PointCluster, scale: BackgroundScale) -> Result<DetExpansion> {
    let (ma, mb) = (a.count(), b.count());
    let size = ma + mb;
    if size > EXPANSION_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: EXPANSION_LIMIT,
        });
    }
    let mut points = a.effective_points();
    points.extend(b.effective_points());
    let matrix = kernel_matrix(&GinibreKernel::infinite(scale), &points)?.to_complex();
    let rows_a: Vec<usize> = (0..ma).collect();
    let rows_b: Vec<usize> = (ma..size).collect();
    let row_sign_parity: usize = rows_a.iter().map(|i| i + 1).sum();

    let mut terms: Vec<CompensatedSum> = (0..=ma.min(mb)).map(|_| CompensatedSum::new()).collect();
    let mut bound = CompensatedSum::new();
    for mask in 0u32..(1 << size) {
        if mask.count_ones() as usize != ma {
            continue;
        }
        let cols_a: Vec<usize> = (0..size).filter(|j| mask & (1 << j) != 0).collect();
        let cols_b: Vec<usize> = (0..size).filter(|j| mask & (1 << j) == 0).collect();
        let exchanged = cols_a.iter().filter(|&&j| j >= ma).count();
        let parity = row_sign_parity + cols_a.iter().map(|j| j + 1).sum::<usize>();
        let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
        let minor_a = lu_determinant(&matrix.select(&rows_a, &cols_a))?.to_complex();
        let minor_b = lu_determinant(&matrix.select(&rows_b, &cols_b))?.to_complex();
        terms[exchanged].add(sign * (minor_a * minor_b).re);
        if exchanged > 0 {
            let ha: f64 = rows_a.iter().map(|&i| row_norm(&matrix, i, &cols_a)).product();
            let hb: f64 = rows_b.iter().map(|&i| row_norm(&matrix, i, &cols_b)).product();
            bound.add(ha * hb);
        }
    }
    let by_exchange: Vec<f64> = terms.iter().map(|t| t.value()).collect();
    let total = by_exchange.iter().copied().collect::<CompensatedSum>().value();
    let exchange_part = by_exchange.iter().skip(1).copied().collect::<CompensatedSum>().value();
    let all_rows: Vec<usize> = (0..size).collect();
    let direct = lu_determinant(&matrix.select(&all_rows, &all_rows))?.to_complex().re;
    Ok(DetExpansion {
        by_exchange,
        total,
        direct,
        exchange_part,
        hadamard_bound: bound.value(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowDetCheck {
    /// `ln det[(pi/N) K_{N+M}]`, `-inf` when the matrix is numerically singular.
    pub log_det: f64,
    /// `-C (c - c ln c) N`.
    pub bound: f64,
    pub c: f64,
    pub passes: bool,
}

/// Tests `ln det[(pi/N) K_{N+M}] >= -C (c - c ln c) N` with `c = M/N`.
pub fn lowdet_bound_check(cluster: &PointCluster, scale: BackgroundScale, constant: f64) -> Result<LowDetCheck> {
    let n = neutral_particles(scale)?;
    let m = cluster.count();
    if m == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let top = IndexConvention::RESOLVED.top_index(n + m)?;
    let c = m as f64 / scale.value();
    let bound = -constant * (c - c * c.ln()) * scale.value();
    let log_det = match kernel_matrix(&GinibreKernel::finite(scale, top), &cluster.effective_points())?.log_det() {
        Ok(ld) if ld.sign() == Sign::Positive => ld.log_mag(),
        Ok(_) | Err(Error::SingularMatrix { .. }) => f64::NEG_INFINITY,
        Err(e) => return Err(e),
    };
    Ok(LowDetCheck {
        log_det,
        bound,
        c,
        passes: log_det >= bound,
    })
}

/// `sum ln |w - w'|` over `w` in one cluster and `w'` in the other.
fn cross_log_sum(a: &PointCluster, b: &PointCluster) -> f64 {
    let (pa, pb) = (a.effective_points(), b.effective_points());
    pa.iter()
        .flat_map(|p| pb.iter().map(move |q| (p - q).norm().ln()))
        .collect::<CompensatedSum>()
        .value()
}

fn cluster_charges(clusters: &[PointCluster], scale: BackgroundScale) -> (f64, Vec<f64>) {
    let charges: Vec<f64> = clusters.iter().map(|c| c.count() as f64 / scale.value()).collect();
    let total = clusters.iter().map(|c| c.count()).sum::<usize>() as f64 / scale.value();
    (total, charges)
}

/// Free energy of all clusters against the sum of single-cluster free energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSplitResidual {
    pub f_all: f64,
    pub f_single: Vec<f64>,
    /// `sum_{j<k} I^{jk}` with `I^{jk} = -sum ln |w - w'|`.
    pub interaction: f64,
    /// `N^2` times the mean-field bracket.
    pub mean_field_bracket: f64,
    pub prediction: MultiholePrediction,
    pub rhs: f64,
    pub residual: f64,
}

/// `F(all) - [sum F_j - sum I^{jk} + N^2 bracket + prediction]` with the finite kernel.
pub fn cluster_split_residual(clusters: &[PointCluster], scale: BackgroundScale) -> Result<ClusterSplitResidual> {
    if clusters.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let n = scale.value();
    let f_all = log_z_pinned(clusters, scale, KernelMode::Finite)?.f;
    let f_single = clusters
        .iter()
        .map(|c| Ok(log_z_pinned(std::slice::from_ref(c), scale, KernelMode::Finite)?.f))
        .collect::<Result<Vec<f64>>>()?;
    let mut interaction = CompensatedSum::new();
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            interaction.add(-cross_log_sum(&clusters[i], &clusters[j]));
        }
    }
    let interaction = interaction.value();
    let (c_total, charges) = cluster_charges(clusters, scale);
    let mean_field_bracket = n * n * split_energy_bracket(&charges);
    let prediction = multihole_prediction(n, c_total, &charges)?;
    let mut rhs = CompensatedSum::new();
    for f in &f_single {
        rhs.add(*f);
    }
    rhs.add(-interaction);
    rhs.add(mean_field_bracket);
    rhs.add(prediction.total);
    let rhs = rhs.value();
    Ok(ClusterSplitResidual {
        f_all,
        f_single,
        interaction,
        mean_field_bracket,
        prediction,
        rhs,
        residual: f_all - rhs,
    })
}

/// `F_corr(all) - sum_j F_corr(j) - prediction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiholeResidual {
    pub f_corr_all: f64,
    pub f_corr_single: Vec<f64>,
    pub lhs: f64,
    pub prediction: MultiholePrediction,
    pub residual: f64,
}

pub fn multihole_residual(
    clusters: &[PointCluster],
    scale: BackgroundScale,
    mode: KernelMode,
) -> Result<MultiholeResidual> {
    if clusters.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let f_corr_all = correlation_energy(clusters, scale, mode)?.f_corr;
    let f_corr_single = clusters
        .iter()
        .map(|c| Ok(correlation_energy(std::slice::from_ref(c), scale, mode)?.f_corr))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = f_corr_all - f_corr_single.iter().copied().collect::<CompensatedSum>().value();
    let (c_total, charges) = cluster_charges(clusters, scale);
    let prediction = multihole_prediction(scale.value(), c_total, &charges)?;
    Ok(MultiholeResidual {
        f_corr_all,
        f_corr_single,
        lhs,
        residual: lhs - prediction.total,
        prediction,
    })
}
