//! Partition functions with pinned unit charges.
//!
//! `ln Z_n(w) = ln Z_{n+M}(0) + 2 H(w) - A(M, n) + ln det[(pi/N) K_{n+M}(w_i, w_j)]`, where
//! `Z_{n+M}(0)` is the free Ginibre partition function at scale `N`, `H` the pinned
//! Hamiltonian and `A(M, n) = ln((n+M)!/n!) - M ln(N/pi)`.
//!
//! The determinant is split as `ln det K_inf(q) + ln det(I - K_inf(q)^{-1} T)`. Here
//! `q` are the effective points moved by the common shift of all clusters, which leaves
//! the `K_inf` determinant unchanged, and `T = K_inf(q) o P(n+M, N p_i conj(p_j))` is the
//! incomplete-gamma tail carried into that gauge. The second factor is tiny for points
//! deep inside the droplet and is kept in log form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::configuration::{concatenated_points, pinned_hamiltonian_points, PointCluster};
use crate::error::{Error, Result};
use crate::kernel::{check_distinct, kernel_matrix, BackgroundScale, GinibreKernel, IndexConvention, KernelMatrix};
use crate::meanfield::{emf_energy, MeanFieldProblem, MeanFieldResult};
use crate::numerics::{
    log_factorial_ratio, regularized_gamma, CompensatedSum, ComplexMatrix, LogDetOptions, LogValue, PhaseValue,
    PivotedCholesky, Sign,
};

use super::series::ginibre_log_z_exact;

/// Below this norm of `K_inf^{-1} T` the correction is summed as `-sum tr(X^k)/k`.
const SERIES_NORM_LIMIT: f64 = 0.1;
const SERIES_MAX_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    /// `K_{n+M}`, exact for `n` mobile particles.
    Finite,
    /// `K_inf`, translation covariant.
    Infinite,
}

impl std::str::FromStr for KernelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(KernelMode::Finite),
            "infinite" => Ok(KernelMode::Infinite),
            other => Err(Error::InvalidConfig(format!("unknown kernel mode '{other}'"))),
        }
    }
}

/// Named terms of the pinned-charge formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedDecomposition {
    pub particles: usize,
    pub pinned: usize,
    /// `ln Z_{n+M}(0)` at scale `N`.
    pub log_z_ginibre: f64,
    /// `2 H(w)`.
    pub twice_hamiltonian: f64,
    /// `A(M, n)`, entering with a minus sign.
    pub a_term: f64,
    /// `ln det[(pi/N) K_inf]` in the reduced gauge.
    pub log_det_infinite: f64,
    /// `ln det K_{n+M} - ln det K_inf`; zero in infinite mode.
    pub kernel_correction: LogValue,
    pub log_det: f64,
    /// Common shift removed before evaluating `K_inf`.
    pub gauge_shift: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyReport {
    pub mode: KernelMode,
    pub scale: f64,
    pub log_z: LogValue,
    /// `-(1/2) ln Z`.
    pub f: f64,
    pub decomposition: PinnedDecomposition,
}

/// Number of mobile particles for a neutral system, `n = N`.
pub fn neutral_particles(scale: BackgroundScale) -> Result<usize> {
    let n = scale.value();
    if n.fract() != 0.0 || !(1.0..=1e9).contains(&n) {
        return Err(Error::domain(
            "neutral_particles",
            format!("N = {n} is not a particle count"),
        ));
    }
    Ok(n as usize)
}

/// Effective points and their translates by minus the charge-weighted mean translation.
fn reduced_gauge(clusters: &[PointCluster]) -> (Vec<Complex64>, Vec<Complex64>, Complex64) {
    let effective = concatenated_points(clusters);
    let m: usize = clusters.iter().map(|c| c.count()).sum();
    if m == 0 {
        return (effective, Vec::new(), Complex64::new(0.0, 0.0));
    }
    let shift = clusters
        .iter()
        .map(|c| c.translation() * c.count() as f64)
        .sum::<Complex64>()
        / m as f64;
    let reduced = clusters
        .iter()
        .flat_map(|c| {
            let offset = c.translation() - shift;
            c.points().iter().map(move |p| p + offset)
        })
        .collect();
    (effective, reduced, shift)
}

/// `ln det K_{top}(p) - ln det K_inf(q)` for effective points `p` and reduced points `q`.
pub fn kernel_correction(
    scale: BackgroundScale,
    top_index: usize,
    effective: &[Complex64],
    infinite: &KernelMatrix,
) -> Result<LogValue> {
    let m = effective.len();
    if m == 0 {
        return Ok(LogValue::ZERO);
    }
    let n = scale.value();
    let mut tail = vec![PhaseValue::ZERO; m * m];
    for i in 0..m {
        for j in i..m {
            let u = n * effective[i] * effective[j].conj();
            let gamma = regularized_gamma(top_index as u64 + 1, u)?;
            let value = infinite.entry(i, j) * gamma.lower;
            tail[i * m + j] = if i == j {
                PhaseValue::new(value.log_mag(), 0.0)
            } else {
                value
            };
            tail[j * m + i] = value.conj();
        }
    }
    let lead = tail.iter().map(|t| t.log_mag()).fold(f64::NEG_INFINITY, f64::max);
    if lead == f64::NEG_INFINITY {
        return Ok(LogValue::ZERO);
    }
    let scaled = ComplexMatrix::from_fn(m, |i, j| tail[i * m + j].shift_log(-lead).to_complex());
    let base = infinite.to_complex();
    let cholesky = PivotedCholesky::factor(&base, &LogDetOptions::default())?;
    let x = cholesky.solve_matrix(&scaled);
    let log_norm = lead + x.frobenius_norm().ln();
    if log_norm < SERIES_NORM_LIMIT.ln() {
        return Ok(log_series(&x, lead));
    }
    let finite = kernel_matrix(&GinibreKernel::finite(scale, top_index), effective)?.log_det()?;
    if finite.sign() != Sign::Positive {
        return Err(Error::SingularMatrix { step: m, pivot: 0.0 });
    }
    Ok(LogValue::from_f64(finite.log_mag() - cholesky.log_det()))
}

/// `ln det(I - e^lead X) = -sum_k e^{k lead} tr(X^k) / k`.
fn log_series(x: &ComplexMatrix, lead: f64) -> LogValue {
    let mut step = x.clone();
    let factor = lead.exp();
    for i in 0..step.dim() {
        for j in 0..step.dim() {
            step.set(i, j, step.get(i, j) * factor);
        }
    }
    let mut power = x.clone();
    let mut sum = CompensatedSum::new();
    for k in 1..=SERIES_MAX_TERMS {
        let term = power.trace().re / k as f64;
        sum.add(term);
        if term.abs() <= 1e-17 * sum.value().abs() {
            break;
        }
        power = power.matmul(&step);
    }
    -(LogValue::positive(lead) * LogValue::from_f64(sum.value()))
}

/// The pinned-charge partition function for `n_particles` mobile charges at scale `N`.
pub fn log_z_pinned_particles(
    clusters: &[PointCluster],
    n_particles: usize,
    scale: BackgroundScale,
    mode: KernelMode,
) -> Result<FreeEnergyReport> {
    if n_particles == 0 {
        return Err(Error::domain("log_z_pinned", "need at least one mobile particle"));
    }
    let (effective, reduced, gauge_shift) = reduced_gauge(clusters);
    check_distinct(&effective)?;
    let m = effective.len();
    let total = n_particles + m;
    let log_z_ginibre = ginibre_log_z_exact(total, scale)?;
    let twice_hamiltonian = 2.0 * pinned_hamiltonian_points(&effective, scale)?;
    let a_term = log_factorial_ratio_term(m, n_particles, scale);
    let infinite = kernel_matrix(&GinibreKernel::infinite(scale), &reduced)?;
    let log_det_infinite = if m == 0 {
        0.0
    } else {
        let ld = infinite.log_det()?;
        if ld.sign() != Sign::Positive {
            return Err(Error::SingularMatrix { step: m, pivot: 0.0 });
        }
        ld.log_mag()
    };
    let kernel_correction = match mode {
        KernelMode::Infinite => LogValue::ZERO,
        KernelMode::Finite => {
            let top = IndexConvention::RESOLVED.top_index(total)?;
            kernel_correction(scale, top, &effective, &infinite)?
        }
    };
    let log_det = log_det_infinite + kernel_correction.to_f64();
    let log_z = log_z_ginibre + twice_hamiltonian - a_term + log_det;
    if !log_z.is_finite() {
        return Err(Error::NonFinite("pinned log-partition function"));
    }
    Ok(FreeEnergyReport {
        mode,
        scale: scale.value(),
        log_z: LogValue::positive(log_z),
        f: -0.5 * log_z,
        decomposition: PinnedDecomposition {
            particles: n_particles,
            pinned: m,
            log_z_ginibre,
            twice_hamiltonian,
            a_term,
            log_det_infinite,
            kernel_correction,
            log_det,
            gauge_shift,
        },
    })
}

/// `A(M, n)` at scale `N`; equals [`a_mn`] when `n = N`.
fn log_factorial_ratio_term(m: usize, n_particles: usize, scale: BackgroundScale) -> f64 {
    log_factorial_ratio(n_particles as u64, m as u64) - m as f64 * (scale.value() / std::f64::consts::PI).ln()
}

/// [`log_z_pinned_particles`] with `n = N` mobile particles.
pub fn log_z_pinned(clusters: &[PointCluster], scale: BackgroundScale, mode: KernelMode) -> Result<FreeEnergyReport> {
    log_z_pinned_particles(clusters, neutral_particles(scale)?, scale, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEnergy {
    pub report: FreeEnergyReport,
    pub mean_field: MeanFieldResult,
    /// `F - N^2 E_MF`.
    pub f_corr: f64,
}

pub fn correlation_energy(
    clusters: &[PointCluster],
    scale: BackgroundScale,
    mode: KernelMode,
) -> Result<CorrelationEnergy> {
    let mean_field = emf_energy(&MeanFieldProblem::neutral(scale, clusters.to_vec())?)?;
    let report = log_z_pinned(clusters, scale, mode)?;
    Ok(CorrelationEnergy {
        f_corr: report.f - mean_field.energy,
        report,
        mean_field,
    })
}

/// `F_corr(moved) - F_corr(base)` for a rigid motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationShift {
    /// Exact change of `-H - E_MF`; zero up to rounding.
    pub mismatch: f64,
    pub correction_base: LogValue,
    pub correction_moved: LogValue,
    /// `mismatch - (correction_moved - correction_base) / 2`.
    pub shift: LogValue,
    /// Difference of the two full evaluations, limited by cancellation at the `N^2` scale.
    pub direct: f64,
    pub f_corr_base: f64,
    pub f_corr_moved: f64,
}

fn correlation_shift(
    base: &[PointCluster],
    moved: &[PointCluster],
    scale: BackgroundScale,
    mode: KernelMode,
    mismatch: f64,
) -> Result<CorrelationShift> {
    let before = correlation_energy(base, scale, mode)?;
    let after = correlation_energy(moved, scale, mode)?;
    let correction_base = before.report.decomposition.kernel_correction;
    let correction_moved = after.report.decomposition.kernel_correction;
    let shift = LogValue::from_f64(mismatch) - (correction_moved - correction_base).scale(0.5);
    Ok(CorrelationShift {
        mismatch,
        correction_base,
        correction_moved,
        shift,
        direct: after.f_corr - before.f_corr,
        f_corr_base: before.f_corr,
        f_corr_moved: after.f_corr,
    })
}

/// `F_corr(a) - F_corr(0)` for one cluster moved rigidly from rest by `a`.
///
/// The Hamiltonian and mean-field parts cancel in closed form up to
/// `-N Re(conj(a)(sum w - M z_0))` with `z_0` the hole centre, which is the centroid and
/// leaves only rounding.
pub fn translation_shift(
    cluster: &PointCluster,
    scale: BackgroundScale,
    translation: Complex64,
    mode: KernelMode,
) -> Result<CorrelationShift> {
    let rest = cluster.with_translation(Complex64::new(0.0, 0.0));
    let moved = cluster.with_translation(translation);
    let sum: Complex64 = rest.points().iter().sum();
    let count = rest.count() as f64;
    let centre = sum / count * count;
    let mismatch = -scale.value() * (translation.conj() * (sum - centre)).re;
    correlation_shift(&[rest], &[moved], scale, mode, mismatch)
}

/// `F_corr` of all clusters rotated about the origin by `angle`, minus its unrotated value.
pub fn rotation_shift(
    clusters: &[PointCluster],
    scale: BackgroundScale,
    angle: f64,
    mode: KernelMode,
) -> Result<CorrelationShift> {
    let rotated: Vec<PointCluster> = clusters.iter().map(|c| c.rotated(angle)).collect();
    correlation_shift(clusters, &rotated, scale, mode, 0.0)
}
