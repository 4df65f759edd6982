//! Ginibre correlation kernels and the scaled kernel matrices built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_logdet, regularized_gamma, ComplexMatrix, IncompleteGamma, LogValue, PhaseValue};

/// Log-magnitudes below this are stored as exact zeros in kernel matrices.
pub const UNDERFLOW_LOG_MAG: f64 = -745.0;

/// Points closer than this are treated as coincident.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-14;

/// The density scale `N` of the confining potential `N |x|^2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BackgroundScale(f64);

impl BackgroundScale {
    pub fn new(n: f64) -> Result<Self> {
        if n > 0.0 && n.is_finite() {
            Ok(BackgroundScale(n))
        } else {
            Err(Error::domain(
                "BackgroundScale::new",
                format!("scale must be positive, got {n}"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `ln(N / pi)`, the log of the diagonal of the infinite kernel.
    pub fn log_density(self) -> f64 {
        (self.0 / PI).ln()
    }
}

impl TryFrom<f64> for BackgroundScale {
    type Error = Error;

    fn try_from(n: f64) -> Result<Self> {
        BackgroundScale::new(n)
    }
}

impl From<BackgroundScale> for f64 {
    fn from(s: BackgroundScale) -> f64 {
        s.0
    }
}

/// How the top power `J_top` of a finite kernel relates to a particle count `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexConvention {
    /// Sum over `j = 0..J-1`; the kernel integrates to `J` on the diagonal.
    ParticleCount,
    /// Sum over `j = 0..J`, which integrates to `J + 1`.
    Inclusive,
}

impl IndexConvention {
    /// The convention used throughout the crate, fixed by the diagonal trace.
    pub const RESOLVED: IndexConvention = IndexConvention::ParticleCount;

    pub fn top_index(self, particles: usize) -> Result<usize> {
        match self {
            IndexConvention::ParticleCount => particles
                .checked_sub(1)
                .ok_or_else(|| Error::domain("IndexConvention::top_index", "need at least one particle")),
            IndexConvention::Inclusive => Ok(particles),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            IndexConvention::ParticleCount => "J particles -> powers j = 0..J-1 (trace J)",
            IndexConvention::Inclusive => "J particles -> powers j = 0..J (trace J+1)",
        }
    }
}

/// Truncation order of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelOrder {
    /// Powers `j = 0..=top_index`.
    Finite {
        top_index: usize,
    },
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GinibreKernel {
    scale: BackgroundScale,
    order: KernelOrder,
}

impl GinibreKernel {
    pub fn infinite(scale: BackgroundScale) -> Self {
        GinibreKernel {
            scale,
            order: KernelOrder::Infinite,
        }
    }

    pub fn finite(scale: BackgroundScale, top_index: usize) -> Self {
        GinibreKernel {
            scale,
            order: KernelOrder::Finite { top_index },
        }
    }

    /// Kernel of a `particles`-point ensemble under the resolved index convention.
    pub fn for_particles(scale: BackgroundScale, particles: usize) -> Result<Self> {
        Ok(Self::finite(scale, IndexConvention::RESOLVED.top_index(particles)?))
    }

    pub fn scale(&self) -> BackgroundScale {
        self.scale
    }

    pub fn order(&self) -> KernelOrder {
        self.order
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<PhaseValue> {
        match self.order {
            KernelOrder::Infinite => Ok(eval_infinite(self.scale, z, w)),
            KernelOrder::Finite { top_index } => eval_finite(self.scale, top_index, z, w),
        }
    }
}

/// `K_inf(z, w) = (N/pi) exp(-(N/2)(|z|^2 + |w|^2 - 2 z conj(w)))`.
pub fn eval_infinite(scale: BackgroundScale, z: Complex64, w: Complex64) -> PhaseValue {
    let n = scale.value();
    let log_mag = scale.log_density() - 0.5 * n * (z - w).norm_sqr();
    let phase = n * (z * w.conj()).im;
    PhaseValue::new(log_mag, phase)
}

/// Infinite kernel together with the incomplete gamma split at `u = N z conj(w)`.
///
/// The finite kernel is `K_inf * Q(J_top + 1, u)` and the remainder `K_inf - K_fin`
/// is `K_inf * P(J_top + 1, u)`.
pub fn finite_kernel_parts(
    scale: BackgroundScale,
    top_index: usize,
    z: Complex64,
    w: Complex64,
) -> Result<(PhaseValue, IncompleteGamma)> {
    let u = scale.value() * z * w.conj();
    let gamma = regularized_gamma(top_index as u64 + 1, u)?;
    Ok((eval_infinite(scale, z, w), gamma))
}

/// `exp(-(N/2)(|z|^2 + |w|^2)) sum_{j <= J_top} N^{j+1} (z conj(w))^j / (pi j!)`.
pub fn eval_finite(scale: BackgroundScale, top_index: usize, z: Complex64, w: Complex64) -> Result<PhaseValue> {
    let (infinite, gamma) = finite_kernel_parts(scale, top_index, z, w)?;
    Ok(infinite * gamma.upper)
}

/// Rejects point sets with two entries closer than [`COINCIDENCE_TOLERANCE`].
pub fn check_distinct(points: &[Complex64]) -> Result<()> {
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if (points[i] - points[j]).norm() <= COINCIDENCE_TOLERANCE {
                return Err(Error::DuplicatePoints { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Hermitian matrix `(pi/N) K(p_i, p_j)` stored entrywise in log-polar form.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    dim: usize,
    entries: Vec<PhaseValue>,
    prescale: f64,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> PhaseValue {
        self.entries[i * self.dim + j]
    }

    /// The factor `pi / N` applied to every kernel value.
    pub fn prescale(&self) -> f64 {
        self.prescale
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| self.entry(i, j).to_complex())
    }

    pub fn log_det(&self) -> Result<LogValue> {
        hermitian_logdet(&self.to_complex())
    }

    /// Largest log-magnitude over all entries, `-inf` for the zero matrix.
    pub fn max_log_mag(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.log_mag())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn clamp(value: PhaseValue) -> PhaseValue {
    if value.log_mag() < UNDERFLOW_LOG_MAG {
        PhaseValue::ZERO
    } else {
        value
    }
}

/// Builds `(pi/N) K(p_i, p_j)` from `entry(i, j)` evaluated on the upper triangle.
pub(crate) fn assemble_hermitian(
    dim: usize,
    prescale: f64,
    mut entry: impl FnMut(usize, usize) -> Result<PhaseValue>,
) -> Result<KernelMatrix> {
    let log_prescale = prescale.ln();
    let mut entries = vec![PhaseValue::ZERO; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let value = clamp(entry(i, j)?.shift_log(log_prescale));
            if i == j {
                entries[i * dim + i] = PhaseValue::new(value.log_mag(), 0.0);
            } else {
                entries[i * dim + j] = value;
                entries[j * dim + i] = value.conj();
            }
        }
    }
    Ok(KernelMatrix { dim, entries, prescale })
}

/// The matrix `[(pi/N) K(p_i, p_j)]` of a kernel at distinct points.
pub fn kernel_matrix(kernel: &GinibreKernel, points: &[Complex64]) -> Result<KernelMatrix> {
    check_distinct(points)?;
    let prescale = PI / kernel.scale().value();
    assemble_hermitian(points.len(), prescale, |i, j| kernel.eval(points[i], points[j]))
}

/// Shape `C sqrt(N) exp(-C N (||z| - R| + ||w| - R|))` bounding `|K_{N+M} - K_inf|`, with `R^2 = 1 + M/N`.
pub fn bound_finite_vs_infinite(
    scale: BackgroundScale,
    m: usize,
    z: Complex64,
    w: Complex64,
    constant: f64,
) -> Result<f64> {
    let n = scale.value();
    let radius = (1.0 + m as f64 / n).sqrt();
    for p in [z, w] {
        if p.norm() >= radius {
            return Err(Error::OutsideDroplet {
                point: format!("{p}"),
                radius,
            });
        }
    }
    let distance = (z.norm() - radius).abs() + (w.norm() - radius).abs();
    Ok(constant * n.sqrt() * (-constant * n * distance).exp())
}
