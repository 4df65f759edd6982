//! Quadrature and finite-difference checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{GinibreKernel, KernelOrder};
use crate::numerics::{integrate_composite, regularized_gamma};

/// Distance from the nearest integer above which a trace is rejected.
pub const TRACE_INTEGER_TOLERANCE: f64 = 1e-3;
const TRACE_PANELS: usize = 64;
const TAIL_LIMIT: f64 = 1e-10;

/// Radius beyond which the diagonal of a finite kernel is negligible.
pub fn default_trace_cutoff(kernel: &GinibreKernel) -> Result<f64> {
    match kernel.order() {
        KernelOrder::Finite { top_index } => {
            let a = top_index as f64 + 1.0;
            Ok(((a + 12.0 * a.sqrt() + 60.0) / kernel.scale().value()).sqrt())
        }
        KernelOrder::Infinite => Err(Error::domain("kernel_trace", "the infinite kernel has no finite trace")),
    }
}

/// `2 pi int_0^cutoff K(r, r) r dr` by composite Gauss-Legendre quadrature.
pub fn kernel_trace(kernel: &GinibreKernel, cutoff: f64, nodes: usize) -> Result<f64> {
    let top = match kernel.order() {
        KernelOrder::Finite { top_index } => top_index,
        KernelOrder::Infinite => {
            return Err(Error::domain("kernel_trace", "the infinite kernel has no finite trace"));
        }
    };
    let n = kernel.scale().value();
    let a = top as u64 + 1;
    let tail = regularized_gamma(a, Complex64::new(n * cutoff * cutoff, 0.0))?
        .upper
        .modulus();
    if n * cutoff * cutoff * tail > TAIL_LIMIT {
        return Err(Error::domain(
            "kernel_trace",
            format!("cutoff {cutoff} leaves a tail of order {tail:e}"),
        ));
    }
    let diagonal = |r: f64| match regularized_gamma(a, Complex64::new(n * r * r, 0.0)) {
        Ok(g) => 2.0 * n * r * g.upper.modulus(),
        Err(_) => f64::NAN,
    };
    let trace = integrate_composite(diagonal, 0.0, cutoff, TRACE_PANELS, nodes);
    if !trace.is_finite() {
        return Err(Error::NonFinite("kernel trace"));
    }
    if (trace - trace.round()).abs() > TRACE_INTEGER_TOLERANCE {
        return Err(Error::NonIntegerTrace { value: trace });
    }
    Ok(trace)
}

/// Central differences of `f` in both coordinates, returned as `df/dx + i df/dy`.
pub fn finite_difference_gradient<F>(f: F, at: Complex64, step: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    if !(step > 0.0) {
        return Err(Error::domain("finite_difference_gradient", "step must be positive"));
    }
    let dx = (f(at + step)? - f(at - step)?) / (2.0 * step);
    let i_step = Complex64::new(0.0, step);
    let dy = (f(at + i_step)? - f(at - i_step)?) / (2.0 * step);
    Ok(Complex64::new(dx, dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BackgroundScale;

    #[test]
    fn traces_are_term_counts() {
        for n in [1.0, 10.0] {
            let s = BackgroundScale::new(n).unwrap();
            for top in [0usize, 4, 10] {
                let k = GinibreKernel::finite(s, top);
                let t = kernel_trace(&k, default_trace_cutoff(&k).unwrap(), 16).unwrap();
                assert!((t - (top + 1) as f64).abs() < 1e-6, "{t}");
            }
        }
    }

    #[test]
    fn short_cutoff_is_rejected() {
        let k = GinibreKernel::finite(BackgroundScale::new(1.0).unwrap(), 4);
        assert!(kernel_trace(&k, 1.0, 16).is_err());
        assert!(kernel_trace(&GinibreKernel::infinite(BackgroundScale::new(1.0).unwrap()), 5.0, 16).is_err());
    }

    #[test]
    fn gradient_examples() {
        let g = finite_difference_gradient(|a| Ok(a.norm_sqr()), Complex64::new(1.0, 0.0), 1e-5).unwrap();
        assert!((g - Complex64::new(2.0, 0.0)).norm() < 1e-9);
        let g = finite_difference_gradient(|_| Ok(3.0), Complex64::new(0.3, 0.2), 1e-3).unwrap();
        assert_eq!(g, Complex64::new(0.0, 0.0));
    }
}
