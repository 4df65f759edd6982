//! Dense complex matrices and log-determinants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::logvalue::{LogValue, PhaseValue, Sign};
use super::summation::CompensatedSum;

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { n, data }
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("ComplexMatrix::from_rows", "matrix is not square"));
        }
        Ok(ComplexMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.n + j] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Submatrix with the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<Complex64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    fn swap_symmetric(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.n;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
        for i in 0..n {
            self.data.swap(i * n + a, i * n + b);
        }
    }
}

/// Tolerances of the log-determinant routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDetOptions {
    /// Largest accepted `|m_ij - conj(m_ji)|`, relative to `max(1, max |m_ij|)`.
    pub hermitian_tolerance: f64,
    /// Pivots at or below this absolute value count as breakdown.
    pub pivot_floor: f64,
}

impl Default for LogDetOptions {
    fn default() -> Self {
        LogDetOptions {
            hermitian_tolerance: 1e-12,
            pivot_floor: 1e-300,
        }
    }
}

/// Checks `m_ij = conj(m_ji)` within tolerance.
pub fn check_hermitian(m: &ComplexMatrix, tolerance: f64) -> Result<()> {
    let scale = m.max_abs().max(1.0);
    for i in 0..m.dim() {
        for j in i..m.dim() {
            let deviation = (m.get(i, j) - m.get(j, i).conj()).norm();
            if deviation > tolerance * scale {
                return Err(Error::NotHermitian {
                    row: i,
                    col: j,
                    deviation,
                });
            }
        }
    }
    Ok(())
}

/// Cholesky factor with diagonal pivoting: `m[perm[i]][perm[j]] = (L L*)[i][j]`.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    lower: ComplexMatrix,
    perm: Vec<usize>,
    log_det: f64,
}

enum Factorization {
    Positive(PivotedCholesky),
    Indefinite,
}

fn factor_cholesky(m: &ComplexMatrix, options: &LogDetOptions) -> Result<Factorization> {
    let n = m.dim();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = m.max_abs();
    let mut log_det = CompensatedSum::new();
    for k in 0..n {
        let mut p = k;
        let mut best = a.get(k, k).re;
        for i in (k + 1)..n {
            let d = a.get(i, i).re;
            if d > best {
                best = d;
                p = i;
            }
        }
        if !best.is_finite() {
            return Err(Error::NonFinite("Cholesky pivot"));
        }
        if best <= options.pivot_floor {
            // A positive semidefinite remainder with vanishing diagonal vanishes entirely.
            let off_diagonal = ((k + 1)..n)
                .flat_map(|i| (k..i).map(move |j| (i, j)))
                .map(|(i, j)| a.get(i, j).norm())
                .fold(0.0, f64::max);
            if best < -1e-13 * scale || off_diagonal > 1e-13 * scale {
                return Ok(Factorization::Indefinite);
            }
            return Err(Error::SingularMatrix { step: k, pivot: best });
        }
        a.swap_symmetric(k, p);
        perm.swap(k, p);
        let pivot = best.sqrt();
        log_det.add(best.ln());
        a.set(k, k, Complex64::new(pivot, 0.0));
        for i in (k + 1)..n {
            let v = a.get(i, k) / pivot;
            a.set(i, k, v);
        }
        for j in (k + 1)..n {
            let ljk = a.get(j, k).conj();
            for i in (k + 1)..n {
                let v = a.get(i, j) - a.get(i, k) * ljk;
                a.set(i, j, v);
            }
            let d = a.get(j, j).re;
            a.set(j, j, Complex64::new(d, 0.0));
        }
    }
    let lower = ComplexMatrix::from_fn(n, |i, j| if j <= i { a.get(i, j) } else { Complex64::new(0.0, 0.0) });
    Ok(Factorization::Positive(PivotedCholesky {
        lower,
        perm,
        log_det: log_det.value(),
    }))
}

impl PivotedCholesky {
    /// Factors a Hermitian positive definite matrix.
    pub fn factor(m: &ComplexMatrix, options: &LogDetOptions) -> Result<Self> {
        check_hermitian(m, options.hermitian_tolerance)?;
        match factor_cholesky(m, options)? {
            Factorization::Positive(f) => Ok(f),
            Factorization::Indefinite => Err(Error::domain("PivotedCholesky::factor", "matrix is indefinite")),
        }
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Solves `m x = b` for a single right-hand side.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.perm.len();
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().take(i) {
                s -= self.lower.get(i, k) * yk;
            }
            y[i] = s / self.lower.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.lower.get(k, i).conj() * yk;
            }
            y[i] = s / self.lower.get(i, i);
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// Solves `m X = B` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = b.dim();
        let mut out = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col: Vec<Complex64> = (0..n).map(|i| b.get(i, j)).collect();
            for (i, v) in self.solve(&col).into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

/// Determinant of a general square matrix by LU with partial pivoting.
///
/// Returns zero when an exact zero pivot appears.
pub fn lu_determinant(rows: &[Vec<Complex64>]) -> Result<PhaseValue> {
    let n = rows.len();
    if n == 0 {
        return Ok(PhaseValue::ONE);
    }
    let mut a = ComplexMatrix::from_rows(rows)?;
    let mut log_mag = CompensatedSum::new();
    let mut phase = 0.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a.get(x, k).norm().total_cmp(&a.get(y, k).norm()))
            .unwrap_or(k);
        let pivot = a.get(p, k);
        if pivot.norm() == 0.0 {
            return Ok(PhaseValue::ZERO);
        }
        if !pivot.norm().is_finite() {
            return Err(Error::NonFinite("LU pivot"));
        }
        if p != k {
            for j in 0..n {
                let t = a.get(k, j);
                a.set(k, j, a.get(p, j));
                a.set(p, j, t);
            }
            phase += std::f64::consts::PI;
        }
        log_mag.add(pivot.norm().ln());
        phase += pivot.arg();
        for i in (k + 1)..n {
            let factor = a.get(i, k) / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in (k + 1)..n {
                let v = a.get(i, j) - factor * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    Ok(PhaseValue::new(log_mag.value(), phase))
}

/// Log-determinant of a Hermitian matrix.
///
/// Diagonal-pivoted Cholesky handles the positive definite case. An indefinite matrix
/// is passed to a partially pivoted LU factorization and the sign of the real
/// determinant is reported.
pub fn hermitian_logdet(m: &ComplexMatrix) -> Result<LogValue> {
    hermitian_logdet_with(m, &LogDetOptions::default())
}

pub fn hermitian_logdet_with(m: &ComplexMatrix, options: &LogDetOptions) -> Result<LogValue> {
    check_hermitian(m, options.hermitian_tolerance)?;
    if m.dim() == 0 {
        return Ok(LogValue::ONE);
    }
    match factor_cholesky(m, options)? {
        Factorization::Positive(f) => Ok(LogValue::positive(f.log_det)),
        Factorization::Indefinite => {
            let rows: Vec<Vec<Complex64>> = (0..m.dim())
                .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
                .collect();
            let det = lu_determinant(&rows)?;
            if det.is_zero() || det.log_mag() < options.pivot_floor.ln() {
                return Err(Error::SingularMatrix {
                    step: m.dim(),
                    pivot: det.modulus(),
                });
            }
            let sign = if det.phase().cos() >= 0.0 {
                Sign::Positive
            } else {
                Sign::Negative
            };
            Ok(LogValue::new(det.log_mag(), sign))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_diagonal() {
        let d = hermitian_logdet(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(d.log_mag(), 0.0);
        assert_eq!(d.sign(), Sign::Positive);
        let m = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(3.0, 0.0)]]).unwrap();
        assert!((hermitian_logdet(&m).unwrap().log_mag() - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn nearly_singular_two_by_two() {
        let q = Complex64::from_polar((-8.0f64).exp(), 0.7);
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), q], vec![q.conj(), c(1.0, 0.0)]]).unwrap();
        let d = hermitian_logdet(&m).unwrap();
        let expected = (-(-16.0f64).exp()).ln_1p();
        assert!((d.log_mag() - expected).abs() < 2.5e-16);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.4, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(hermitian_logdet(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(hermitian_logdet(&m), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn indefinite_matrix_uses_lu() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let d = hermitian_logdet(&m).unwrap();
        assert_eq!(d.sign(), Sign::Negative);
        assert!((d.log_mag() - 3f64.ln()).abs() < 1e-15);
        let zero_diag =
            ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]).unwrap();
        let d = hermitian_logdet(&zero_diag).unwrap();
        assert_eq!(d.sign(), Sign::Negative);
        assert!(d.log_mag().abs() < 1e-15);
    }

    #[test]
    fn lu_determinant_of_permutation() {
        let rows = vec![
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ];
        let d = lu_determinant(&rows).unwrap().to_complex();
        assert!((d - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cholesky_solve_round_trip() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(4.0, 0.0), c(1.0, 1.0), c(0.0, -0.5)],
            vec![c(1.0, -1.0), c(3.0, 0.0), c(0.2, 0.0)],
            vec![c(0.0, 0.5), c(0.2, 0.0), c(5.0, 0.0)],
        ])
        .unwrap();
        let f = PivotedCholesky::factor(&m, &LogDetOptions::default()).unwrap();
        let b = vec![c(1.0, 2.0), c(-1.0, 0.0), c(0.5, 0.5)];
        let x = f.solve(&b);
        for (i, bi) in b.iter().enumerate() {
            let r: Complex64 = (0..3).map(|j| m.get(i, j) * x[j]).sum();
            assert!((r - bi).norm() < 1e-14);
        }
        let inv = f.solve_matrix(&m);
        assert!((inv.trace() - c(3.0, 0.0)).norm() < 1e-13);
    }
}
