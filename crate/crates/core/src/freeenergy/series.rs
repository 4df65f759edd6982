//! Exact Ginibre partition functions and the asymptotic expansions compared against them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BackgroundScale;
use crate::numerics::{log_factorial_ratio, sum_log_factorials, zeta_prime_minus_one, CompensatedSum};

/// Order of the neglected remainder of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Remainder {
    LittleOOne,
    LittleON,
}

/// `a N^2 + b N ln N + c N + d sqrt(N) + e ln N + f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionSeries {
    pub coeff_n2: f64,
    pub coeff_n_log_n: f64,
    pub coeff_n: f64,
    pub coeff_sqrt_n: f64,
    pub coeff_log_n: f64,
    pub coeff_const: f64,
    pub remainder: Remainder,
    /// Constants kept as labels because they have no closed form here.
    pub symbolic_constants: Vec<String>,
}

impl ExpansionSeries {
    pub fn evaluate(&self, n: f64) -> f64 {
        let mut s = CompensatedSum::new();
        s.add(self.coeff_n2 * n * n);
        s.add(self.coeff_n_log_n * n * n.ln());
        s.add(self.coeff_n * n);
        s.add(self.coeff_sqrt_n * n.sqrt());
        s.add(self.coeff_log_n * n.ln());
        s.add(self.coeff_const);
        s.value()
    }

    /// Termwise difference; symbolic constants of `other` are listed with a minus sign.
    pub fn minus(&self, other: &ExpansionSeries) -> ExpansionSeries {
        let mut symbolic_constants = self.symbolic_constants.clone();
        symbolic_constants.extend(other.symbolic_constants.iter().map(|s| format!("-({s})")));
        ExpansionSeries {
            coeff_n2: self.coeff_n2 - other.coeff_n2,
            coeff_n_log_n: self.coeff_n_log_n - other.coeff_n_log_n,
            coeff_n: self.coeff_n - other.coeff_n,
            coeff_sqrt_n: self.coeff_sqrt_n - other.coeff_sqrt_n,
            coeff_log_n: self.coeff_log_n - other.coeff_log_n,
            coeff_const: self.coeff_const - other.coeff_const,
            remainder: self.remainder,
            symbolic_constants,
        }
    }
}

/// `ln Z_J = J ln pi + sum_{k<=J} ln k! - (J(J+1)/2) ln N` for `J` free particles
/// with Lebesgue measure and weight `exp(-N sum |z|^2)`.
pub fn ginibre_log_z_exact(j: usize, scale: BackgroundScale) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("ginibre_log_z_exact", "need at least one particle"));
    }
    let jf = j as f64;
    let mut s = CompensatedSum::new();
    s.add(jf * PI.ln());
    s.add(sum_log_factorials(j as u64));
    s.add(-0.5 * jf * (jf + 1.0) * scale.value().ln());
    Ok(s.value())
}

/// Asymptotic form of `-ln Z_J` at scale `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GinibreAsymptotic {
    /// Prediction for `-ln Z_J`.
    pub value: f64,
    /// The `J = N` part as a series in `J`.
    pub series: ExpansionSeries,
    /// `-(J(J+1)/2) ln(J/N)`, zero when `J = N`.
    pub mismatch: f64,
}

/// The `J = N` expansion of `-ln Z_N` under Lebesgue measure.
///
/// The linear coefficient carries `-ln pi` on top of `-(ln(2 pi)/2 - 1)`: each of the
/// `N` integrals is taken against `dz` rather than `dz / pi`.
pub fn ginibre_series() -> ExpansionSeries {
    ExpansionSeries {
        coeff_n2: 0.75,
        coeff_n_log_n: -0.5,
        coeff_n: -((2.0 * PI).ln() / 2.0 - 1.0) - PI.ln(),
        coeff_sqrt_n: 0.0,
        coeff_log_n: -5.0 / 12.0,
        coeff_const: -zeta_prime_minus_one() - (2.0 * PI).ln() / 2.0,
        remainder: Remainder::LittleOOne,
        symbolic_constants: Vec::new(),
    }
}

pub fn ginibre_log_z_asymptotic(j: usize, scale: BackgroundScale) -> Result<GinibreAsymptotic> {
    if j < 2 {
        return Err(Error::domain("ginibre_log_z_asymptotic", "need at least two particles"));
    }
    let jf = j as f64;
    let series = ginibre_series();
    let mismatch = -0.5 * jf * (jf + 1.0) * (jf / scale.value()).ln();
    Ok(GinibreAsymptotic {
        value: series.evaluate(jf) + mismatch,
        series,
        mismatch,
    })
}

/// Residual `asymptotic - (-ln Z_exact)` at `J = N`.
pub fn ginibre_residual(n: usize) -> Result<f64> {
    let scale = BackgroundScale::new(n as f64)?;
    Ok(ginibre_log_z_asymptotic(n, scale)?.value + ginibre_log_z_exact(n, scale)?)
}

/// `-ln Z_N - (series without its constant)` at `J = N`; tends to `zeta'(-1) + ln(2 pi)/2`
/// with a `1/N` correction.
pub fn ginibre_constant_estimate(n: usize) -> Result<f64> {
    let scale = BackgroundScale::new(n as f64)?;
    let mut series = ginibre_series();
    series.coeff_const = 0.0;
    Ok(series.evaluate(n as f64) + ginibre_log_z_exact(n, scale)?)
}

/// Richardson extrapolation `2 e(2N) - e(N)` of [`ginibre_constant_estimate`].
pub fn ginibre_constant_extrapolated(n: usize) -> Result<f64> {
    Ok(2.0 * ginibre_constant_estimate(2 * n)? - ginibre_constant_estimate(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmnMode {
    Exact,
    Asymptotic,
}

/// `A(M, N) = ln((N+M)!/N!) - M ln(N/pi)`, exactly or by its Stirling form.
pub fn a_mn(m: usize, n: usize, mode: AmnMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("a_mn", "N must be positive"));
    }
    let nf = n as f64;
    Ok(match mode {
        AmnMode::Exact => log_factorial_ratio(n as u64, m as u64) - m as f64 * (nf / PI).ln(),
        AmnMode::Asymptotic => {
            let c = m as f64 / nf;
            (1.0 + c) * nf * c.ln_1p() - c * nf * (1.0 - PI.ln()) + 0.5 * c.ln_1p()
        }
    })
}

/// Predicted expansion of the correlation free energy of a droplet with holes.
///
/// `n_holes = 0` is the plain disk and reproduces half of the non-`N^2` part of
/// [`ginibre_series`]. Hole determinants are listed in `symbolic_constants`.
pub fn holed_droplet_series(n_holes: usize, outer_radius: f64) -> Result<ExpansionSeries> {
    if !(outer_radius > 0.0) {
        return Err(Error::domain("holed_droplet_series", "outer radius must be positive"));
    }
    let chi = 1.0 - n_holes as f64;
    Ok(ExpansionSeries {
        coeff_n2: 0.0,
        coeff_n_log_n: -0.25,
        coeff_n: -0.5 * ((2.0 * PI).ln() / 2.0 - 1.0) - 0.5 * PI.ln(),
        coeff_sqrt_n: 0.0,
        coeff_log_n: -(6.0 - chi) / 24.0,
        coeff_const: -(2.0 * PI).ln() / 4.0 - chi * zeta_prime_minus_one() / 2.0 + outer_radius.ln() / 12.0,
        remainder: Remainder::LittleOOne,
        symbolic_constants: (1..=n_holes)
            .map(|k| format!("(1/4) ln det_zeta(Laplacian on H_{k})"))
            .collect(),
    })
}

/// The prediction for `F_corr(all) - sum_j F_corr(j)`, term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiholePrediction {
    /// `((n-1)/4) N ln N`.
    pub n_log_n: f64,
    /// `((n-1)/2)(ln(2 pi)/2 - 1) N`.
    pub linear: f64,
    /// `(n-1)(N/2) ln pi`, the Lebesgue-measure counterpart of the linear term.
    pub lebesgue_measure: f64,
    /// `(5(n-1)/24) ln N`.
    pub log_n: f64,
    /// `(n-1) zeta'(-1) / 2`.
    pub zeta: f64,
    /// `(n-1) ln(2 pi) / 4`.
    pub log_two_pi: f64,
    /// `(1/24)(ln(1+c) - sum ln(1+c_j))`.
    pub radius_bracket: f64,
    pub total: f64,
}

pub fn multihole_prediction(n: f64, c_total: f64, charges: &[f64]) -> Result<MultiholePrediction> {
    let sum: f64 = charges.iter().sum();
    if (sum - c_total).abs() > 1e-12 * c_total.abs().max(1.0) {
        return Err(Error::ChargeMismatch { total: c_total, sum });
    }
    if charges.is_empty() {
        return Err(Error::domain("multihole_prediction", "need at least one cluster"));
    }
    let k = charges.len() as f64 - 1.0;
    let n_log_n = k / 4.0 * n * n.ln();
    let linear = 0.5 * ((2.0 * PI).ln() / 2.0 - 1.0) * k * n;
    let lebesgue_measure = k * n / 2.0 * PI.ln();
    let log_n = 5.0 * k / 24.0 * n.ln();
    let zeta = k * zeta_prime_minus_one() / 2.0;
    let log_two_pi = k * (2.0 * PI).ln() / 4.0;
    let radius_bracket = (c_total.ln_1p() - charges.iter().map(|c| c.ln_1p()).sum::<f64>()) / 24.0;
    let total = [
        n_log_n,
        linear,
        lebesgue_measure,
        log_n,
        zeta,
        log_two_pi,
        radius_bracket,
    ]
    .into_iter()
    .collect::<CompensatedSum>()
    .value();
    Ok(MultiholePrediction {
        n_log_n,
        linear,
        lebesgue_measure,
        log_n,
        zeta,
        log_two_pi,
        radius_bracket,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale(n: f64) -> BackgroundScale {
        BackgroundScale::new(n).unwrap()
    }

    #[test]
    fn exact_examples() {
        assert!((ginibre_log_z_exact(1, scale(1.0)).unwrap() - PI.ln()).abs() < 1e-15);
        assert!((ginibre_log_z_exact(2, scale(1.0)).unwrap() - (2.0 * PI * PI).ln()).abs() < 1e-15);
        assert!((ginibre_log_z_exact(2, scale(2.0)).unwrap() - (PI * PI / 4.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_residual_shrinks() {
        let mut last = f64::INFINITY;
        for n in [50usize, 100, 200, 400, 800] {
            let r = ginibre_residual(n).unwrap().abs();
            assert!(r < last);
            last = r;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn mismatched_residual_shrinks() {
        let mut last = f64::INFINITY;
        for n in [50usize, 100, 200, 400] {
            let s = scale(n as f64);
            let r = (ginibre_log_z_asymptotic(2 * n, s).unwrap().value + ginibre_log_z_exact(2 * n, s).unwrap()).abs();
            assert!(r < last);
            last = r;
        }
    }

    #[test]
    fn constant_is_recovered() {
        let target = zeta_prime_minus_one() + (2.0 * PI).ln() / 2.0;
        let raw = ginibre_constant_estimate(1000).unwrap();
        assert!((raw - target).abs() < 5e-4);
        let extrapolated = ginibre_constant_extrapolated(500).unwrap();
        assert!((extrapolated - target).abs() < 1e-6);
    }

    #[test]
    fn amn_examples() {
        let exact = a_mn(1, 10, AmnMode::Exact).unwrap();
        assert!((exact - (11f64.ln() - (10.0 / PI).ln())).abs() < 1e-15);
        assert_eq!(a_mn(0, 10, AmnMode::Exact).unwrap(), 0.0);
        assert_eq!(a_mn(0, 10, AmnMode::Asymptotic).unwrap(), 0.0);
        let mut last = f64::INFINITY;
        for n in [100usize, 1000, 10000] {
            let m = n / 10;
            let r = (a_mn(m, n, AmnMode::Exact).unwrap() - a_mn(m, n, AmnMode::Asymptotic).unwrap()).abs();
            assert!(r < last);
            last = r;
        }
    }

    #[test]
    fn holed_droplet_series_examples() {
        let disk = holed_droplet_series(0, 1.0).unwrap();
        assert!((disk.coeff_log_n + 5.0 / 24.0).abs() < 1e-16);
        let one = holed_droplet_series(1, 1.0).unwrap();
        assert!((one.coeff_log_n - disk.coeff_log_n - (-1.0 / 24.0)).abs() < 1e-16);
        assert_eq!(one.symbolic_constants.len(), 1);
        let g = ginibre_series();
        assert!((disk.coeff_n_log_n - 0.5 * g.coeff_n_log_n).abs() < 1e-16);
        assert!((disk.coeff_n - 0.5 * g.coeff_n).abs() < 1e-16);
        assert!((disk.coeff_log_n - 0.5 * g.coeff_log_n).abs() < 1e-16);
        assert!((disk.coeff_const - 0.5 * g.coeff_const).abs() < 1e-16);
    }

    #[test]
    fn prediction_examples() {
        let single = multihole_prediction(400.0, 0.02, &[0.02]).unwrap();
        assert_eq!(single.total, 0.0);
        let two = multihole_prediction(400.0, 0.02, &[0.01, 0.01]).unwrap();
        assert!((two.radius_bracket - (0.02f64.ln_1p() - 2.0 * 0.01f64.ln_1p()) / 24.0).abs() < 1e-18);
        let three = multihole_prediction(400.0, 0.03, &[0.01, 0.01, 0.01]).unwrap();
        assert!((three.n_log_n - 2.0 * two.n_log_n).abs() < 1e-9);
        assert!((three.lebesgue_measure - 2.0 * two.lebesgue_measure).abs() < 1e-9);
        assert!(matches!(
            multihole_prediction(400.0, 0.05, &[0.01, 0.01]),
            Err(Error::ChargeMismatch { .. })
        ));
    }
}
