//! Log-gamma, exact log-factorials and the constant zeta'(-1).

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::summation::CompensatedSum;

/// Glaisher-Kinkelin constant.
pub const GLAISHER_KINKELIN: f64 = 1.282_427_129_100_622_6;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// zeta(k) for k = 2..=40.
const ZETA_INTEGERS: [f64; 39] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
    1.000_000_000_465_662_9,
    1.000_000_000_232_831_2,
    1.000_000_000_116_415_5,
    1.000_000_000_058_207_7,
    1.000_000_000_029_103_9,
    1.000_000_000_014_552_0,
    1.000_000_000_007_276_0,
    1.000_000_000_003_638_0,
    1.000_000_000_001_819_0,
    1.000_000_000_000_909_5,
];

fn zeta_integer(k: usize) -> f64 {
    if k <= 40 {
        ZETA_INTEGERS[k - 2]
    } else {
        let k = k as f64;
        1.0 + 2f64.powf(-k) + 3f64.powf(-k)
    }
}

/// ln Gamma(1 + eps) for |eps| <= 1/2 from its Taylor series.
fn log_gamma_one_plus(eps: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    sum.add(-EULER_GAMMA * eps);
    let mut power = -eps;
    for k in 2..=80 {
        power *= -eps;
        let term = zeta_integer(k) * power / k as f64;
        sum.add(term);
        if term.abs() < 1e-18 * sum.value().abs().max(1e-300) {
            break;
        }
    }
    sum.value()
}

/// Stirling series, accurate to rounding for y >= 10.
fn log_gamma_stirling(y: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for c in COEFFS.iter().rev() {
        corr = corr * inv2 + c;
    }
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + corr * inv
}

/// Natural logarithm of the gamma function for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if (x - 1.0).abs() <= 0.5 {
        return Ok(log_gamma_one_plus(x - 1.0));
    }
    if (x - 2.0).abs() <= 0.5 {
        let eps = x - 2.0;
        return Ok(eps.ln_1p() + log_gamma_one_plus(eps));
    }
    if x >= 10.0 {
        return Ok(log_gamma_stirling(x));
    }
    let mut y = x;
    let mut product = 1.0;
    while y < 10.0 {
        product *= y;
        y += 1.0;
    }
    Ok(log_gamma_stirling(y) - product.ln())
}

/// Exact `ln((n + m)! / n!)` as a compensated sum of logarithms.
pub fn log_factorial_ratio(n: u64, m: u64) -> f64 {
    let mut sum = CompensatedSum::new();
    for k in (n + 1)..=(n + m) {
        sum.add((k as f64).ln());
    }
    sum.value()
}

/// Exact `ln n!`.
pub fn log_factorial(n: u64) -> f64 {
    log_factorial_ratio(0, n)
}

/// `sum_{k=1}^{j} ln k!`, summed as `sum_i (j + 1 - i) ln i`.
pub fn sum_log_factorials(j: u64) -> f64 {
    let mut sum = CompensatedSum::new();
    for i in 2..=j {
        sum.add((j + 1 - i) as f64 * (i as f64).ln());
    }
    sum.value()
}

/// zeta'(-1) = 1/12 - ln A with A the Glaisher-Kinkelin constant.
pub fn zeta_prime_minus_one() -> f64 {
    1.0 / 12.0 - GLAISHER_KINKELIN.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn log_gamma_small_integers() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert!(rel(log_gamma(5.0).unwrap(), 24f64.ln()) < 1e-15);
    }

    #[test]
    fn log_gamma_matches_exact_factorials() {
        let mut exact = 0.0f64;
        for n in 1..=170u64 {
            exact += (n as f64).ln();
            let lg = log_gamma(n as f64 + 1.0).unwrap();
            assert!(rel(lg, exact) < 1e-13, "n = {n}: {lg} vs {exact}");
        }
    }

    #[test]
    fn log_gamma_reference_values() {
        // Reference values at the exact binary inputs.
        let cases = [
            (0.5, 0.572_364_942_924_700_087_07),
            (0.001, 6.907_178_885_383_853_661_68),
            (1.0001, -0.000_057_713_342_220_471_268_005),
            (1.5, -0.120_782_237_635_245_222_35),
            (1.9, -0.038_984_275_923_083_361_674),
            (2.2, 0.096_947_466_790_638_873_178),
            (2.5, 0.284_682_870_472_919_159_63),
            (3.7, 1.428_072_326_665_388_129_2),
            (10.5, 13.940_625_219_403_763_633),
            (30.0, 71.257_038_967_168_009_01),
            (100.25, 360.284_559_637_764_234_97),
            (10000.5, 82_104.322_654_128_365_369),
        ];
        for (x, expected) in cases {
            let got = log_gamma(x).unwrap();
            assert!(rel(got, expected) < 1e-13, "x = {x}: {got} vs {expected}");
        }
    }

    #[test]
    fn log_gamma_rejects_non_positive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn factorial_ratio_examples() {
        assert_eq!(log_factorial_ratio(10, 0), 0.0);
        assert!(rel(log_factorial_ratio(10, 1), 11f64.ln()) < 1e-15);
        assert!(rel(log_factorial_ratio(5, 3), 336f64.ln()) < 1e-15);
    }

    #[test]
    fn factorial_ratio_matches_log_gamma() {
        for &(n, m) in &[(0u64, 7u64), (3, 40), (100, 250), (999, 1)] {
            let direct = log_factorial_ratio(n, m);
            let via_gamma = log_gamma((n + m + 1) as f64).unwrap() - log_gamma((n + 1) as f64).unwrap();
            assert!((direct - via_gamma).abs() < 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn sum_of_log_factorials() {
        // ln(1! 2! 3! 4!) = ln 288
        assert!(rel(sum_log_factorials(4), 288f64.ln()) < 1e-15);
        assert_eq!(sum_log_factorials(1), 0.0);
    }

    #[test]
    fn zeta_prime_against_euler_maclaurin() {
        // ln A from the asymptotic expansion of the hyperfactorial sum_k k ln k.
        let n = 30.0f64;
        let mut s = CompensatedSum::new();
        for k in 1..=30 {
            let k = k as f64;
            s.add(k * k.ln());
        }
        s.add(-(n * n / 2.0 + n / 2.0 + 1.0 / 12.0) * n.ln());
        s.add(n * n / 4.0);
        s.add(-1.0 / (720.0 * n.powi(2)));
        s.add(1.0 / (5040.0 * n.powi(4)));
        s.add(-1.0 / (10080.0 * n.powi(6)));
        s.add(1.0 / (9504.0 * n.powi(8)));
        let zeta_prime = 1.0 / 12.0 - s.value();
        assert!((zeta_prime - zeta_prime_minus_one()).abs() < 1e-12);
        assert!((zeta_prime_minus_one() + 0.165_421_143_700_450_93).abs() < 1e-15);
        let a12 = (12.0 * (1.0 / 12.0 - zeta_prime_minus_one())).exp();
        assert!(rel(a12, GLAISHER_KINKELIN.powi(12)) < 1e-13);
    }
}
