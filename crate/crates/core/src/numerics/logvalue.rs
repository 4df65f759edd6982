//! Real and complex numbers stored as logarithm of the modulus plus a sign or phase.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Sign of a [`LogValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A real number `sign * exp(log_mag)`.
///
/// Zero is the unique value with `log_mag == -inf` and `sign == Zero`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    log_mag: f64,
    sign: Sign,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        log_mag: f64::NEG_INFINITY,
        sign: Sign::Zero,
    };
    pub const ONE: LogValue = LogValue {
        log_mag: 0.0,
        sign: Sign::Positive,
    };

    /// Builds a value from its parts. A `-inf` magnitude or a zero sign yields [`LogValue::ZERO`].
    pub fn new(log_mag: f64, sign: Sign) -> Self {
        if sign == Sign::Zero || log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { log_mag, sign }
        }
    }

    pub fn positive(log_mag: f64) -> Self {
        Self::new(log_mag, Sign::Positive)
    }

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => LogValue::new(x.ln(), Sign::Positive),
            Some(Ordering::Less) => LogValue::new((-x).ln(), Sign::Negative),
            _ => Self::ZERO,
        }
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Converts back to a float; may overflow to infinity or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        self.sign.as_f64() * self.log_mag.exp()
    }

    pub fn abs(&self) -> LogValue {
        LogValue::new(self.log_mag, self.sign.times(self.sign))
    }

    /// Decimal logarithm of the modulus, `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        self.log_mag / std::f64::consts::LN_10
    }

    /// Orders by modulus.
    pub fn cmp_abs(&self, other: &LogValue) -> Ordering {
        self.log_mag.partial_cmp(&other.log_mag).unwrap_or(Ordering::Equal)
    }

    pub fn scale(&self, factor: f64) -> LogValue {
        *self * LogValue::from_f64(factor)
    }
}

impl Default for LogValue {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue::new(self.log_mag + rhs.log_mag, self.sign.times(rhs.sign))
    }
}

impl Neg for LogValue {
    type Output = LogValue;

    fn neg(self) -> LogValue {
        LogValue::new(self.log_mag, self.sign.flip())
    }
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let ratio = (small.log_mag - big.log_mag).exp();
        if big.sign == small.sign {
            LogValue::new(big.log_mag + ratio.ln_1p(), big.sign)
        } else if ratio == 1.0 {
            Self::ZERO
        } else {
            LogValue::new(big.log_mag + (-ratio).ln_1p(), big.sign)
        }
    }
}

impl Sub for LogValue {
    type Output = LogValue;

    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Positive => write!(f, "exp({})", self.log_mag),
            Sign::Negative => write!(f, "-exp({})", self.log_mag),
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// A complex number `exp(log_mag + i phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseValue {
    log_mag: f64,
    phase: f64,
}

impl PhaseValue {
    pub const ZERO: PhaseValue = PhaseValue {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: PhaseValue = PhaseValue {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            PhaseValue {
                log_mag,
                phase: wrap_phase(phase),
            }
        }
    }

    /// Exponential of a complex logarithm.
    pub fn from_log(log: Complex64) -> Self {
        Self::new(log.re, log.im)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn modulus(&self) -> f64 {
        self.log_mag.exp()
    }

    pub fn conj(&self) -> PhaseValue {
        if self.is_zero() {
            return *self;
        }
        PhaseValue::new(self.log_mag, -self.phase)
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    /// Multiplies the modulus by `exp(delta)`.
    pub fn shift_log(&self, delta: f64) -> PhaseValue {
        PhaseValue::new(self.log_mag + delta, self.phase)
    }
}

impl Mul for PhaseValue {
    type Output = PhaseValue;

    fn mul(self, rhs: PhaseValue) -> PhaseValue {
        PhaseValue::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }
}
