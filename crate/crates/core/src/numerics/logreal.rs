//! A nonnegative real stored on the natural-log scale.

use std::fmt;
use std::ops::{Mul, MulAssign};

use super::special::Scalar;

/// A nonnegative real number represented by its natural logarithm.
///
/// `-inf` encodes an exact zero. Multiplication is addition of logs, so
/// products of thousands of tiny Beta ratios stay representable far below
/// floating-point underflow (tree probabilities reach 10^-157057 here).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogReal<T> {
    log_value: T,
}

impl<T: Scalar> LogReal<T> {
    /// Wrap a natural-log value.
    pub fn from_ln(log_value: T) -> Self {
        LogReal { log_value }
    }

    /// Convert a plain nonnegative value.
    pub fn from_value(v: T) -> Self {
        LogReal { log_value: v.ln() }
    }

    /// Exact zero.
    pub fn zero() -> Self {
        LogReal {
            log_value: T::neg_infinity(),
        }
    }

    /// Exact one.
    pub fn one() -> Self {
        LogReal { log_value: T::zero() }
    }

    /// The stored natural log (`-inf` for zero).
    pub fn ln(&self) -> T {
        self.log_value
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == T::neg_infinity()
    }

    /// `exp(log_value)`; underflows to 0.0 for very small values.
    pub fn value(&self) -> T {
        self.log_value.exp()
    }

    /// Log-space sum: `ln(e^a + e^b)`.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.log_value >= other.log_value {
            (self.log_value, other.log_value)
        } else {
            (other.log_value, self.log_value)
        };
        LogReal {
            log_value: hi + (lo - hi).exp().ln_1p(),
        }
    }

    /// Decompose into `(mantissa, exponent)` with `value = mantissa ×
    /// 10^exponent` and mantissa in `[1, 10)`; zero maps to `(0, 0)`.
    pub fn mantissa_exp10(&self) -> (T, i64) {
        if self.is_zero() {
            return (T::zero(), 0);
        }
        let ln10 = T::from_f64_lossy(std::f64::consts::LN_10);
        let log10 = self.log_value / ln10;
        let mut e = log10.floor();
        let mut m = T::from_f64_lossy(10.0).powf(log10 - e);
        let ten = T::from_f64_lossy(10.0);
        // guard the open upper edge against rounding
        if m >= ten {
            m = m / ten;
            e = e + T::one();
        }
        (m, e.to_f64().expect("finite exponent") as i64)
    }

    /// Scientific-notation rendering with `sig` significant digits,
    /// e.g. `2.09e-157057`.
    pub fn to_scientific(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (m, e) = self.mantissa_exp10();
        let mut m = m.to_f64().expect("finite mantissa");
        let mut e = e;
        let digits = sig.saturating_sub(1);
        // rounding the mantissa can push it to 10.0
        let scale = 10f64.powi(digits as i32);
        if (m * scale).round() >= 10.0 * scale {
            m /= 10.0;
            e += 1;
        }
        format!("{m:.digits$}e{e}")
    }
}

impl<T: Scalar> Mul for LogReal<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        LogReal {
            log_value: self.log_value + rhs.log_value,
        }
    }
}

impl<T: Scalar> MulAssign for LogReal<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<T: Scalar> fmt::Display for LogReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_scientific(3))
    }
}
