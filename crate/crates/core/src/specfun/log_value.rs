use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{domain, Result};

/// A non-negative real stored as its natural logarithm.
///
/// `-inf` encodes zero. The stored logarithm is never NaN and never `+inf`,
/// so every value is a finite non-negative real that may lie far outside the
/// range of `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    /// Wraps a natural logarithm.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return domain(format!("logarithm must be finite or -inf, got {ln}"));
        }
        Ok(LogValue(ln))
    }

    /// Wraps a plain non-negative value.
    pub fn new(value: f64) -> Result<Self> {
        if value < 0.0 || !value.is_finite() {
            return domain(format!(
                "value must be finite and non-negative, got {value}"
            ));
        }
        Ok(LogValue(value.ln()))
    }

    /// Internal constructor for logarithms already known to be valid.
    pub(crate) fn from_ln_unchecked(ln: f64) -> Self {
        debug_assert!(!ln.is_nan() && ln != f64::INFINITY, "bad log value {ln}");
        LogValue(ln)
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    /// The represented quantity; overflows to `inf` or underflows to `0`
    /// when outside the `f64` range.
    #[inline]
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn checked_div(self, rhs: LogValue) -> Result<Self> {
        if rhs.is_zero() {
            return domain("division by a zero LogValue");
        }
        Ok(LogValue(self.0 - rhs.0))
    }

    /// `self - rhs`, defined only when `self >= rhs`.
    pub fn checked_sub(self, rhs: LogValue) -> Result<Self> {
        match self.0.partial_cmp(&rhs.0) {
            Some(Ordering::Less) => domain(format!(
                "log-subtraction would go negative: ln a = {}, ln b = {}",
                self.0, rhs.0
            )),
            Some(Ordering::Equal) => Ok(LogValue::ZERO),
            _ if rhs.is_zero() => Ok(self),
            _ => Ok(LogValue(self.0 + (-(rhs.0 - self.0).exp_m1()).ln())),
        }
    }

    /// Raises the value to a real power `k >= 0`.
    pub fn powf(self, k: f64) -> Self {
        if k == 0.0 {
            return LogValue::ONE;
        }
        LogValue(self.0 * k)
    }
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if lo == f64::NEG_INFINITY {
            return LogValue(hi);
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}
