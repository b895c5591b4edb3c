//! Signed log-domain scalars and exact combinatorial logarithms.
//!
//! Correlators of order 100 on 100 particles reach magnitudes like
//! `(100!)^2 ~ 1e316`, beyond the range of `f64`. Everything that can grow
//! that large is carried as a sign plus a natural logarithm of the magnitude.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// The zero value has `sign == 0` and `log_magnitude == -inf`; no other
/// combination with either of those is ever constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScalar {
    sign: i8,
    log_magnitude: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: 0,
        log_magnitude: f64::NEG_INFINITY,
    };

    pub const ONE: LogScalar = LogScalar {
        sign: 1,
        log_magnitude: 0.0,
    };

    /// Builds a value from a sign and a log-magnitude, collapsing any zero
    /// sign or `-inf` magnitude onto [`LogScalar::ZERO`].
    pub fn new(sign: i8, log_magnitude: f64) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            debug_assert!(!log_magnitude.is_nan(), "NaN log-magnitude");
            LogScalar {
                sign: sign.signum(),
                log_magnitude,
            }
        }
    }

    /// Positive value `exp(log_magnitude)`.
    pub fn from_ln(log_magnitude: f64) -> Self {
        Self::new(1, log_magnitude)
    }

    pub fn from_real(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Self::new(1, x.ln()),
            Some(Ordering::Less) => Self::new(-1, (-x).ln()),
            _ => Self::ZERO,
        }
    }

    /// Converts back to an ordinary float; overflows to `±inf` and
    /// underflows to `0` outside the `f64` range.
    pub fn to_real(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn log_magnitude(self) -> f64 {
        self.log_magnitude
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        Self::new(self.sign.abs(), self.log_magnitude)
    }

    pub fn powi(self, exponent: i32) -> Self {
        if exponent == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if exponent % 2 == 0 { 1 } else { self.sign };
        Self::new(sign, self.log_magnitude * f64::from(exponent))
    }
}

impl Add for LogScalar {
    type Output = LogScalar;

    fn add(self, rhs: LogScalar) -> LogScalar {
        log_sum_exp_signed(&[self, rhs])
    }
}

impl Sub for LogScalar {
    type Output = LogScalar;

    fn sub(self, rhs: LogScalar) -> LogScalar {
        log_sum_exp_signed(&[self, -rhs])
    }
}

impl Default for LogScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;

    fn mul(self, rhs: LogScalar) -> LogScalar {
        LogScalar::new(self.sign * rhs.sign, self.log_magnitude + rhs.log_magnitude)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;

    /// Division by zero yields a signed infinite magnitude.
    fn div(self, rhs: LogScalar) -> LogScalar {
        if self.is_zero() {
            return LogScalar::ZERO;
        }
        if rhs.is_zero() {
            return LogScalar::new(self.sign, f64::INFINITY);
        }
        LogScalar::new(self.sign * rhs.sign, self.log_magnitude - rhs.log_magnitude)
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;

    fn neg(self) -> LogScalar {
        LogScalar {
            sign: -self.sign,
            log_magnitude: self.log_magnitude,
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "+exp({})", self.log_magnitude),
            _ => write!(f, "-exp({})", self.log_magnitude),
        }
    }
}

/// A complex number stored as `exp(log_magnitude) * exp(i * phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    log_magnitude: f64,
    phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };

    /// Phase is wrapped into `(-pi, pi]`.
    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            log_magnitude,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    /// `exp(log_scale) * z`.
    pub fn from_scaled(z: Complex64, log_scale: f64) -> Self {
        let base = Self::from_complex(z);
        if base.is_zero() || log_scale == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self::new(base.log_magnitude + log_scale, base.phase)
        }
    }

    pub fn log_magnitude(self) -> f64 {
        self.log_magnitude
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn is_zero(self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_magnitude, -self.phase)
    }

    /// `|z|^2`; the phase is discarded.
    pub fn modulus_squared(self) -> LogScalar {
        LogScalar::from_ln(2.0 * self.log_magnitude)
    }

    pub fn modulus(self) -> LogScalar {
        LogScalar::from_ln(self.log_magnitude)
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.log_magnitude.exp(), self.phase)
        }
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(
            self.log_magnitude + rhs.log_magnitude,
            self.phase + rhs.phase,
        )
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Signed sum of log-domain terms.
///
/// The largest magnitude is factored out before exponentiating. A result
/// that is within rounding of the cancellation floor (a few ulps of the
/// summed absolute terms) is returned as the exact zero.
pub fn log_sum_exp_signed(terms: &[LogScalar]) -> LogScalar {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_magnitude)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogScalar::ZERO;
    }
    if max == f64::INFINITY {
        let signs: i32 = terms
            .iter()
            .filter(|t| t.log_magnitude == f64::INFINITY)
            .map(|t| i32::from(t.sign))
            .sum();
        return LogScalar::new(signs.signum() as i8, f64::INFINITY);
    }

    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut count = 0usize;
    for t in terms.iter().filter(|t| !t.is_zero()) {
        let scaled = (t.log_magnitude - max).exp();
        sum += f64::from(t.sign) * scaled;
        abs_sum += scaled;
        count += 1;
    }
    if sum.abs() <= (count as f64) * f64::EPSILON * abs_sum {
        return LogScalar::ZERO;
    }
    LogScalar::new(if sum > 0.0 { 1 } else { -1 }, max + sum.abs().ln())
}

/// Upper end of the exactly summed `ln(n!)` table.
pub const EXACT_FACTORIAL_LIMIT: u64 = 1_000_000;

// Cumulative `ln(k!)` for k = 0..len, extended on demand with a compensated
// running sum. The compensation term for the last entry is kept alongside.
struct FactorialTable {
    values: Vec<f64>,
    carry: f64,
}

static FACTORIAL_TABLE: RwLock<FactorialTable> = RwLock::new(FactorialTable {
    values: Vec::new(),
    carry: 0.0,
});

const INITIAL_TABLE_LEN: usize = 4096;

fn table_lookup(n: usize) -> f64 {
    {
        let table = FACTORIAL_TABLE.read().unwrap_or_else(|e| e.into_inner());
        if let Some(&v) = table.values.get(n) {
            return v;
        }
    }
    let mut table = FACTORIAL_TABLE.write().unwrap_or_else(|e| e.into_inner());
    if table.values.is_empty() {
        table.values.push(0.0);
    }
    let target = (n + 1).max(INITIAL_TABLE_LEN).max(2 * table.values.len());
    let target = target.min(EXACT_FACTORIAL_LIMIT as usize + 1).max(n + 1);
    let mut acc = *table.values.last().expect("table seeded");
    let mut carry = table.carry;
    for k in table.values.len()..target {
        // Kahan summation keeps the table within an ulp or two of the
        // exact cumulative sum even at a million terms.
        let y = (k as f64).ln() - carry;
        let t = acc + y;
        carry = (t - acc) - y;
        acc = t;
        table.values.push(acc);
    }
    table.carry = carry;
    table.values[n]
}

/// Stirling series for `ln(n!)`; used only above [`EXACT_FACTORIAL_LIMIT`],
/// where the truncation error is far below `f64` resolution.
fn stirling_log_factorial(n: u64) -> f64 {
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)))
}

/// `ln(n!)`, summed exactly from `ln 1 + ... + ln n` for `n` up to one million.
pub fn log_factorial(n: u64) -> f64 {
    if n <= EXACT_FACTORIAL_LIMIT {
        table_lookup(n as usize)
    } else {
        stirling_log_factorial(n)
    }
}

/// `ln(n! / (n - m)!)`, the log of the falling factorial `n (n-1) ... (n-m+1)`.
pub fn log_falling_factorial(n: u64, m: u64) -> Result<f64> {
    if m > n {
        return Err(Error::OrderExceedsParticles {
            order: m as usize,
            particles: n as usize,
        });
    }
    if m <= 16 {
        // Short products are summed directly; subtracting two large table
        // entries would cost several ulps of ln(n!).
        return Ok(((n - m + 1)..=n).map(|j| (j as f64).ln()).sum());
    }
    Ok(log_factorial(n) - log_factorial(n - m))
}

/// `ln C(n, k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidBinomial { n, k });
    }
    let k = k.min(n - k);
    Ok(log_factorial(n) - log_factorial(k) - log_factorial(n - k))
}
