//! Number backends shared by every map in the crate.
//!
//! [`ExactNumber`] is either an exact reduced rational or a [`BigFloat`] ball.
//! Rational inputs stay rational through every map, so the termination and
//! matrix identities hold exactly. Irrational inputs (isolated roots) run on
//! balls, and every comparison goes through [`ExactNumber::sign`], which may
//! answer [`Sign::Ambiguous`] instead of guessing.

mod bigfloat;
mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use bigfloat::BigFloat;
pub use poly::{eval_poly, refine_root, IntPolynomial, RootSpec};

use crate::error::{Error, Result};

/// Outcome of a sign test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    /// The value is too close to zero for the current precision.
    Ambiguous,
}

impl Sign {
    /// `Some(true)` for a certified `>= 0`, `Some(false)` for a certified `< 0`.
    pub fn is_nonnegative(self) -> Option<bool> {
        match self {
            Sign::Positive | Sign::Zero => Some(true),
            Sign::Negative => Some(false),
            Sign::Ambiguous => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactNumber {
    Rational(BigRational),
    Float(BigFloat),
}

pub fn sign_of(x: &ExactNumber) -> Sign {
    x.sign()
}

impl ExactNumber {
    pub fn zero() -> Self {
        ExactNumber::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactNumber::Rational(BigRational::one())
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        ExactNumber::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        ExactNumber::Rational(BigRational::from_integer(n.into()))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactNumber::Rational(r) => Some(r),
            ExactNumber::Float(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactNumber::Rational(_))
    }

    /// Working precision, `None` for exact rationals.
    pub fn precision(&self) -> Option<u32> {
        match self {
            ExactNumber::Rational(_) => None,
            ExactNumber::Float(f) => Some(f.precision()),
        }
    }

    pub fn sign(&self) -> Sign {
        match self {
            ExactNumber::Rational(r) => {
                if r.is_zero() {
                    Sign::Zero
                } else if r.is_negative() {
                    Sign::Negative
                } else {
                    Sign::Positive
                }
            }
            ExactNumber::Float(f) => f.sign(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactNumber::Rational(r) => {
                r.to_f64().unwrap_or_else(|| bigfloat_of(r, 64).to_f64())
            }
            ExactNumber::Float(f) => f.to_f64(),
        }
    }

    /// Convert to a ball at `prec` bits (exact rationals become balls too).
    pub fn to_float(&self, prec: u32) -> BigFloat {
        match self {
            ExactNumber::Rational(r) => bigfloat_of(r, prec),
            ExactNumber::Float(f) => f.clone(),
        }
    }

    /// A rational that is the value (rationals) or the ball midpoint (floats).
    pub fn approx_rational(&self) -> BigRational {
        match self {
            ExactNumber::Rational(r) => r.clone(),
            ExactNumber::Float(f) => f.midpoint(),
        }
    }

    /// Whether `r` is consistent with this value: equality for rationals,
    /// containment for balls.
    pub fn admits(&self, r: &BigRational) -> bool {
        match self {
            ExactNumber::Rational(x) => x == r,
            ExactNumber::Float(f) => f.contains(r),
        }
    }

    /// `self / other`, `None` when `other` is zero or its ball contains zero.
    pub fn checked_div(&self, other: &ExactNumber) -> Option<ExactNumber> {
        match (self, other) {
            (ExactNumber::Rational(a), ExactNumber::Rational(b)) => {
                if b.is_zero() {
                    None
                } else {
                    Some(ExactNumber::Rational(a / b))
                }
            }
            _ => {
                let prec = common_precision(self, other);
                self.to_float(prec)
                    .checked_div(&other.to_float(prec))
                    .map(ExactNumber::Float)
            }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> ExactNumber {
        self * &ExactNumber::from_int(k.clone())
    }

    /// Display with a bounded number of significant digits for floats.
    pub fn to_display_string(&self, digits: usize) -> String {
        match self {
            ExactNumber::Rational(r) => r.to_string(),
            ExactNumber::Float(f) => f.to_sci_string(digits),
        }
    }
}

fn bigfloat_of(r: &BigRational, prec: u32) -> BigFloat {
    BigFloat::from_rational(r, prec)
}

fn common_precision(a: &ExactNumber, b: &ExactNumber) -> u32 {
    match (a.precision(), b.precision()) {
        (Some(x), Some(y)) => x.max(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => 64,
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $float:ident) => {
        impl<'a> $tr<&'a ExactNumber> for &'a ExactNumber {
            type Output = ExactNumber;

            fn $method(self, other: &'a ExactNumber) -> ExactNumber {
                match (self, other) {
                    (ExactNumber::Rational(a), ExactNumber::Rational(b)) => {
                        ExactNumber::Rational(a.$method(b))
                    }
                    _ => {
                        let prec = common_precision(self, other);
                        ExactNumber::Float(self.to_float(prec).$float(&other.to_float(prec)))
                    }
                }
            }
        }

        impl $tr for ExactNumber {
            type Output = ExactNumber;

            fn $method(self, other: ExactNumber) -> ExactNumber {
                (&self).$method(&other)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl Neg for &ExactNumber {
    type Output = ExactNumber;

    fn neg(self) -> ExactNumber {
        match self {
            ExactNumber::Rational(r) => ExactNumber::Rational(-r),
            ExactNumber::Float(f) => ExactNumber::Float(f.neg()),
        }
    }
}

impl Neg for ExactNumber {
    type Output = ExactNumber;

    fn neg(self) -> ExactNumber {
        -&self
    }
}

impl From<BigRational> for ExactNumber {
    fn from(r: BigRational) -> Self {
        ExactNumber::Rational(r)
    }
}

impl From<BigFloat> for ExactNumber {
    fn from(f: BigFloat) -> Self {
        ExactNumber::Float(f)
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactNumber::Rational(r) => write!(f, "{r}"),
            ExactNumber::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parse `p/q`, `p` or a plain decimal such as `0.25` or `-1.5e-3` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(n));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        n = -n;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    Some(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

/// The unique `k >= 0` with `num - k*den >= 0 > num - (k+1)*den`.
///
/// Requires `den > 0` and `num >= 0`. For exact rationals this is a floor
/// division. For balls a candidate is read off the midpoints and then both
/// boundary sign tests are certified; an ambiguous test yields
/// [`Error::PrecisionExhausted`].
pub fn partial_quotient(num: &ExactNumber, den: &ExactNumber) -> Result<BigUint> {
    if let (ExactNumber::Rational(n), ExactNumber::Rational(d)) = (num, den) {
        if !d.is_positive() {
            return Err(Error::DegenerateInput("partial quotient with nonpositive divisor".into()));
        }
        if n.is_negative() {
            return Err(Error::DegenerateInput("partial quotient of a negative value".into()));
        }
        return Ok((n / d).floor().to_integer().to_biguint().expect("nonnegative"));
    }
    match den.sign() {
        Sign::Positive => {}
        Sign::Ambiguous => return Err(Error::PrecisionExhausted),
        _ => return Err(Error::DegenerateInput("partial quotient with nonpositive divisor".into())),
    }
    let prec = common_precision(num, den);
    let hint = num
        .to_float(prec)
        .floor_quotient_hint(&den.to_float(prec))
        .ok_or(Error::PrecisionExhausted)?;
    let mut k = if hint.is_negative() { BigInt::zero() } else { hint };
    // the midpoint quotient is off by at most one unit when the tests are decidable
    for _ in 0..4 {
        let lower = num - &den.mul_int(&k);
        match lower.sign().is_nonnegative() {
            None => return Err(Error::PrecisionExhausted),
            Some(false) => {
                if k.is_zero() {
                    return Err(Error::DegenerateInput("partial quotient of a negative value".into()));
                }
                k -= 1;
                continue;
            }
            Some(true) => {}
        }
        let upper = &lower - den;
        match upper.sign().is_nonnegative() {
            None => return Err(Error::PrecisionExhausted),
            Some(true) => k += 1,
            Some(false) => return Ok(k.to_biguint().expect("nonnegative")),
        }
    }
    Err(Error::PrecisionExhausted)
}

pub(crate) fn biguint_to_bigint(k: &BigUint) -> BigInt {
    k.to_bigint().expect("unsigned fits")
}
