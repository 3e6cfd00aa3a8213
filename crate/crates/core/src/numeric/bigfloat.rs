//! Midpoint-radius ("ball") binary floating point.
//!
//! A [`BigFloat`] is a dyadic midpoint rounded to `prec` mantissa bits together
//! with a dyadic radius that bounds the distance to the true value. Every
//! operation rounds the midpoint and grows the radius by the rounding error, so
//! the ball always contains the exact result of the same computation carried out
//! over the reals.
//!
//! Values are resolved to an absolute floor of `2^-prec`: a ball whose midpoint
//! magnitude does not exceed `radius + 2^-prec` has no certified sign. All
//! quantities this crate feeds through the backend live in `[0, 1]`, so the
//! floor is one unit in the last place of `1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Sign;

/// Mantissa bits kept for radii. Radii are rounded up, so this only controls
/// how tight the bound is, never its validity.
const RADIUS_BITS: u64 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dyadic {
    man: BigInt,
    exp: i64,
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

impl Dyadic {
    pub(crate) fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub(crate) fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        Dyadic { man: man >> tz, exp: exp + tz as i64 }
    }

    pub(crate) fn from_int(n: &BigInt) -> Self {
        Self::new(n.clone(), 0)
    }

    /// `2^e`
    pub(crate) fn unit(e: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: e }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    fn bits(&self) -> u64 {
        self.man.bits()
    }

    fn align(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        (a, b, e)
    }

    pub(crate) fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.align(other);
        Dyadic::new(a + b, e)
    }

    pub(crate) fn neg(&self) -> Dyadic {
        Dyadic { man: -&self.man, exp: self.exp }
    }

    pub(crate) fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub(crate) fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub(crate) fn abs(&self) -> Dyadic {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub(crate) fn signum(&self) -> Ordering {
        self.man.sign().cmp_zero()
    }

    pub(crate) fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }

    /// Round toward negative infinity to at most `prec` mantissa bits.
    /// Returns the rounded value and an upper bound on the rounding error.
    pub(crate) fn round_floor(&self, prec: u32) -> (Dyadic, Dyadic) {
        let bits = self.bits();
        if bits <= prec as u64 {
            return (self.clone(), Dyadic::zero());
        }
        let shift = bits - prec as u64;
        let man = self.man.div_floor(&pow2(shift));
        let exp = self.exp + shift as i64;
        (Dyadic::new(man, exp), Dyadic::unit(exp))
    }

    /// Round a nonnegative value up to `RADIUS_BITS` mantissa bits.
    pub(crate) fn round_up(&self) -> Dyadic {
        debug_assert!(self.man.sign() != BigSign::Minus);
        let bits = self.bits();
        if bits <= RADIUS_BITS {
            return self.clone();
        }
        let shift = bits - RADIUS_BITS;
        let man = self.man.div_ceil(&pow2(shift));
        Dyadic::new(man, self.exp + shift as i64)
    }

    pub(crate) fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), pow2((-self.exp) as u64))
        }
    }

    /// `floor(r * 2^shift) * 2^-shift` and its error bound.
    fn from_rational_floor(r: &BigRational, prec: u32) -> (Dyadic, Dyadic) {
        if r.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let num = r.numer();
        let den = r.denom();
        let shift = prec as i64 + den.bits() as i64 - num.bits() as i64 + 2;
        let (n, d) = if shift >= 0 {
            (num << shift as u64, den.clone())
        } else {
            (num.clone(), den << (-shift) as u64)
        };
        let (q, rem) = n.div_mod_floor(&d);
        let err = if rem.is_zero() { Dyadic::zero() } else { Dyadic::unit(-shift) };
        (Dyadic::new(q, -shift), err)
    }

    /// Quotient rounded toward negative infinity with at least `prec` bits,
    /// together with an error bound.
    fn div_floor(&self, other: &Dyadic, prec: u32) -> (Dyadic, Dyadic) {
        debug_assert!(!other.is_zero());
        if self.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let shift = (prec as i64 + other.bits() as i64 - self.bits() as i64 + 2).max(0) as u64;
        let (q, rem) = (&self.man << shift).div_mod_floor(&other.man);
        let exp = self.exp - other.exp - shift as i64;
        let err = if rem.is_zero() { Dyadic::zero() } else { Dyadic::unit(exp) };
        (Dyadic::new(q, exp), err)
    }

    /// Upper bound on `self / other` for nonnegative `self` and positive `other`.
    fn div_up(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        let shift = (RADIUS_BITS as i64 + other.bits() as i64 - self.bits() as i64 + 2).max(0) as u64;
        let q = (&self.man << shift).div_ceil(&other.man);
        Dyadic::new(q, self.exp - other.exp - shift as i64).round_up()
    }

    pub(crate) fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            self.man.div_floor(&pow2((-self.exp) as u64))
        }
    }

    pub(crate) fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (man, exp) = if bits > 64 {
            let s = bits - 64;
            (&self.man >> s, self.exp + s as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let m = man.to_f64().unwrap_or(0.0);
        m * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for BigSign {
    fn cmp_zero(self) -> Ordering {
        match self {
            BigSign::Minus => Ordering::Less,
            BigSign::NoSign => Ordering::Equal,
            BigSign::Plus => Ordering::Greater,
        }
    }
}

/// Binary ball: `mid ± rad`, carried at `prec` bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

impl BigFloat {
    pub(crate) fn from_parts(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        BigFloat { mid, rad: rad.round_up(), prec }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let (mid, floor_err) = Dyadic::from_rational_floor(r, prec);
        let (mid, err) = mid.round_floor(prec);
        BigFloat::from_parts(mid, err.add(&floor_err), prec)
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let (mid, err) = Dyadic::from_int(n).round_floor(prec);
        BigFloat::from_parts(mid, err, prec)
    }

    /// Exact dyadic value `man * 2^exp`, no rounding.
    pub fn from_dyadic(man: BigInt, exp: i64, prec: u32) -> Self {
        BigFloat { mid: Dyadic::new(man, exp), rad: Dyadic::zero(), prec }
    }

    /// Grow the radius by a nonnegative rational amount.
    pub fn widen(&self, extra: &BigRational) -> BigFloat {
        let (lo, err) = Dyadic::from_rational_floor(&extra.abs(), RADIUS_BITS as u32);
        let rad = self.rad.add(&lo).add(&err);
        BigFloat::from_parts(self.mid.clone(), rad, self.prec)
    }

    pub(crate) fn with_precision(mut self, prec: u32) -> BigFloat {
        self.prec = prec;
        self
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn midpoint(&self) -> BigRational {
        self.mid.to_rational()
    }

    pub fn radius(&self) -> BigRational {
        self.rad.to_rational()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn radius_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    fn rounded(mid_exact: Dyadic, rad: Dyadic, prec: u32) -> Self {
        let (mid, err) = mid_exact.round_floor(prec);
        BigFloat::from_parts(mid, rad.add(&err), prec)
    }

    pub fn add(&self, other: &BigFloat) -> BigFloat {
        let prec = self.prec.max(other.prec);
        Self::rounded(self.mid.add(&other.mid), self.rad.add(&other.rad), prec)
    }

    pub fn sub(&self, other: &BigFloat) -> BigFloat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BigFloat {
        BigFloat { mid: self.mid.neg(), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, other: &BigFloat) -> BigFloat {
        let prec = self.prec.max(other.prec);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Self::rounded(self.mid.mul(&other.mid), rad, prec)
    }

    /// `None` when the divisor ball contains zero.
    pub fn checked_div(&self, other: &BigFloat) -> Option<BigFloat> {
        let prec = self.prec.max(other.prec);
        let bm = other.mid.abs();
        if bm.cmp_value(&other.rad) != Ordering::Greater {
            return None;
        }
        let (q, qerr) = self.mid.div_floor(&other.mid, prec);
        // |a/b - am/bm| <= (|bm| ra + |am| rb) / (|bm| (|bm| - rb))
        let num = bm.mul(&self.rad).add(&self.mid.abs().mul(&other.rad));
        let den = bm.mul(&bm.sub(&other.rad));
        let prop = num.div_up(&den);
        Some(Self::rounded(q, prop.add(&qerr), prec))
    }

    /// Certified sign, or [`Sign::Ambiguous`] when `|mid| <= rad + 2^-prec`.
    pub fn sign(&self) -> Sign {
        let bound = self.rad.add(&Dyadic::unit(-(self.prec as i64)));
        if self.mid.abs().cmp_value(&bound) != Ordering::Greater {
            return Sign::Ambiguous;
        }
        match self.mid.signum() {
            Ordering::Less => Sign::Negative,
            _ => Sign::Positive,
        }
    }

    /// Floor of the midpoint of `self / other`; a candidate that callers must
    /// certify with sign tests.
    pub(crate) fn floor_quotient_hint(&self, other: &BigFloat) -> Option<BigInt> {
        if other.mid.is_zero() {
            return None;
        }
        let (q, _) = self.mid.div_floor(&other.mid, 64);
        Some(q.floor())
    }

    /// Does the ball contain the rational `r`?
    pub fn contains(&self, r: &BigRational) -> bool {
        let diff = (self.mid.to_rational() - r).abs();
        diff <= self.rad.to_rational()
    }

    /// Scientific notation with `digits` significant decimal digits of the midpoint.
    pub fn to_sci_string(&self, digits: usize) -> String {
        rational_to_sci(&self.mid.to_rational(), digits)
    }
}

/// Format a rational in scientific notation with `digits` significant digits (truncated).
pub(crate) fn rational_to_sci(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = r.is_negative();
    let a = r.abs();
    // estimate the decimal exponent from bit lengths, then correct
    let log2 = a.numer().bits() as f64 - a.denom().bits() as f64;
    let mut e10 = (log2 * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigInt::from(10u32);
    let scaled = |e: i64| -> BigInt {
        let shift = digits as i64 - 1 - e;
        let v = if shift >= 0 {
            &a * BigRational::from_integer(num_traits::pow(ten.clone(), shift as usize))
        } else {
            &a / BigRational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
        };
        v.floor().to_integer()
    };
    let lower = num_traits::pow(ten.clone(), digits - 1);
    let upper = num_traits::pow(ten.clone(), digits);
    let mut s = scaled(e10);
    for _ in 0..4 {
        if s >= upper {
            e10 += 1;
        } else if s < lower {
            e10 -= 1;
        } else {
            break;
        }
        s = scaled(e10);
    }
    let ds = s.to_string();
    let (head, tail) = ds.split_at(1);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    out.push_str(&format!("e{e10}"));
    out
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        write!(f, "{}", self.to_sci_string(digits.clamp(1, 40)))
    }
}
