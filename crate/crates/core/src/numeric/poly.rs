//! Integer polynomials and isolated real roots.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{BigFloat, ExactNumber};
use crate::error::{Error, Result};

/// Polynomial with integer coefficients, stored constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self * x^n`
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Exact quotient in Z[x], `None` if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < divisor.degree() {
            return None;
        }
        let lead = divisor.leading();
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn eval(&self, x: &ExactNumber) -> ExactNumber {
        eval_poly(self, x)
    }

    /// Compose with `x -> -x`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }
}

/// Horner evaluation; exact for rationals, ball-tracked for floats.
pub fn eval_poly(p: &IntPolynomial, x: &ExactNumber) -> ExactNumber {
    if let ExactNumber::Rational(r) = x {
        return ExactNumber::Rational(p.eval_rational(r));
    }
    p.coeffs
        .iter()
        .rev()
        .fold(ExactNumber::zero(), |acc, c| &(&acc * x) + &ExactNumber::from_int(c.clone()))
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Comma-separated coefficients, constant term first: `-1,1,1,1` is x^3+x^2+x-1.
impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                BigInt::from_str(t.trim())
                    .map_err(|_| Error::Parse(format!("bad polynomial coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// An integer polynomial together with an interval holding one of its real roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSpec {
    poly: IntPolynomial,
    lo: BigRational,
    hi: BigRational,
}

impl RootSpec {
    /// Checks that the polynomial takes nonzero values of opposite sign at the endpoints.
    pub fn new(poly: IntPolynomial, lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidRoot(format!("empty interval ({lo}, {hi})")));
        }
        let flo = poly.eval_rational(&lo);
        let fhi = poly.eval_rational(&hi);
        if flo.is_zero() || fhi.is_zero() || flo.is_positive() == fhi.is_positive() {
            return Err(Error::InvalidRoot(format!(
                "no sign change of {poly} on ({lo}, {hi}): values {flo}, {fhi}"
            )));
        }
        Ok(RootSpec { poly, lo, hi })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    /// Bisect to an enclosure narrower than `2^-(precision+1)`.
    ///
    /// The returned ball is centred on the final dyadic midpoint, carries the
    /// half-width of the enclosure as its radius, and lies within
    /// `2^-precision` of the root.
    pub fn refine(&self, precision: u32) -> BigFloat {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let lo_negative = self.poly.eval_rational(&lo).is_negative();
        let two = BigRational::from_integer(2.into());
        let target = BigRational::new(BigInt::one(), BigInt::one() << (precision as u64 + 1));
        while &hi - &lo > target {
            let mid = (&lo + &hi) / &two;
            let v = self.poly.eval_rational(&mid);
            if v.is_zero() {
                return BigFloat::from_rational(&mid, precision);
            }
            if v.is_negative() == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = (&lo + &hi) / &two;
        let half = (&hi - &lo) / &two;
        ball_from_enclosure(&mid, &half, precision)
    }
}

fn ball_from_enclosure(mid: &BigRational, half: &BigRational, precision: u32) -> BigFloat {
    // extra guard bits keep the centre's own rounding well under the half-width
    BigFloat::from_rational(mid, precision + 8)
        .widen(half)
        .with_precision(precision)
}

/// Approximation of the isolated root within `2^-precision`.
pub fn refine_root(r: &RootSpec, precision: u32) -> ExactNumber {
    ExactNumber::Float(r.refine(precision))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eval_examples() {
        let p: IntPolynomial = "-1,1,1,1".parse().unwrap();
        assert_eq!(p.eval_rational(&q(0, 1)), q(-1, 1));
        assert_eq!(p.eval_rational(&q(1, 1)), q(2, 1));
        assert_eq!(IntPolynomial::zero().eval_rational(&q(5, 1)), q(0, 1));
        assert_eq!(eval_poly(&IntPolynomial::zero(), &ExactNumber::from_int(5)), ExactNumber::zero());
    }

    #[test]
    fn text_format_round_trip() {
        let p: IntPolynomial = "-1, 1,1,1".parse().unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(p.to_string(), "-1,1,1,1");
        let z: IntPolynomial = "0,0".parse().unwrap();
        assert!(z.is_zero());
        assert!("1,x".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn exact_division() {
        // (x+1)(x^2+2x-1) = x^3+3x^2+x-1
        let p = IntPolynomial::from_i64(&[-1, 1, 3, 1]);
        let d = IntPolynomial::from_i64(&[1, 1]);
        assert_eq!(p.exact_div(&d).unwrap(), IntPolynomial::from_i64(&[-1, 2, 1]));
        assert!(p.exact_div(&IntPolynomial::from_i64(&[-1, 1])).is_none());
        assert_eq!(IntPolynomial::from_i64(&[4, -6, 2]).primitive_part(), IntPolynomial::from_i64(&[2, -3, 1]));
        assert_eq!(IntPolynomial::from_i64(&[4, -6, -2]).primitive_part(), IntPolynomial::from_i64(&[-2, 3, 1]));
    }

    #[test]
    fn root_spec_requires_sign_change() {
        let p = IntPolynomial::from_i64(&[-1, 1, 1, 1]);
        assert!(RootSpec::new(p.clone(), q(0, 1), q(1, 1)).is_ok());
        assert!(RootSpec::new(p.clone(), q(1, 1), q(2, 1)).is_err());
        assert!(RootSpec::new(p, q(1, 1), q(0, 1)).is_err());
        // endpoint at a root is not a strict sign change
        assert!(RootSpec::new(IntPolynomial::from_i64(&[-1, 2]), q(1, 2), q(1, 1)).is_err());
    }

    /// Bisection on f64 as an independent oracle for the tribonacci-type root.
    fn f64_bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (f(m) < 0.0) == (f(lo) < 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn refine_cubic_root() {
        let oracle = f64_bisect(|x| x * x * x + x * x + x - 1.0, 0.0, 1.0);
        assert!((oracle - 0.543_689_012_692_076_4).abs() < 1e-15);
        let r = RootSpec::new(IntPolynomial::from_i64(&[-1, 1, 1, 1]), q(0, 1), q(1, 1)).unwrap();
        let x = r.refine(64);
        assert!((x.to_f64() - oracle).abs() < 1e-15);
        assert!(x.radius() <= q(1, 1) / BigRational::from_integer(BigInt::one() << 64u32));
    }

    #[test]
    fn refine_linear_root_is_exact() {
        let r = RootSpec::new(IntPolynomial::from_i64(&[-1, 2]), q(0, 1), q(1, 1)).unwrap();
        let x = r.refine(64);
        assert!(x.contains(&q(1, 2)));
        assert!((x.to_f64() - 0.5).abs() < 1e-18);
    }

    #[test]
    fn refine_quartic_root_in_expected_window() {
        let p = IntPolynomial::from_i64(&[-1, 1, 1, 0, 1]);
        assert!(p.eval_rational(&q(1, 2)).is_negative());
        assert!(p.eval_rational(&q(3, 5)).is_positive());
        let r = RootSpec::new(p, q(0, 1), q(1, 1)).unwrap();
        let x = r.refine(64).to_f64();
        assert!(x > 0.5 && x < 0.6);
    }

    #[test]
    fn refined_ball_brackets_root_with_certified_signs() {
        let p = IntPolynomial::from_i64(&[-1, 1, 1, 1]);
        let r = RootSpec::new(p.clone(), q(0, 1), q(1, 1)).unwrap();
        let x = r.refine(200);
        let lo = x.midpoint() - x.radius();
        let hi = x.midpoint() + x.radius();
        assert!(p.eval_rational(&lo).is_negative());
        assert!(p.eval_rational(&hi).is_positive());
    }
}
