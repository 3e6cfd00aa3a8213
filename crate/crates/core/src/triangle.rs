//! The triangle map on pairs.
//!
//! The triangle `1 >= x >= y > 0` is cut into the subtriangles
//! `D_k = { 1 - x - k*y >= 0 > 1 - x - (k+1)*y }`, and on `D_k` the map is
//! `T(a, b) = (b/a, (1 - a - k*b)/a)`. The symbol sequence of a pair records the
//! subtriangle index of every iterate. It is computed here through the scalar
//! recursion `d_k = d_{k-3} - d_{k-2} - a_k*d_{k-1}` seeded with `(1, alpha, beta)`,
//! which is the same iteration without renormalizing after every step.

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{biguint_to_bigint, partial_quotient, ExactNumber, Sign};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point2 {
    pub alpha: ExactNumber,
    pub beta: ExactNumber,
}

impl Point2 {
    /// Checks `1 >= alpha >= beta >= 0`. Ball inputs are rejected only when an
    /// inequality is certainly violated.
    pub fn new(alpha: ExactNumber, beta: ExactNumber) -> Result<Self> {
        let checks = [
            (&ExactNumber::one() - &alpha, "alpha <= 1"),
            (&alpha - &beta, "alpha >= beta"),
            (beta.clone(), "beta >= 0"),
        ];
        for (v, what) in checks {
            if v.sign() == Sign::Negative {
                return Err(Error::DegenerateInput(format!("point outside the triangle: {what} fails")));
            }
        }
        Ok(Point2 { alpha, beta })
    }

    pub fn from_ratios(a: (i64, i64), b: (i64, i64)) -> Result<Self> {
        Self::new(ExactNumber::from_ratio(a.0, a.1), ExactNumber::from_ratio(b.0, b.1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceStatus {
    /// Some `d_k` is exactly zero.
    Terminated,
    /// `max_len` symbols were produced without termination.
    TruncatedAtMaxLength,
    /// A membership test could not be decided at the working precision.
    PrecisionExhausted,
}

impl SequenceStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceStatus::Terminated => "terminated",
            SequenceStatus::TruncatedAtMaxLength => "truncated-at-max-length",
            SequenceStatus::PrecisionExhausted => "precision-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceRecord {
    pub symbols: Vec<BigUint>,
    /// `d_{-2}, d_{-1}, d_0, d_1, ...`
    pub d_history: Vec<ExactNumber>,
    pub status: SequenceStatus,
}

impl SequenceRecord {
    /// Length of the run of zero symbols at the end of the sequence.
    ///
    /// Termination is `d_k = 0`; a trailing run of zeros is reported separately
    /// and is not taken to mean termination.
    pub fn trailing_zero_run(&self) -> usize {
        self.symbols.iter().rev().take_while(|s| s.bits() == 0).count()
    }

    /// `d_k` for `k >= -2`.
    pub fn d(&self, k: isize) -> Option<&ExactNumber> {
        self.d_history.get((k + 2) as usize)
    }
}

/// Index `k` of the subtriangle `D_k` holding `p`, computed as `floor((1 - alpha)/beta)`
/// and certified by both boundary tests.
pub fn classify(p: &Point2) -> Result<BigUint> {
    match p.beta.sign() {
        Sign::Positive => {}
        Sign::Ambiguous => return Err(Error::PrecisionExhausted),
        _ => return Err(Error::DegenerateInput("beta = 0 is a terminal state".into())),
    }
    let slack = &ExactNumber::one() - &p.alpha;
    partial_quotient(&slack, &p.beta)
}

/// One application of the triangle map: `(k, T(p))`.
pub fn step(p: &Point2) -> Result<(BigUint, Point2)> {
    let k = classify(p)?;
    let kb = p.beta.mul_int(&biguint_to_bigint(&k));
    let rest = &(&ExactNumber::one() - &p.alpha) - &kb;
    let alpha = p.beta.checked_div(&p.alpha).ok_or(Error::PrecisionExhausted)?;
    let beta = rest.checked_div(&p.alpha).ok_or(Error::PrecisionExhausted)?;
    Ok((k, Point2 { alpha, beta }))
}

/// Triangle sequence of `p`, at most `max_len` symbols.
pub fn sequence(p: &Point2, max_len: usize) -> SequenceRecord {
    let mut d = vec![ExactNumber::one(), p.alpha.clone(), p.beta.clone()];
    let mut symbols = Vec::new();
    let status = 'run: {
        match p.beta.sign() {
            Sign::Zero => break 'run SequenceStatus::Terminated,
            Sign::Ambiguous => break 'run SequenceStatus::PrecisionExhausted,
            _ => {}
        }
        while symbols.len() < max_len {
            let n = d.len();
            let slack = &d[n - 3] - &d[n - 2];
            let a = match partial_quotient(&slack, &d[n - 1]) {
                Ok(a) => a,
                Err(_) => break 'run SequenceStatus::PrecisionExhausted,
            };
            let next = &slack - &d[n - 1].mul_int(&BigInt::from(a.clone()));
            let sign = next.sign();
            symbols.push(a);
            d.push(next);
            match sign {
                Sign::Zero => break 'run SequenceStatus::Terminated,
                Sign::Positive => {}
                _ => break 'run SequenceStatus::PrecisionExhausted,
            }
        }
        SequenceStatus::TruncatedAtMaxLength
    };
    SequenceRecord { symbols, d_history: d, status }
}

/// Classical continued-fraction digits of `x` in `(0, 1]` by iterating the Gauss
/// map `G(x) = 1/x - floor(1/x)`. `d_history` holds the iterates `x, G(x), ...`.
pub fn gauss_sequence(x: &ExactNumber, max_len: usize) -> SequenceRecord {
    let mut iterates = vec![x.clone()];
    let mut symbols = Vec::new();
    let one = ExactNumber::one();
    let status = 'run: {
        let mut cur = x.clone();
        match cur.sign() {
            Sign::Zero => break 'run SequenceStatus::Terminated,
            Sign::Ambiguous => break 'run SequenceStatus::PrecisionExhausted,
            _ => {}
        }
        while symbols.len() < max_len {
            // 1/(a+1) < x <= 1/a
            let a = match partial_quotient(&one, &cur) {
                Ok(a) => a,
                Err(_) => break 'run SequenceStatus::PrecisionExhausted,
            };
            let Some(recip) = one.checked_div(&cur) else {
                break 'run SequenceStatus::PrecisionExhausted;
            };
            let next = &recip - &ExactNumber::from_int(BigInt::from(a.clone()));
            let sign = next.sign();
            symbols.push(a);
            iterates.push(next.clone());
            match sign {
                Sign::Zero => break 'run SequenceStatus::Terminated,
                Sign::Positive => cur = next,
                _ => break 'run SequenceStatus::PrecisionExhausted,
            }
        }
        SequenceStatus::TruncatedAtMaxLength
    };
    SequenceRecord { symbols, d_history: iterates, status }
}
