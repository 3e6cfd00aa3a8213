//! Periodic symbol streams and the polynomials behind them.
//!
//! A purely periodic stream `(k, k, ...)` belongs to `(rho, rho^2)` with `rho` the
//! root in `(0, 1)` of `x^3 + k x^2 + x - 1`. For an eventually periodic stream
//! with `M_n = Q M_m`, the row `(1, alpha, beta)` is a left eigenvector of
//! `Q = M_n M_m^{-1}`; eliminating the eigenvalue and one coordinate by
//! resultants leaves an integer polynomial in the other coordinate.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::{convergent, IntMatrix};
use crate::numeric::{eval_poly, refine_root, ExactNumber, IntPolynomial, RootSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    /// The tail was observed to repeat this many whole times. Says nothing
    /// about symbols beyond the observed prefix.
    RepetitionCount(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub preperiod: usize,
    pub period: usize,
    pub confidence: Confidence,
}

/// Smallest preperiod, then smallest period, whose tail repeats at least
/// `min_repeats` whole times within `symbols`.
pub fn detect_period<T: PartialEq>(symbols: &[T], min_repeats: usize) -> Option<PeriodReport> {
    let min_repeats = min_repeats.max(1);
    let len = symbols.len();
    for pre in 0..len {
        let tail = len - pre;
        for period in 1..=tail / min_repeats {
            if (pre..len - period).all(|i| symbols[i] == symbols[i + period]) {
                return Some(PeriodReport {
                    preperiod: pre,
                    period,
                    confidence: Confidence::RepetitionCount(tail / period),
                });
            }
        }
    }
    None
}

/// `x^(n+1) + k x^n + x^(n-1) + ... + x - 1`; `n = 2` is the period-one cubic.
pub fn conjecture_polynomial(n: usize, k: u64) -> IntPolynomial {
    let mut c = vec![BigInt::one(); n + 2];
    c[0] = -BigInt::one();
    c[n] = BigInt::from(k);
    IntPolynomial::new(c)
}

/// `x^3 + k x^2 + x - 1`
pub fn period_one_polynomial(k: u64) -> IntPolynomial {
    conjecture_polynomial(2, k)
}

/// Certified root in `(0, 1)` of `conjecture_polynomial(n, k)`, which is `-1`
/// at `0` and `k + n > 0` at `1`.
pub fn conjecture_root(n: usize, k: u64, precision: u32) -> ExactNumber {
    let spec = RootSpec::new(conjecture_polynomial(n, k), BigRational::zero(), BigRational::one())
        .expect("sign change on (0, 1)");
    refine_root(&spec, precision)
}

pub fn period_one_root(k: u64, precision: u32) -> ExactNumber {
    conjecture_root(2, k, precision)
}

/// `Q = M_n M_m^{-1}` for the prefixes of length `n` and `m` (`m < n`).
pub fn transfer_matrix(symbols: &[BigUint], n: usize, m: usize) -> Result<IntMatrix> {
    if m >= n || n > symbols.len() {
        return Err(Error::ContractViolation(format!(
            "need m < n <= {} symbols, got m = {m}, n = {n}",
            symbols.len()
        )));
    }
    let mn = convergent(&symbols[..n]);
    let mm_inv = convergent(&symbols[..m])
        .inverse_unimodular()
        .ok_or_else(|| Error::ContractViolation("M_m is not unimodular".into()))?;
    Ok(mn.mul(&mm_inv))
}

/// Determinant of a matrix over `Z[x]`, fraction-free.
pub(crate) fn poly_det(mut a: Vec<Vec<IntPolynomial>>) -> IntPolynomial {
    let n = a.len();
    if n == 0 {
        return IntPolynomial::constant(BigInt::one());
    }
    let mut prev = IntPolynomial::constant(BigInt::one());
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return IntPolynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = v.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

fn trim(mut f: Vec<IntPolynomial>) -> Vec<IntPolynomial> {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

/// Resultant with respect to `y` of `f = sum f_i y^i` and `g = sum g_i y^i`,
/// whose coefficients lie in `Z[x]`, as the Sylvester determinant.
pub fn resultant(f: &[IntPolynomial], g: &[IntPolynomial]) -> IntPolynomial {
    let f = trim(f.to_vec());
    let g = trim(g.to_vec());
    if f.is_empty() || g.is_empty() {
        return IntPolynomial::zero();
    }
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (src, deg, count) in [(&f, m, n), (&g, n, m)] {
        for i in 0..count {
            let mut row = vec![IntPolynomial::zero(); size];
            for t in 0..=deg {
                row[i + t] = src[deg - t].clone();
            }
            rows.push(row);
        }
    }
    poly_det(rows)
}

fn entry(q: &IntMatrix, r: usize, c: usize) -> IntPolynomial {
    IntPolynomial::constant(q.get(r, c).clone())
}

/// Eliminant of the eigen-relation `(1, alpha, beta) Q = lambda (1, alpha, beta)`
/// for a 3x3 `Q`.
///
/// With `lambda = q11 + q21 alpha + q31 beta` from the first column, the other two
/// columns give
///
/// ```text
/// E2 = q12 + q22 alpha + q32 beta - alpha (q11 + q21 alpha + q31 beta)
/// E3 = q13 + q23 alpha + q33 beta - beta  (q11 + q21 alpha + q31 beta)
/// ```
///
/// and the resultant of `E2`, `E3` in `beta` (in `alpha` when `swap`) is
/// returned as a primitive polynomial with positive leading coefficient.
pub fn eliminant_from_transfer(q: &IntMatrix, swap: bool) -> Result<IntPolynomial> {
    if q.dim() != 3 {
        return Err(Error::ContractViolation("the pair eliminant needs a 3x3 matrix".into()));
    }
    let x = IntPolynomial::x();
    let e = |r, c| entry(q, r, c);
    let (e2, e3) = if !swap {
        // coefficients in beta over Z[alpha]
        let e2 = vec![
            &(&e(0, 1) + &(&(&e(1, 1) - &e(0, 0)) * &x)) - &(&e(1, 0) * &x.shift(1)),
            &e(2, 1) - &(&e(2, 0) * &x),
        ];
        let e3 = vec![
            &e(0, 2) + &(&e(1, 2) * &x),
            &(&e(2, 2) - &e(0, 0)) - &(&e(1, 0) * &x),
            -&e(2, 0),
        ];
        (e2, e3)
    } else {
        // coefficients in alpha over Z[beta]
        let e2 = vec![
            &e(0, 1) + &(&e(2, 1) * &x),
            &(&e(1, 1) - &e(0, 0)) - &(&e(2, 0) * &x),
            -&e(1, 0),
        ];
        let e3 = vec![
            &(&e(0, 2) + &(&(&e(2, 2) - &e(0, 0)) * &x)) - &(&e(2, 0) * &x.shift(1)),
            &e(1, 2) - &(&e(1, 0) * &x),
        ];
        (e2, e3)
    };
    let res = resultant(&e2, &e3);
    if res.is_zero() {
        return Err(Error::InconsistentInput(
            "eliminant vanishes identically (Q acts as a multiple of the identity)".into(),
        ));
    }
    Ok(res.primitive_part())
}

/// Eliminant for the pair from the stream, using `Q = M_n M_m^{-1}`.
pub fn derive_cubic(symbols: &[BigUint], n: usize, m: usize, swap: bool) -> Result<IntPolynomial> {
    eliminant_from_transfer(&transfer_matrix(symbols, n, m)?, swap)
}

/// Eliminant in coordinate `alpha_j` (`1 <= j <= dim - 1`) for a square `Q` of any size.
///
/// Rows of `adj(Q - lambda I)` are left eigenvectors, so `alpha_j = A_rj / A_r0`
/// along any row `r`. The result is `Res_lambda(det(Q - lambda I), x A_r0 - A_rj)`
/// for the first row giving a nonzero resultant.
pub fn eigen_eliminant(q: &IntMatrix, j: usize) -> Result<IntPolynomial> {
    let dim = q.dim();
    if j == 0 || j >= dim {
        return Err(Error::ContractViolation(format!("coordinate {j} out of range 1..{dim}")));
    }
    let lambda = IntPolynomial::x();
    let shifted: Vec<Vec<IntPolynomial>> = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| if r == c { &entry(q, r, c) - &lambda } else { entry(q, r, c) })
                .collect()
        })
        .collect();
    let charpoly = poly_det(shifted.clone());
    let f: Vec<IntPolynomial> = charpoly.coeffs().iter().cloned().map(IntPolynomial::constant).collect();
    let minor = |del_r: usize, del_c: usize| -> IntPolynomial {
        let rows = (0..dim)
            .filter(|&r| r != del_r)
            .map(|r| (0..dim).filter(|&c| c != del_c).map(|c| shifted[r][c].clone()).collect())
            .collect();
        poly_det(rows)
    };
    // adj(B)[r][c] = (-1)^(r+c) det(B without row c, column r)
    let adj = |r: usize, c: usize| {
        let d = minor(c, r);
        if (r + c) % 2 == 0 {
            d
        } else {
            -&d
        }
    };
    for r in 0..dim {
        let a0 = adj(r, 0);
        let aj = adj(r, j);
        let len = a0.coeffs().len().max(aj.coeffs().len());
        let g: Vec<IntPolynomial> =
            (0..len).map(|t| IntPolynomial::new(vec![-aj.coeff(t), a0.coeff(t)])).collect();
        let res = resultant(&f, &g);
        if !res.is_zero() {
            return Ok(res.primitive_part());
        }
    }
    Err(Error::InconsistentInput("every adjugate row gives a vanishing eliminant".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EliminantReport {
    pub polynomial: String,
    pub degree: usize,
    /// Exact divisibility by the expected factor, when one is given.
    pub factor_checked: Option<bool>,
    /// Upper bound on `|eliminant(root)|`, when a root is given.
    pub root_residual: Option<f64>,
}

fn abs_upper_bound(x: &ExactNumber) -> BigRational {
    match x {
        ExactNumber::Rational(r) => r.abs(),
        ExactNumber::Float(f) => f.midpoint().abs() + f.radius(),
    }
}

/// Certified `|p(root)| < bound` for ball or rational `root`.
pub fn residual_below(p: &IntPolynomial, root: &ExactNumber, bound: &BigRational) -> bool {
    &abs_upper_bound(&eval_poly(p, root)) < bound
}

pub fn eliminant_report(
    p: &IntPolynomial,
    expected_factor: Option<&IntPolynomial>,
    root: Option<&ExactNumber>,
) -> EliminantReport {
    EliminantReport {
        polynomial: p.to_string(),
        degree: p.degree(),
        factor_checked: expected_factor.map(|f| p.primitive_part().exact_div(f).is_some()),
        root_residual: root.map(|r| crate::matrices::rat_to_f64(&abs_upper_bound(&eval_poly(p, r)))),
    }
}

/// Integer d-recursion from `(p, q, r)`, `p >= q >= r > 0`, run until some `d = 0`.
/// Returns the symbols and the full integer d-sequence; every new `d` is checked
/// to be strictly below its predecessor.
pub fn rational_termination_check(p: &BigInt, q: &BigInt, r: &BigInt) -> Result<(Vec<BigUint>, Vec<BigInt>)> {
    if !(p >= q && q >= r && r.is_positive()) {
        return Err(Error::ContractViolation(format!("need p >= q >= r > 0, got ({p}, {q}, {r})")));
    }
    let mut d = vec![p.clone(), q.clone(), r.clone()];
    let mut symbols = Vec::new();
    loop {
        let n = d.len();
        let slack = &d[n - 3] - &d[n - 2];
        let a = num_integer::Integer::div_floor(&slack, &d[n - 1]);
        let next = &slack - &a * &d[n - 1];
        if next.is_negative() || next >= d[n - 1] || a.is_negative() {
            return Err(Error::ContractViolation(format!("d-sequence failed to decrease at step {}", n - 2)));
        }
        symbols.push(a.to_biguint().expect("nonnegative"));
        let done = next.is_zero();
        d.push(next);
        if done {
            return Ok((symbols, d));
        }
    }
}
