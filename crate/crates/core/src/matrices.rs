//! Step matrices and convergent products for the triangle map.
//!
//! For a symbol `a` the step matrix is
//!
//! ```text
//!     | 0 0  1 |
//! P = | 1 0 -1 |
//!     | 0 1 -a |
//! ```
//!
//! and `M_k = P_1 P_2 ... P_k`. With `d` the scalar recursion of a pair,
//! `(d_{k-2}, d_{k-1}, d_k) = (1, alpha, beta) M_k`, so the columns of `M_k`,
//! labelled `(C_{k-2}, C_{k-1}, C_k)`, are integer lattice points whose
//! distance to the plane `x + alpha*y + beta*z = 0` is `d`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{biguint_to_bigint, partial_quotient, ExactNumber, Sign};
use crate::triangle::Point2;

/// Square matrix of big integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(dim: usize) -> Self {
        IntMatrix { dim, data: vec![BigInt::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse("matrix rows must form a square".into()));
        }
        Ok(IntMatrix { dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
            .expect("square")
    }

    /// Build the matrix of a linear row-vector action `x -> x P` from the images
    /// of the standard basis rows.
    pub fn from_row_action(dim: usize, action: impl Fn(&[BigInt]) -> Vec<BigInt>) -> Self {
        let mut m = Self::zero(dim);
        for r in 0..dim {
            let mut e = vec![BigInt::zero(); dim];
            e[r] = BigInt::one();
            let image = action(&e);
            assert_eq!(image.len(), dim, "row action must preserve dimension");
            for (c, v) in image.into_iter().enumerate() {
                m.data[r * dim + c] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.dim + c]
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        self.data[r * self.dim..(r + 1) * self.dim].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.dim).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim).map(|r| self.row(r)).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "conformable sizes");
        let n = self.dim;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { dim: self.dim, data: self.data.iter().map(|v| v * k).collect() }
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, x: &[ExactNumber]) -> Vec<ExactNumber> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|c| {
                x.iter().enumerate().fold(ExactNumber::zero(), |acc, (r, xr)| {
                    let m = self.get(r, c);
                    if m.is_zero() {
                        acc
                    } else {
                        &acc + &xr.mul_int(m)
                    }
                })
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.dim;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.rows();
        let mut prev = BigInt::one();
        let mut sign = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Delete row `r` and column `c` (0-based).
    pub fn minor(&self, r: usize, c: usize) -> IntMatrix {
        let n = self.dim;
        let data = (0..n)
            .filter(|&i| i != r)
            .flat_map(|i| (0..n).filter(move |&j| j != c).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        IntMatrix { dim: n - 1, data }
    }

    /// Inverse of a matrix with determinant `+-1`, `None` otherwise.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let det = self.det();
        if det.magnitude() != &BigUint::one() {
            return None;
        }
        let n = self.dim;
        if n == 1 {
            return Some(IntMatrix { dim: 1, data: vec![det] });
        }
        let mut inv = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let cof = self.minor(j, i).det();
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                inv.data[i * n + j] = cof * &det;
            }
        }
        Some(inv)
    }

    /// Nested JSON array of decimal strings, one inner array per row.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows()
                .into_iter()
                .map(|r| serde_json::Value::Array(r.into_iter().map(|v| v.to_string().into()).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Parse("matrix JSON must be an array of arrays of integer strings".into());
        let rows = v.as_array().ok_or_else(bad)?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|e| e.as_str().and_then(|s| s.parse::<BigInt>().ok()).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// `P_k` for the symbol `k`.
pub fn step_matrix(k: &BigUint) -> IntMatrix {
    let k = biguint_to_bigint(k);
    let mut m = IntMatrix::from_i64(&[&[0, 0, 1], &[1, 0, -1], &[0, 1, 0]]);
    m.data[8] = -k;
    m
}

/// `M * P`.
pub fn accumulate(m: &IntMatrix, p: &IntMatrix) -> IntMatrix {
    m.mul(p)
}

/// `M_k` for a symbol prefix (identity for the empty prefix).
pub fn convergent(symbols: &[BigUint]) -> IntMatrix {
    symbols
        .iter()
        .fold(IntMatrix::identity(3), |m, a| accumulate(&m, &step_matrix(a)))
}

/// A column of `M_k` with its distance `(1, alpha, beta) . C` to the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeColumn {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub distance: ExactNumber,
}

/// The three columns `C_{k-2}, C_{k-1}, C_k` of `m` with their distances for `point`.
pub fn lattice_columns(m: &IntMatrix, point: &Point2) -> [LatticeColumn; 3] {
    let row = [ExactNumber::one(), point.alpha.clone(), point.beta.clone()];
    let d = m.apply_row(&row);
    std::array::from_fn(|c| LatticeColumn {
        p: m.get(0, c).clone(),
        q: m.get(1, c).clone(),
        r: m.get(2, c).clone(),
        distance: d[c].clone(),
    })
}

fn consistent(a: &ExactNumber, b: &ExactNumber) -> bool {
    match (a, b) {
        (ExactNumber::Rational(x), ExactNumber::Rational(y)) => x == y,
        _ => matches!((a - b).sign(), Sign::Ambiguous | Sign::Zero),
    }
}

/// Replays `symbols` on `p` and checks, for every `k <= upto`:
///
/// * `(d_{k-2}, d_{k-1}, d_k) = (1, alpha, beta) M_k` (exact for rationals,
///   overlapping balls otherwise),
/// * `C_k = C_{k-3} - C_{k-2} - a_k C_{k-1}` read off consecutive products,
/// * `det M_k = 1`.
///
/// Fails with a contract violation if `symbols` is not a prefix of the sequence of `p`.
pub fn fundamental_identity_check(p: &Point2, symbols: &[BigUint], upto: usize) -> Result<bool> {
    let upto = upto.min(symbols.len());
    let seed = [ExactNumber::one(), p.alpha.clone(), p.beta.clone()];
    let mut d: Vec<ExactNumber> = seed.to_vec();
    let mut m = IntMatrix::identity(3);
    for (i, a) in symbols.iter().take(upto).enumerate() {
        let n = d.len();
        let slack = &d[n - 3] - &d[n - 2];
        match partial_quotient(&slack, &d[n - 1]) {
            Ok(expected) if &expected == a => {}
            Ok(expected) => {
                return Err(Error::ContractViolation(format!(
                    "symbol {} is {a}, the point gives {expected}",
                    i + 1
                )))
            }
            Err(e) => {
                return Err(Error::ContractViolation(format!("symbol {} cannot be replayed: {e}", i + 1)))
            }
        }
        d.push(&slack - &d[n - 1].mul_int(&biguint_to_bigint(a)));

        let next = accumulate(&m, &step_matrix(a));
        let ak = biguint_to_bigint(a);
        let shifted = (0..3).all(|r| next.get(r, 0) == m.get(r, 1) && next.get(r, 1) == m.get(r, 2));
        let recursion =
            (0..3).all(|r| next.get(r, 2) == &(m.get(r, 0) - m.get(r, 1) - &ak * m.get(r, 2)));
        if !shifted || !recursion || !next.det().is_one() {
            return Ok(false);
        }
        m = next;
        let lhs = m.apply_row(&seed);
        if !lhs.iter().zip(&d[d.len() - 3..]).all(|(x, y)| consistent(x, y)) {
            return Ok(false);
        }
        if d.last().map(|x| x.sign()) == Some(Sign::Zero) && i + 1 < upto {
            return Err(Error::ContractViolation("symbols continue past termination".into()));
        }
    }
    Ok(true)
}

/// Finite-k cross-product estimate from the last two columns of `M_k`:
///
/// ```text
/// alpha ~ (p_k r_{k-1} - p_{k-1} r_k) / (q_{k-1} r_k - q_k r_{k-1})
/// beta  ~ (p_{k-1} q_k - p_k q_{k-1}) / (q_{k-1} r_k - q_k r_{k-1})
/// ```
pub fn recover_pair(m: &IntMatrix) -> Result<(BigRational, BigRational)> {
    if m.dim() != 3 {
        return Err(Error::ContractViolation("recover_pair expects a 3x3 matrix".into()));
    }
    let (p1, q1, r1) = (m.get(0, 1), m.get(1, 1), m.get(2, 1));
    let (p2, q2, r2) = (m.get(0, 2), m.get(1, 2), m.get(2, 2));
    let den = q1 * r2 - q2 * r1;
    if den.is_zero() {
        return Err(Error::NotConverged("the last two columns give a zero denominator".into()));
    }
    let alpha = BigRational::new(p2 * r1 - p1 * r2, den.clone());
    let beta = BigRational::new(p1 * q2 - p2 * q1, den);
    Ok((alpha, beta))
}

/// Exact recovery of a pair from a terminated run.
///
/// A terminated sequence does not pin the pair down by itself (every point of a
/// segment shares it), but together with the terminal state
/// `(d_{k-2} : d_{k-1} : 0)` it does: `(1, alpha, beta)` is proportional to
/// `(d_{k-2}, d_{k-1}, 0) M_k^{-1}`.
pub fn recover_terminated(symbols: &[BigUint], terminal: (&BigRational, &BigRational)) -> Result<(BigRational, BigRational)> {
    let m = convergent(symbols);
    let inv = m.inverse_unimodular().ok_or_else(|| Error::ContractViolation("M_k is not unimodular".into()))?;
    let row = [
        ExactNumber::Rational(terminal.0.clone()),
        ExactNumber::Rational(terminal.1.clone()),
        ExactNumber::zero(),
    ];
    let v = inv.apply_row(&row);
    let v: Vec<BigRational> = v.iter().map(|x| x.approx_rational()).collect();
    if v[0].is_zero() {
        return Err(Error::InconsistentInput("terminal state maps to a point at infinity".into()));
    }
    Ok((&v[1] / &v[0], &v[2] / &v[0]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryStep {
    pub step: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Max-norm distance to the previous estimate, when there is one.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryTrace {
    pub steps: Vec<RecoveryStep>,
    pub estimate: Option<(BigRational, BigRational)>,
    pub converged: bool,
}

/// Iterate the cross-product estimate along `symbols` until successive
/// estimates differ by less than `tol` (max-norm).
pub fn recover_until(symbols: &[BigUint], tol: f64) -> RecoveryTrace {
    let mut m = IntMatrix::identity(3);
    let mut steps = Vec::new();
    let mut last: Option<(BigRational, BigRational)> = None;
    for (i, a) in symbols.iter().enumerate() {
        m = accumulate(&m, &step_matrix(a));
        let Ok(est) = recover_pair(&m) else { continue };
        let delta = last.as_ref().map(|(pa, pb)| {
            let da = rat_to_f64(&(&est.0 - pa)).abs();
            let db = rat_to_f64(&(&est.1 - pb)).abs();
            da.max(db)
        });
        steps.push(RecoveryStep {
            step: i + 1,
            alpha: rat_to_f64(&est.0),
            beta: rat_to_f64(&est.1),
            delta,
        });
        last = Some(est);
        if delta.is_some_and(|d| d < tol) {
            return RecoveryTrace { steps, estimate: last, converged: true };
        }
    }
    RecoveryTrace { steps, estimate: last, converged: false }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    ExactNumber::Rational(r.clone()).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::sequence;

    fn u(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn step_matrix_columns() {
        let p0 = step_matrix(&BigUint::zero());
        assert_eq!(p0.column(0), vec![0.into(), 1.into(), 0.into()]);
        assert_eq!(p0.column(1), vec![0.into(), 0.into(), 1.into()]);
        assert_eq!(p0.column(2), vec![1.into(), (-1).into(), 0.into()]);
        let p1 = step_matrix(&BigUint::one());
        assert_eq!(p1.column(2), vec![1.into(), (-1).into(), (-1).into()]);
    }

    #[test]
    fn step_matrix_det_one() {
        for k in 0..=100u32 {
            assert!(step_matrix(&BigUint::from(k)).det().is_one(), "k = {k}");
        }
    }

    #[test]
    fn identity_is_neutral() {
        let p = step_matrix(&BigUint::from(3u32));
        assert_eq!(accumulate(&IntMatrix::identity(3), &p), p);
        assert_eq!(convergent(&u(&[1])), step_matrix(&BigUint::one()));
    }

    #[test]
    fn row_times_first_convergent() {
        let m1 = convergent(&u(&[1]));
        let row = [ExactNumber::one(), ExactNumber::from_ratio(1, 2), ExactNumber::from_ratio(1, 3)];
        let d = m1.apply_row(&row);
        assert_eq!(d, vec![
            ExactNumber::from_ratio(1, 2),
            ExactNumber::from_ratio(1, 3),
            ExactNumber::from_ratio(1, 6)
        ]);
    }

    #[test]
    fn det_and_inverse() {
        let m = IntMatrix::from_i64(&[&[2, 3, 1], &[1, 2, 1], &[1, 1, 1]]);
        assert_eq!(m.det(), BigInt::from(1));
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(m.mul(&inv), IntMatrix::identity(3));
        assert!(IntMatrix::from_i64(&[&[2, 0], &[0, 1]]).inverse_unimodular().is_none());
        // zero pivot forces a swap
        let s = IntMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(s.det(), BigInt::from(-1));
    }

    #[test]
    fn identity_check_examples() {
        let p = Point2::from_ratios((1, 2), (1, 3)).unwrap();
        assert!(fundamental_identity_check(&p, &u(&[1, 1]), 2).unwrap());
        assert!(fundamental_identity_check(&p, &u(&[1]), 1).unwrap());
        assert!(matches!(
            fundamental_identity_check(&p, &u(&[2, 1]), 2),
            Err(Error::ContractViolation(_))
        ));
        assert!(matches!(
            fundamental_identity_check(&p, &u(&[1, 1, 1]), 3),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn recover_identity_and_parallel_columns() {
        let zero = BigRational::zero();
        assert_eq!(recover_pair(&IntMatrix::identity(3)).unwrap(), (zero.clone(), zero));
        let parallel = IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 2], &[0, 1, 2]]);
        assert!(matches!(recover_pair(&parallel), Err(Error::NotConverged(_))));
    }

    #[test]
    fn cross_product_estimate_lies_on_last_lattice_plane() {
        // (1/2, 1/3) terminates after (1, 1); the cross-product estimate is
        // orthogonal to both final columns but the sequence does not fix beta
        let m = convergent(&u(&[1, 1]));
        let (a, b) = recover_pair(&m).unwrap();
        assert_eq!(a, q(1, 2));
        assert_eq!(b, q(1, 2));
        for c in 1..3 {
            let col = m.column(c);
            let dot = BigRational::from_integer(col[0].clone())
                + &a * BigRational::from_integer(col[1].clone())
                + &b * BigRational::from_integer(col[2].clone());
            assert!(dot.is_zero());
        }
        // every (1/2, beta) with 1/4 < beta < 1/2 has this sequence
        let other = sequence(&Point2::from_ratios((1, 2), (2, 5)).unwrap(), 10);
        assert_eq!(other.symbols, u(&[1, 1]));
    }

    #[test]
    fn recover_terminated_is_exact() {
        let p = Point2::from_ratios((1, 2), (1, 3)).unwrap();
        let rec = sequence(&p, 10);
        let k = rec.symbols.len() as isize;
        let t = (rec.d(k - 2).unwrap().approx_rational(), rec.d(k - 1).unwrap().approx_rational());
        let (a, b) = recover_terminated(&rec.symbols, (&t.0, &t.1)).unwrap();
        assert_eq!((a, b), (q(1, 2), q(1, 3)));
    }

    #[test]
    fn json_dump_round_trip() {
        let m = convergent(&u(&[1, 2, 3]));
        let back = IntMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(m.to_json()[0][0].is_string());
    }

    #[test]
    fn recover_until_converges_on_periodic_stream() {
        let trace = recover_until(&u(&[1; 60]), 1e-12);
        assert!(trace.converged);
        let alpha = 0.543_689_012_692_076_4;
        let last = trace.steps.last().unwrap();
        assert!((last.alpha - alpha).abs() < 1e-11);
        assert!((last.beta - alpha * alpha).abs() < 1e-11);
    }
}
