//! The simplex map on n-tuples `1 >= x_1 >= ... >= x_n > 0`.
//!
//! With `R_i = 1 - x_1 - ... - x_i` the simplex is cut into
//!
//! * `D_k = { R_{n-1} - k x_n >= 0 > R_{n-1} - (k+1) x_n }` for `k >= 0`, and
//! * `D_ij = { R_n < 0, x_j >= R_i >= x_{j+1} }` for `1 <= i <= n-2`, `i < j <= n`,
//!   with `x_{n+1} = 0`.
//!
//! On `D_k` the map shifts the tuple left and appends `R_{n-1} - k x_n`; on
//! `D_ij` it drops `x_1` and inserts `R_i` after `x_j`; both then divide by `x_1`.
//! Everything here runs on the unnormalized `(n+1)`-tuple `d = (1, x_1, ..., x_n)`
//! so that `d(k) = (1, x) M_k` holds for the product of step matrices.
//!
//! Symbols keep the coordinate indexing of the regions: `Pair(i, j)` is `D_ij`
//! above, which touches the entries `d_{i+1}` and `d_{j+1}` of the tuple.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::IntMatrix;
use crate::numeric::{biguint_to_bigint, partial_quotient, ExactNumber, Sign};
use crate::triangle::SequenceStatus;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointN {
    coords: Vec<ExactNumber>,
}

impl PointN {
    pub fn new(coords: Vec<ExactNumber>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DegenerateInput("a point needs at least one coordinate".into()));
        }
        let mut prev = ExactNumber::one();
        for (m, x) in coords.iter().enumerate() {
            if (&prev - x).sign() == Sign::Negative {
                return Err(Error::DegenerateInput(format!("coordinate {} breaks 1 >= x_1 >= ... >= x_n", m + 1)));
            }
            prev = x.clone();
        }
        if prev.sign() == Sign::Negative {
            return Err(Error::DegenerateInput("last coordinate is negative".into()));
        }
        Ok(PointN { coords })
    }

    pub fn from_rationals(coords: &[BigRational]) -> Result<Self> {
        Self::new(coords.iter().cloned().map(ExactNumber::Rational).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[ExactNumber] {
        &self.coords
    }

    fn tuple(&self) -> Vec<ExactNumber> {
        std::iter::once(ExactNumber::one()).chain(self.coords.iter().cloned()).collect()
    }
}

/// `(a, a^2, ..., a^n)`.
pub fn power_point(a: &ExactNumber, n: usize) -> Result<PointN> {
    let mut coords = Vec::with_capacity(n);
    let mut cur = a.clone();
    for _ in 0..n {
        coords.push(cur.clone());
        cur = &cur * a;
    }
    PointN::new(coords)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolN {
    NonNeg(BigUint),
    Pair(usize, usize),
}

impl SymbolN {
    pub fn nonneg(k: u64) -> Self {
        SymbolN::NonNeg(BigUint::from(k))
    }

    /// Checks the index ranges `1 <= i <= n-2`, `i < j <= n` of pair symbols.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            SymbolN::NonNeg(_) => Ok(()),
            SymbolN::Pair(i, j) => {
                if i >= 1 && i + 2 <= n && i < j && j <= n {
                    Ok(())
                } else {
                    Err(Error::InvalidSymbol(format!("({i},{j}) is not a region of the {n}-simplex")))
                }
            }
        }
    }
}

impl fmt::Display for SymbolN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolN::NonNeg(k) => write!(f, "{k}"),
            SymbolN::Pair(i, j) => write!(f, "({i},{j})"),
        }
    }
}

impl FromStr for SymbolN {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad symbol {s:?}"));
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (i, j) = inner.split_once(',').ok_or_else(bad)?;
            let i = i.trim().parse().map_err(|_| bad())?;
            let j = j.trim().parse().map_err(|_| bad())?;
            return Ok(SymbolN::Pair(i, j));
        }
        s.parse::<BigUint>().map(SymbolN::NonNeg).map_err(|_| bad())
    }
}

/// Parse a comma-separated symbol list such as `1,(1,3),0`.
pub fn parse_symbol_list(s: &str) -> Result<Vec<SymbolN>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1).ok_or_else(|| Error::Parse(format!("unbalanced {s:?}")))?,
            ',' if depth == 0 => {
                out.push(s[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(s[start..].parse()?);
    }
    Ok(out)
}

/// Every pair symbol of the n-simplex, in lexicographic order.
pub fn pair_symbols(n: usize) -> Vec<SymbolN> {
    (1..=n.saturating_sub(2))
        .flat_map(|i| (i + 1..=n).map(move |j| SymbolN::Pair(i, j)))
        .collect()
}

fn certified(s: Sign) -> Result<bool> {
    s.is_nonnegative().ok_or(Error::PrecisionExhausted)
}

/// One step of the tuple recursion: the symbol of `d` and the next tuple.
fn advance(d: &[ExactNumber]) -> Result<(SymbolN, Vec<ExactNumber>)> {
    let n = d.len() - 1;
    let last = &d[n];
    match last.sign() {
        Sign::Positive => {}
        Sign::Ambiguous => return Err(Error::PrecisionExhausted),
        _ => return Err(Error::DegenerateInput("last coordinate is zero".into())),
    }
    // slack = d_1 - d_2 - ... - d_n   (R_{n-1} in coordinates)
    let slack = d[1..n].iter().fold(d[0].clone(), |acc, x| &acc - x);
    if certified(slack.sign())? {
        let l = partial_quotient(&slack, last)?;
        let tail = &slack - &last.mul_int(&biguint_to_bigint(&l));
        let mut next: Vec<ExactNumber> = d[1..].to_vec();
        next.push(tail);
        return Ok((SymbolN::NonNeg(l), next));
    }
    // R_i >= 0 > R_{i+1} picks i; R_1 = d_1 - d_2 >= 0 on the simplex
    let mut r_i = &d[0] - &d[1];
    let mut i = 1;
    loop {
        if i > n - 2 {
            return Err(Error::DegenerateInput("no pair region found; tuple is not nonincreasing".into()));
        }
        let r_next = &r_i - &d[i + 1];
        if !certified(r_next.sign())? {
            break;
        }
        r_i = r_next;
        i += 1;
    }
    // largest j with x_j >= R_i
    let mut j = n;
    loop {
        if j <= i {
            return Err(Error::DegenerateInput("no pair region found; tuple is not nonincreasing".into()));
        }
        if certified((&d[j] - &r_i).sign())? {
            break;
        }
        j -= 1;
    }
    let mut next: Vec<ExactNumber> = d[1..=j].to_vec();
    next.push(r_i);
    next.extend(d[j + 1..].iter().cloned());
    Ok((SymbolN::Pair(i, j), next))
}

pub fn classify_nd(p: &PointN) -> Result<SymbolN> {
    advance(&p.tuple()).map(|(s, _)| s)
}

pub fn step_nd(p: &PointN) -> Result<(SymbolN, PointN)> {
    let (s, next) = advance(&p.tuple())?;
    let lead = &next[0];
    let coords = next[1..]
        .iter()
        .map(|x| x.checked_div(lead).ok_or(Error::PrecisionExhausted))
        .collect::<Result<Vec<_>>>()?;
    Ok((s, PointN { coords }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceRecordN {
    pub symbols: Vec<SymbolN>,
    /// `d(0), d(1), ...`, each an `(n+1)`-tuple.
    pub d_history: Vec<Vec<ExactNumber>>,
    pub status: SequenceStatus,
}

pub fn sequence_nd(p: &PointN, max_len: usize) -> SequenceRecordN {
    let mut history = vec![p.tuple()];
    let mut symbols = Vec::new();
    let status = 'run: {
        match p.coords.last().expect("nonempty").sign() {
            Sign::Zero => break 'run SequenceStatus::Terminated,
            Sign::Ambiguous => break 'run SequenceStatus::PrecisionExhausted,
            _ => {}
        }
        while symbols.len() < max_len {
            let cur = history.last().expect("seeded");
            let (s, next) = match advance(cur) {
                Ok(v) => v,
                Err(_) => break 'run SequenceStatus::PrecisionExhausted,
            };
            let sign = next.last().expect("nonempty").sign();
            symbols.push(s);
            history.push(next);
            match sign {
                Sign::Zero => break 'run SequenceStatus::Terminated,
                Sign::Positive => {}
                _ => break 'run SequenceStatus::PrecisionExhausted,
            }
        }
        SequenceStatus::TruncatedAtMaxLength
    };
    SequenceRecordN { symbols, d_history: history, status }
}

/// `(n+1) x (n+1)` step matrix realizing the row action of a symbol.
pub fn step_matrix_nd(s: &SymbolN, n: usize) -> Result<IntMatrix> {
    s.validate(n)?;
    let dim = n + 1;
    Ok(match s {
        SymbolN::NonNeg(a) => {
            let a = biguint_to_bigint(a);
            IntMatrix::from_row_action(dim, |x| {
                let mut out: Vec<BigInt> = x[1..].to_vec();
                let tail = x[1..n].iter().fold(x[0].clone(), |acc, v| acc - v) - &a * &x[n];
                out.push(tail);
                out
            })
        }
        &SymbolN::Pair(i, j) => IntMatrix::from_row_action(dim, |x| {
            let mut out: Vec<BigInt> = x[1..=j].to_vec();
            out.push(x[1..=i].iter().fold(x[0].clone(), |acc, v| acc - v));
            out.extend(x[j + 1..].iter().cloned());
            out
        }),
    })
}

pub fn convergent_nd(symbols: &[SymbolN], n: usize) -> Result<IntMatrix> {
    symbols
        .iter()
        .try_fold(IntMatrix::identity(n + 1), |m, s| Ok(m.mul(&step_matrix_nd(s, n)?)))
}

/// Finite-k estimates `x_j ~ (-1)^j det(minor(j+1, 1)) / det(minor(1, 1))`, the
/// normal to the span of the last `n` columns scaled to first entry `1`.
pub fn recover_nd(m: &IntMatrix, n: usize) -> Result<Vec<BigRational>> {
    if m.dim() != n + 1 {
        return Err(Error::ContractViolation(format!("expected a {0}x{0} matrix", n + 1)));
    }
    let base = m.minor(0, 0).det();
    if base.is_zero() {
        return Err(Error::NotConverged("leading minor is zero".into()));
    }
    Ok((1..=n)
        .map(|j| {
            let v = m.minor(j, 0).det();
            let v = if j % 2 == 1 { -v } else { v };
            BigRational::new(v, base.clone())
        })
        .collect())
}

/// Exact check of `d(k) = (1, x) M_k` along a rational run.
pub fn tuple_identity_check(p: &PointN, record: &SequenceRecordN) -> Result<bool> {
    let n = p.dim();
    let seed = p.tuple();
    let mut m = IntMatrix::identity(n + 1);
    for (k, s) in record.symbols.iter().enumerate() {
        m = m.mul(&step_matrix_nd(s, n)?);
        if m.det().magnitude() != &BigUint::one() {
            return Ok(false);
        }
        let lhs = m.apply_row(&seed);
        let ok = lhs.iter().zip(&record.d_history[k + 1]).all(|(a, b)| match (a, b) {
            (ExactNumber::Rational(x), ExactNumber::Rational(y)) => x == y,
            _ => matches!((a - b).sign(), Sign::Ambiguous | Sign::Zero),
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Decomposition of the simplex into the D_k and D_ij.

fn r_prefix(x: &[BigRational], i: usize) -> BigRational {
    x[..i].iter().fold(BigRational::one(), |acc, v| acc - v)
}

fn coord(x: &[BigRational], j: usize) -> BigRational {
    // 1-based, with x_{n+1} = 0
    x.get(j - 1).cloned().unwrap_or_else(BigRational::zero)
}

/// Membership by the defining inequalities, read literally.
pub fn region_contains(region: &SymbolN, x: &[BigRational]) -> bool {
    let n = x.len();
    match region {
        SymbolN::NonNeg(k) => {
            let k = BigRational::from_integer(biguint_to_bigint(k));
            let s = r_prefix(x, n - 1);
            let lo = &s - &k * &x[n - 1];
            let hi = &lo - &x[n - 1];
            !lo.is_negative() && hi.is_negative()
        }
        &SymbolN::Pair(i, j) => {
            let r = r_prefix(x, i);
            r_prefix(x, n).is_negative() && coord(x, j) >= r && r >= coord(x, j + 1)
        }
    }
}

/// Closed half-spaces `a . x + b >= 0` cutting out a region.
pub fn region_constraints(region: &SymbolN, n: usize) -> Vec<(Vec<BigRational>, BigRational)> {
    let z = BigRational::zero;
    let one = BigRational::one;
    let e = |m: usize, v: BigRational| -> Vec<BigRational> {
        let mut a = vec![z(); n];
        a[m - 1] = v;
        a
    };
    let mut out = vec![(e(1, -one()), one())];
    for m in 1..n {
        let mut a = e(m, one());
        a[m] = -one();
        out.push((a, z()));
    }
    out.push((e(n, one()), z()));
    match region {
        SymbolN::NonNeg(k) => {
            let k = BigRational::from_integer(biguint_to_bigint(k));
            let mut lo = vec![-one(); n];
            lo[n - 1] = -k.clone();
            out.push((lo, one()));
            let mut hi = vec![one(); n];
            hi[n - 1] = k + one();
            out.push((hi, -one()));
        }
        &SymbolN::Pair(i, j) => {
            out.push((vec![one(); n], -one()));
            // x_j - R_i >= 0
            let mut a = vec![z(); n];
            for v in a.iter_mut().take(i) {
                *v = one();
            }
            a[j - 1] += one();
            out.push((a, -one()));
            // R_i - x_{j+1} >= 0
            let mut a = vec![z(); n];
            for v in a.iter_mut().take(i) {
                *v = -one();
            }
            if j < n {
                a[j] -= one();
            }
            out.push((a, one()));
        }
    }
    out
}

/// Solve a square rational system, `None` if singular.
fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = BigRational::one() / &a[col][col];
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some(b)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of a region by brute-force enumeration of its constraint hyperplanes.
pub fn region_vertices(region: &SymbolN, n: usize) -> Vec<Vec<BigRational>> {
    let cons = region_constraints(region, n);
    let mut verts: Vec<Vec<BigRational>> = Vec::new();
    for idx in combinations(cons.len(), n) {
        let a: Vec<Vec<BigRational>> = idx.iter().map(|&c| cons[c].0.clone()).collect();
        let b: Vec<BigRational> = idx.iter().map(|&c| -cons[c].1.clone()).collect();
        let Some(x) = solve(a, b) else { continue };
        let feasible = cons.iter().all(|(a, b)| {
            let v = a.iter().zip(&x).fold(b.clone(), |acc, (ai, xi)| acc + ai * xi);
            !v.is_negative()
        });
        if feasible && !verts.contains(&x) {
            verts.push(x);
        }
    }
    verts.sort();
    verts
}

fn affinely_independent(verts: &[Vec<BigRational>]) -> bool {
    let n = verts.first().map_or(0, |v| v.len());
    if verts.len() != n + 1 {
        return false;
    }
    let rows: Vec<Vec<BigRational>> = verts[1..]
        .iter()
        .map(|v| v.iter().zip(&verts[0]).map(|(a, b)| a - b).collect())
        .collect();
    solve(rows, vec![BigRational::one(); n]).is_some()
}

/// Vertex `v_m` of the simplex: first `m` coordinates 1, the rest 0.
pub fn simplex_vertex(n: usize, m: usize) -> Vec<BigRational> {
    (0..n).map(|c| if c < m { BigRational::one() } else { BigRational::zero() }).collect()
}

/// Named vertices of `D_k`: `v_1`, the points `(1/l, ..., 1/l, 0, ..., 0)` on the
/// edges `v_0 v_l` for `2 <= l < n`, and the two points `1/(n+k-1)`, `1/(n+k)` on `v_0 v_n`.
pub fn nonneg_region_named_vertices(n: usize, k: u64) -> Vec<Vec<BigRational>> {
    let mut out = vec![simplex_vertex(n, 1)];
    for l in 2..n {
        let v = BigRational::new(BigInt::one(), BigInt::from(l));
        out.push((0..n).map(|c| if c < l { v.clone() } else { BigRational::zero() }).collect());
    }
    for den in [n as u64 + k - 1, n as u64 + k] {
        out.push(vec![BigRational::new(BigInt::one(), BigInt::from(den)); n]);
    }
    out.sort();
    out
}

/// The branch of the map attached to `region`, applied to a rational point with `x_1 > 0`.
pub fn branch_map(region: &SymbolN, x: &[BigRational]) -> Vec<BigRational> {
    let n = x.len();
    let lead = &x[0];
    let mut out: Vec<BigRational> = match region {
        SymbolN::NonNeg(k) => {
            let k = BigRational::from_integer(biguint_to_bigint(k));
            let mut v = x[1..].to_vec();
            v.push(r_prefix(x, n - 1) - k * &x[n - 1]);
            v
        }
        &SymbolN::Pair(i, j) => {
            let mut v = x[1..j].to_vec();
            v.push(r_prefix(x, i));
            v.extend(x[j..].iter().cloned());
            v
        }
    };
    for v in out.iter_mut() {
        *v = &*v / lead;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexCheck {
    pub region: String,
    pub vertices: usize,
    pub affinely_independent: bool,
    /// For `D_k`: the enumerated vertices are exactly the named ones.
    pub named_vertices_match: Option<bool>,
    /// The branch map sends the vertices onto the vertices of the simplex.
    pub maps_onto_simplex_vertices: bool,
}

impl VertexCheck {
    pub fn passed(&self, n: usize) -> bool {
        self.vertices == n + 1
            && self.affinely_independent
            && self.named_vertices_match != Some(false)
            && self.maps_onto_simplex_vertices
    }
}

pub fn vertex_check(region: &SymbolN, n: usize) -> VertexCheck {
    let verts = region_vertices(region, n);
    let named = match region {
        SymbolN::NonNeg(k) => {
            let k = u64::try_from(k).unwrap_or(u64::MAX);
            Some(nonneg_region_named_vertices(n, k) == verts)
        }
        SymbolN::Pair(..) => None,
    };
    let mut images: Vec<Vec<BigRational>> = verts
        .iter()
        .filter(|v| !v[0].is_zero())
        .map(|v| branch_map(region, v))
        .collect();
    images.sort();
    let simplex: Vec<Vec<BigRational>> = {
        let mut s: Vec<_> = (0..=n).map(|m| simplex_vertex(n, m)).collect();
        s.sort();
        s
    };
    VertexCheck {
        region: region.to_string(),
        vertices: verts.len(),
        affinely_independent: affinely_independent(&verts),
        named_vertices_match: named,
        maps_onto_simplex_vertices: images == simplex,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub samples: usize,
    /// Draws discarded because they fell on a region boundary.
    pub rejected_boundary: usize,
    pub violations: usize,
    /// Points where `classify_nd` disagreed with the literal membership test.
    pub classify_mismatches: usize,
    pub region_counts: BTreeMap<String, usize>,
    pub vertex_checks: Vec<VertexCheck>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
            && self.classify_mismatches == 0
            && self.vertex_checks.iter().all(|c| c.passed(self.n))
    }
}

/// Largest denominator used when sampling random rational points.
pub const SAMPLE_DENOMINATOR: u64 = 1000;

/// A random rational point of the open simplex with distinct coordinates, or
/// `None` when the draw lies on some region boundary.
fn sample_point(rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<BigRational>> {
    let mut x: Vec<BigRational> = (0..n)
        .map(|_| {
            let den = rng.gen_range(2..=SAMPLE_DENOMINATOR);
            let num = rng.gen_range(1..den);
            BigRational::new(num.into(), den.into())
        })
        .collect();
    x.sort_by(|a, b| b.cmp(a));
    if x.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    if on_boundary(&x) {
        return None;
    }
    Some(x)
}

fn on_boundary(x: &[BigRational]) -> bool {
    let n = x.len();
    if r_prefix(x, n).is_zero() {
        return true;
    }
    let s = r_prefix(x, n - 1);
    if !s.is_negative() && (&s / &x[n - 1]).is_integer() {
        return true;
    }
    (1..=n.saturating_sub(2)).any(|i| {
        let r = r_prefix(x, i);
        (i + 1..=n + 1).any(|j| coord(x, j) == r)
    })
}

struct ChunkResult {
    rejected: usize,
    violation: Option<(Vec<BigRational>, usize)>,
    mismatches: usize,
    counts: BTreeMap<String, usize>,
}

fn run_chunk(n: usize, seed: u64, chunk: u64, quota: usize, pairs: &[SymbolN]) -> ChunkResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut res = ChunkResult { rejected: 0, violation: None, mismatches: 0, counts: BTreeMap::new() };
    let mut accepted = 0;
    while accepted < quota {
        let Some(x) = sample_point(&mut rng, n) else {
            res.rejected += 1;
            continue;
        };
        accepted += 1;
        let mut hits: Vec<SymbolN> = pairs.iter().filter(|s| region_contains(s, &x)).cloned().collect();
        let s = r_prefix(&x, n - 1);
        if !s.is_negative() {
            let k0 = (&s / &x[n - 1]).floor().to_integer();
            for k in [&k0 - 1, k0.clone(), &k0 + 1] {
                if let Ok(k) = BigUint::try_from(k) {
                    let sym = SymbolN::NonNeg(k);
                    if region_contains(&sym, &x) {
                        hits.push(sym);
                    }
                }
            }
        }
        if hits.len() != 1 {
            if res.violation.is_none() {
                res.violation = Some((x.clone(), hits.len()));
            }
            continue;
        }
        let p = PointN::from_rationals(&x).expect("sampled inside the simplex");
        if classify_nd(&p).ok().as_ref() != Some(&hits[0]) {
            res.mismatches += 1;
        }
        let key = match &hits[0] {
            SymbolN::NonNeg(_) => "k".to_string(),
            other => other.to_string(),
        };
        *res.counts.entry(key).or_default() += 1;
    }
    res
}

const CHUNK: usize = 2000;

/// Sample `samples` interior rational points and verify that each lies in exactly
/// one region; also check the vertex structure of `D_0..D_3` and every `D_ij`.
pub fn decomposition_check(n: usize, samples: usize, seed: u64) -> Result<DecompositionReport> {
    if n < 3 {
        return Err(Error::DegenerateInput("the pair regions need n >= 3".into()));
    }
    let pairs = pair_symbols(n);
    let chunks = samples.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let quota = CHUNK.min(samples - c * CHUNK);
            run_chunk(n, seed, c as u64, quota, &pairs)
        })
        .collect();

    let mut report = DecompositionReport {
        n,
        samples,
        rejected_boundary: 0,
        violations: 0,
        classify_mismatches: 0,
        region_counts: BTreeMap::new(),
        vertex_checks: Vec::new(),
    };
    let mut first_violation = None;
    for r in results {
        report.rejected_boundary += r.rejected;
        report.classify_mismatches += r.mismatches;
        if let Some(v) = r.violation {
            report.violations += 1;
            first_violation.get_or_insert(v);
        }
        for (k, c) in r.counts {
            *report.region_counts.entry(k).or_default() += c;
        }
    }
    if let Some((x, regions)) = first_violation {
        let point = x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        return Err(Error::DecompositionViolation { point, regions });
    }
    report.vertex_checks = (0..=3u64)
        .map(SymbolN::nonneg)
        .chain(pairs)
        .map(|s| vertex_check(&s, n))
        .collect();
    Ok(report)
}
