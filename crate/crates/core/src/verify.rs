//! Sweep suites over the library, each summarized as a [`SuiteReport`].
//!
//! Inputs are drawn sequentially from a seeded ChaCha8 stream and then checked
//! in parallel; results are collected in case order, so a report depends only
//! on its parameters.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrices::{convergent, fundamental_identity_check, rat_to_f64, recover_pair, recover_terminated};
use crate::numeric::ExactNumber;
use crate::periodicity::{
    conjecture_root, derive_cubic, period_one_polynomial, period_one_root, rational_termination_check,
    residual_below,
};
use crate::realization::realize;
use crate::simplex::{
    classify_nd, decomposition_check, pair_symbols, power_point, sequence_nd, step_matrix_nd, step_nd, PointN,
    SymbolN,
};
use crate::triangle::{classify, gauss_sequence, sequence, step, Point2, SequenceStatus};

pub const SUITES: &[&str] = &[
    "period1",
    "termination",
    "identity",
    "recovery",
    "realization",
    "derive",
    "decomp",
    "reduction",
    "conjecture1",
];

/// Only the first few failing cases are described.
const MAX_NOTES: usize = 20;

/// Step cap for rational runs; they terminate long before this.
const RATIONAL_MAX_LEN: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    pub max_error: Option<f64>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn collect(suite: &str, outcomes: Vec<Outcome>) -> Self {
        let cases = outcomes.len();
        let mut failures = 0;
        let mut notes = Vec::new();
        let mut max_error: Option<f64> = None;
        for o in outcomes {
            if let Some(e) = o.error {
                max_error = Some(max_error.map_or(e, |m| m.max(e)));
            }
            if let Some(note) = o.failure {
                failures += 1;
                if notes.len() < MAX_NOTES {
                    notes.push(note);
                }
            }
        }
        SuiteReport { suite: suite.to_string(), cases, failures, max_error, notes }
    }
}

struct Outcome {
    failure: Option<String>,
    error: Option<f64>,
}

impl Outcome {
    fn pass() -> Self {
        Outcome { failure: None, error: None }
    }

    fn fail(note: String) -> Self {
        Outcome { failure: Some(note), error: None }
    }

    fn check(ok: bool, note: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass()
        } else {
            Self::fail(note())
        }
    }

    fn with_error(mut self, e: f64) -> Self {
        self.error = Some(e);
        self
    }
}

/// Parameters shared by all suites; unset fields take per-suite defaults.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub kmin: Option<u64>,
    pub kmax: Option<u64>,
    pub steps: Option<usize>,
    pub bits: Option<u32>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub max_den: Option<u64>,
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<SuiteReport> {
    let seed = p.seed.unwrap_or(7);
    Ok(match name {
        "period1" => period1(p.kmin.unwrap_or(0), p.kmax.unwrap_or(20), p.steps.unwrap_or(100), p.bits.unwrap_or(512)),
        "termination" => termination(p.samples.unwrap_or(1000), p.max_den.unwrap_or(10_000), seed),
        "identity" => identity(p.samples.unwrap_or(200), p.max_den.unwrap_or(10_000), seed),
        "recovery" => recovery(p.steps.unwrap_or(40), p.bits.unwrap_or(512), p.samples.unwrap_or(200), seed),
        "realization" => realization(p.samples.unwrap_or(200), 8, 4, seed),
        "derive" => derive(p.kmin.unwrap_or(1), p.kmax.unwrap_or(5), p.bits.unwrap_or(256)),
        "decomp" => decomp(p.n.unwrap_or(3), p.samples.unwrap_or(100_000), seed)?,
        "reduction" => reduction(p.samples.unwrap_or(100), 10 * p.samples.unwrap_or(100), seed),
        "conjecture1" => conjecture1(&[3, 4], p.kmax.unwrap_or(5), p.steps.unwrap_or(30), p.bits.unwrap_or(512)),
        other => return Err(Error::Parse(format!("unknown suite {other:?}; known: {}", SUITES.join(", ")))),
    })
}

fn rational(rng: &mut ChaCha8Rng, max_den: u64) -> BigRational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(1..=den);
    BigRational::new(num.into(), den.into())
}

/// `1 >= alpha >= beta > 0` with both denominators at most `max_den`.
pub fn random_pair(rng: &mut ChaCha8Rng, max_den: u64) -> (BigRational, BigRational) {
    let a = rational(rng, max_den);
    let b = rational(rng, max_den);
    if a >= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn pairs(samples: usize, max_den: u64, seed: u64) -> Vec<(BigRational, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| random_pair(&mut rng, max_den)).collect()
}

fn point(a: &BigRational, b: &BigRational) -> Point2 {
    Point2::new(a.clone().into(), b.clone().into()).expect("sorted pair in the triangle")
}

fn leading_run(symbols: &[BigUint], k: &BigUint) -> usize {
    symbols.iter().take_while(|s| *s == k).count()
}

/// `(rho, rho^2)` for the period-one root must give `steps` symbols equal to `k`.
pub fn period1(kmin: u64, kmax: u64, steps: usize, bits: u32) -> SuiteReport {
    let outcomes = (kmin..=kmax)
        .into_par_iter()
        .map(|k| {
            let rho = period_one_root(k, bits);
            let p = Point2::new(rho.clone(), &rho * &rho).expect("root lies in (0, 1)");
            let rec = sequence(&p, steps);
            let kk = BigUint::from(k);
            let run = leading_run(&rec.symbols, &kk);
            Outcome::check(run == steps && rec.status == SequenceStatus::TruncatedAtMaxLength, || {
                format!("k={k}: {run} symbols equal to k, then {}", rec.status.as_str())
            })
        })
        .collect();
    SuiteReport::collect("period1", outcomes)
}

/// Rational pairs terminate; the cleared-denominator integer run decreases
/// strictly and agrees with the rational run.
pub fn termination(samples: usize, max_den: u64, seed: u64) -> SuiteReport {
    let outcomes = pairs(samples, max_den, seed)
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let rec = sequence(&point(a, b), RATIONAL_MAX_LEN);
            if rec.status != SequenceStatus::Terminated {
                return Outcome::fail(format!("case {i} ({a}, {b}): {}", rec.status.as_str()));
            }
            let l = a.denom().lcm(b.denom());
            let scale = |r: &BigRational| (r * BigRational::from_integer(l.clone())).to_integer();
            match rational_termination_check(&l, &scale(a), &scale(b)) {
                Ok((symbols, _)) => Outcome::check(symbols == rec.symbols, || {
                    format!("case {i} ({a}, {b}): integer and rational runs disagree")
                }),
                Err(e) => Outcome::fail(format!("case {i} ({a}, {b}): {e}")),
            }
        })
        .collect();
    SuiteReport::collect("termination", outcomes)
}

/// `(d_{k-2}, d_{k-1}, d_k) = (1, alpha, beta) M_k` exactly with `det M_k = 1`
/// at every step of terminating rational runs.
pub fn identity(samples: usize, max_den: u64, seed: u64) -> SuiteReport {
    let outcomes = pairs(samples, max_den, seed)
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let p = point(a, b);
            let rec = sequence(&p, RATIONAL_MAX_LEN);
            match fundamental_identity_check(&p, &rec.symbols, rec.symbols.len()) {
                Ok(true) => Outcome::pass(),
                Ok(false) => Outcome::fail(format!("case {i} ({a}, {b}): identity fails")),
                Err(e) => Outcome::fail(format!("case {i} ({a}, {b}): {e}")),
            }
        })
        .collect();
    SuiteReport::collect("identity", outcomes)
}

/// Upper bound on `|x - r|` for every value the ball or rational `x` admits.
fn distance_bound(x: &ExactNumber, r: &BigRational) -> BigRational {
    match x {
        ExactNumber::Rational(v) => (v - r).abs(),
        ExactNumber::Float(f) => (f.midpoint() - r).abs() + f.radius(),
    }
}

/// Cross-product recovery of the `k = 1` period-one point within `1e-12`, and
/// exact recovery of terminated rational pairs from their terminal state.
pub fn recovery(steps: usize, bits: u32, samples: usize, seed: u64) -> SuiteReport {
    let mut outcomes = Vec::with_capacity(samples + 1);
    let rho = period_one_root(1, bits);
    let p = Point2::new(rho.clone(), &rho * &rho).expect("root lies in (0, 1)");
    let rec = sequence(&p, steps);
    outcomes.push(match recover_pair(&convergent(&rec.symbols)) {
        Ok((ah, bh)) if rec.symbols.len() == steps => {
            let err = distance_bound(&p.alpha, &ah).max(distance_bound(&p.beta, &bh));
            let tol = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
            let e = rat_to_f64(&err);
            Outcome::check(err < tol, || format!("period-one k=1: error {e:e} after {steps} steps")).with_error(e)
        }
        Ok(_) => Outcome::fail(format!("period-one k=1: only {} symbols", rec.symbols.len())),
        Err(e) => Outcome::fail(format!("period-one k=1: {e}")),
    });
    outcomes.par_extend(pairs(samples, 10_000, seed).par_iter().enumerate().map(|(i, (a, b))| {
        let rec = sequence(&point(a, b), RATIONAL_MAX_LEN);
        let n = rec.d_history.len();
        let (Some(d2), Some(d1)) = (rec.d_history[n - 3].as_rational(), rec.d_history[n - 2].as_rational()) else {
            return Outcome::fail(format!("case {i}: non-rational history"));
        };
        match recover_terminated(&rec.symbols, (d2, d1)) {
            Ok((ra, rb)) => {
                let e = rat_to_f64(&(&ra - a).abs().max((&rb - b).abs()));
                Outcome::check(&ra == a && &rb == b, || format!("case {i} ({a}, {b}): recovered ({ra}, {rb})"))
                    .with_error(e)
            }
            Err(e) => Outcome::fail(format!("case {i} ({a}, {b}): {e}")),
        }
    }));
    SuiteReport::collect("recovery", outcomes)
}

/// Centroid witnesses reproduce random prefixes; prefix regions nest strictly.
pub fn realization(samples: usize, max_len: usize, max_symbol: u64, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<Vec<BigUint>> = (0..samples)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len).map(|_| BigUint::from(rng.gen_range(0..=max_symbol))).collect()
        })
        .collect();
    let outcomes = inputs
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let r = realize(s);
            let rec = sequence(&r.witness_point(), s.len());
            if rec.symbols != *s {
                return Outcome::fail(format!("case {i} {s:?}: witness gives {:?}", rec.symbols));
            }
            let regions: Vec<_> = (1..=s.len()).map(|m| realize(&s[..m]).region).collect();
            let nested = std::iter::once(&crate::realization::TriangleRegion::full())
                .chain(regions.iter())
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| {
                    w[0].contains_region(w[1])
                        && !w[1].is_degenerate()
                        && w[1].doubled_area().abs() < w[0].doubled_area().abs()
                });
            Outcome::check(nested, || format!("case {i} {s:?}: regions do not nest strictly"))
        })
        .collect();
    SuiteReport::collect("realization", outcomes)
}

/// The eliminant of `M_{m+1} M_m^{-1}` on `(k, k, ...)` is divisible by
/// `x^3 + k x^2 + x - 1` and vanishes at the certified root.
pub fn derive(kmin: u64, kmax: u64, bits: u32) -> SuiteReport {
    let outcomes = (kmin..=kmax)
        .into_par_iter()
        .map(|k| {
            let s = vec![BigUint::from(k); 3];
            let e = match derive_cubic(&s, 3, 2, false) {
                Ok(e) => e,
                Err(err) => return Outcome::fail(format!("k={k}: {err}")),
            };
            let divisible = e.exact_div(&period_one_polynomial(k)).is_some();
            let rho = period_one_root(k, bits);
            let bound = BigRational::new(BigInt::one(), BigInt::one() << (bits / 2));
            let small = residual_below(&e, &rho, &bound);
            let residual = rat_to_f64(&distance_bound(&crate::numeric::eval_poly(&e, &rho), &BigRational::zero()));
            Outcome::check(divisible && small, || {
                format!("k={k}: eliminant {e}, divisible {divisible}, residual below 2^-{} {small}", bits / 2)
            })
            .with_error(residual)
        })
        .collect();
    SuiteReport::collect("derive", outcomes)
}

/// Disjoint cover of the simplex by the `D_k` and `D_ij`, and region vertices.
pub fn decomp(n: usize, samples: usize, seed: u64) -> Result<SuiteReport> {
    let report = match decomposition_check(n, samples, seed) {
        Ok(r) => r,
        Err(e @ Error::DecompositionViolation { .. }) => {
            return Ok(SuiteReport {
                suite: "decomp".into(),
                cases: samples,
                failures: 1,
                max_error: None,
                notes: vec![e.to_string()],
            })
        }
        Err(e) => return Err(e),
    };
    let mut notes = Vec::new();
    let bad_vertices: Vec<_> = report.vertex_checks.iter().filter(|c| !c.passed(n)).collect();
    for c in bad_vertices.iter().take(MAX_NOTES) {
        notes.push(format!("region {}: vertex check failed", c.region));
    }
    if report.classify_mismatches > 0 {
        notes.push(format!("{} classify mismatches", report.classify_mismatches));
    }
    Ok(SuiteReport {
        suite: "decomp".into(),
        cases: report.samples + report.vertex_checks.len(),
        failures: report.violations + report.classify_mismatches + bad_vertices.len(),
        max_error: None,
        notes,
    })
}

/// `n = 1` against the Gauss map and `n = 2` against the triangle map.
pub fn reduction(samples_1d: usize, samples_2d: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ones: Vec<BigRational> = (0..samples_1d).map(|_| rational(&mut rng, 10_000)).collect();
    let twos: Vec<(BigRational, BigRational)> = (0..samples_2d).map(|_| random_pair(&mut rng, 10_000)).collect();

    let mut outcomes: Vec<Outcome> = ones
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let p = PointN::from_rationals(std::slice::from_ref(x)).expect("x in (0, 1]");
            let nd = sequence_nd(&p, RATIONAL_MAX_LEN);
            let g = gauss_sequence(&x.clone().into(), RATIONAL_MAX_LEN);
            let same = nd.status == g.status
                && nd.symbols.len() == g.symbols.len()
                && nd.symbols.iter().zip(&g.symbols).all(|(s, a)| *s == SymbolN::NonNeg(a.clone()));
            Outcome::check(same, || format!("n=1 case {i} ({x}): simplex and Gauss digits differ"))
        })
        .collect();

    outcomes.par_extend(twos.par_iter().enumerate().map(|(i, (a, b))| {
        let p2 = point(a, b);
        let pn = PointN::from_rationals(&[a.clone(), b.clone()]).expect("sorted pair");
        let class = match (classify(&p2), classify_nd(&pn)) {
            (Ok(k), Ok(s)) => s == SymbolN::NonNeg(k),
            _ => false,
        };
        let stepped = match (step(&p2), step_nd(&pn)) {
            (Ok((k, q2)), Ok((s, qn))) => s == SymbolN::NonNeg(k) && qn.coords() == [q2.alpha, q2.beta],
            _ => false,
        };
        let r2 = sequence(&p2, RATIONAL_MAX_LEN);
        let rn = sequence_nd(&pn, RATIONAL_MAX_LEN);
        let seq = r2.status == rn.status
            && rn.symbols.len() == r2.symbols.len()
            && rn.symbols.iter().zip(&r2.symbols).all(|(s, k)| *s == SymbolN::NonNeg(k.clone()));
        Outcome::check(class && stepped && seq, || {
            format!("n=2 case {i} ({a}, {b}): classify {class}, step {stepped}, sequence {seq}")
        })
    }));
    SuiteReport::collect("reduction", outcomes)
}

/// `(a, ..., a^n)` for the root of `x^(n+1) + k x^n + ... + x - 1` repeats the
/// symbol `k`; every step matrix has determinant `+-1`.
pub fn conjecture1(ns: &[usize], kmax: u64, steps: usize, bits: u32) -> SuiteReport {
    let cases: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..=kmax).map(move |k| (n, k))).collect();
    let mut outcomes: Vec<Outcome> = cases
        .par_iter()
        .map(|&(n, k)| {
            let p = power_point(&conjecture_root(n, k, bits), n).expect("powers of a root in (0, 1)");
            let rec = sequence_nd(&p, steps);
            let sym = SymbolN::nonneg(k);
            let run = rec.symbols.iter().take_while(|s| **s == sym).count();
            let det_ok = step_matrix_nd(&sym, n).map(|m| m.det().abs().is_one()).unwrap_or(false);
            Outcome::check(run == steps && rec.status == SequenceStatus::TruncatedAtMaxLength && det_ok, || {
                format!("n={n} k={k}: {run} symbols equal to k, then {}; det ok {det_ok}", rec.status.as_str())
            })
        })
        .collect();
    // determinant sweep over every symbol kind
    let bad: Vec<String> = (2..=5usize)
        .flat_map(|n| {
            (0..=10u64)
                .map(SymbolN::nonneg)
                .chain(pair_symbols(n))
                .filter(move |s| !step_matrix_nd(s, n).map(|m| m.det().abs().is_one()).unwrap_or(false))
                .map(move |s| format!("n={n} {s}"))
        })
        .collect();
    outcomes.push(Outcome::check(bad.is_empty(), || format!("det != +-1 for {}", bad.join(", "))));
    SuiteReport::collect("conjecture1", outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        assert!(period1(0, 3, 60, 512).passed());
        assert!(termination(50, 1000, 1).passed());
        assert!(identity(20, 1000, 2).passed());
        assert!(recovery(40, 256, 20, 3).passed());
        assert!(realization(30, 6, 4, 4).passed());
        assert!(derive(1, 3, 256).passed());
        assert!(decomp(3, 500, 5).unwrap().passed());
        assert!(reduction(20, 50, 6).passed());
        assert!(conjecture1(&[3], 2, 20, 512).passed());
    }

    #[test]
    fn short_root_precision_is_reported() {
        // 64 bits cannot carry 100 steps of the k = 20 fixed point
        let r = period1(20, 20, 100, 64);
        assert_eq!((r.cases, r.failures), (1, 1));
        assert!(r.notes[0].contains("precision-exhausted"), "{:?}", r.notes);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("termination", &SuiteParams { samples: Some(30), seed: Some(9), ..Default::default() });
        let b = run_suite("termination", &SuiteParams { samples: Some(30), seed: Some(9), ..Default::default() });
        assert_eq!(a.unwrap(), b.unwrap());
        assert!(run_suite("nope", &SuiteParams::default()).is_err());
    }

    #[test]
    fn random_pairs_are_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (a, b) = random_pair(&mut rng, 50);
            assert!(a >= b && b.is_positive() && a <= BigRational::one());
        }
    }
}
