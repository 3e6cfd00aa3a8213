//! Text forms for points.
//!
//! * `p/q,r/s,...` exact rationals (plain decimals are read exactly too)
//! * `dec:<decimal>:<bits>` as one coordinate: a ball at `bits` precision
//! * `root:<poly>:<lo>,<hi>:<powers>` the isolated root `a` of `<poly>` expanded
//!   to `(a, a^2, ..., a^m)`; `<powers>` is `pow2` (m = 2), a count `m`, or
//!   `powers` (m = the requested dimension)

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, refine_root, BigFloat, ExactNumber, IntPolynomial, RootSpec};
use crate::simplex::{power_point, PointN};
use crate::triangle::Point2;

/// Parse `lo,hi`.
pub fn parse_interval(s: &str) -> Result<(BigRational, BigRational)> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("interval must be lo,hi: {s:?}")))?;
    Ok((parse_rational(lo)?, parse_rational(hi)?))
}

/// `(a, a^2, ..., a^count)` for the root of `poly` isolated in `(lo, hi)`.
pub fn root_powers(poly: IntPolynomial, lo: BigRational, hi: BigRational, count: usize, precision: u32) -> Result<PointN> {
    if count == 0 {
        return Err(Error::Parse("need at least one power".into()));
    }
    let spec = RootSpec::new(poly, lo, hi)?;
    power_point(&refine_root(&spec, precision), count)
}

fn parse_coordinate(tok: &str) -> Result<ExactNumber> {
    let tok = tok.trim();
    if let Some(rest) = tok.strip_prefix("dec:") {
        let (value, bits) = rest
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("expected dec:<decimal>:<bits>, got {tok:?}")))?;
        let bits: u32 = bits.parse().map_err(|_| Error::Parse(format!("bad precision {bits:?}")))?;
        return Ok(ExactNumber::Float(BigFloat::from_rational(&parse_rational(value)?, bits)));
    }
    Ok(ExactNumber::Rational(parse_rational(tok)?))
}

/// Coordinates of a point in any of the text forms. `dim` resolves the
/// `powers` form; `precision` applies to roots.
pub fn parse_coordinates(s: &str, dim: Option<usize>, precision: u32) -> Result<Vec<ExactNumber>> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("root:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [poly, interval, powers] = parts[..] else {
            return Err(Error::Parse(format!("expected root:<poly>:<lo>,<hi>:<powers>, got {s:?}")));
        };
        let poly: IntPolynomial = poly.parse()?;
        let (lo, hi) = parse_interval(interval)?;
        let count = match powers {
            "pow2" => 2,
            "powers" => dim.ok_or_else(|| Error::Parse("the powers form needs a dimension".into()))?,
            m => m.parse().map_err(|_| Error::Parse(format!("bad power count {m:?}")))?,
        };
        return Ok(root_powers(poly, lo, hi, count, precision)?.coords().to_vec());
    }
    s.split(',').map(parse_coordinate).collect()
}

pub fn parse_point2(s: &str, precision: u32) -> Result<Point2> {
    match parse_coordinates(s, Some(2), precision)?.as_slice() {
        [a, b] => Point2::new(a.clone(), b.clone()),
        other => Err(Error::Parse(format!("a pair needs 2 coordinates, got {}", other.len()))),
    }
}

pub fn parse_point_n(s: &str, dim: Option<usize>, precision: u32) -> Result<PointN> {
    let coords = parse_coordinates(s, dim, precision)?;
    if let Some(n) = dim {
        if coords.len() != n {
            return Err(Error::Parse(format!("expected {n} coordinates, got {}", coords.len())));
        }
    }
    PointN::new(coords)
}
