//! Realizing a finite symbol prefix by nested triangles.
//!
//! On `D_k` the triangle map is a projective bijection onto the whole triangle,
//! with inverse `(u, v) -> (1, u) / (1 + k*u + v)`. Pulling the full triangle
//! back through the branches of a prefix, last symbol first, gives the region
//! of all points whose sequence starts with that prefix.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numeric::biguint_to_bigint;
use crate::triangle::Point2;

/// A point with rational coordinates.
pub type RatPoint = (BigRational, BigRational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleRegion {
    pub vertices: [RatPoint; 3],
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl TriangleRegion {
    /// The closed triangle `1 >= x >= y >= 0`, vertices `(0,0), (1,0), (1,1)`.
    pub fn full() -> Self {
        TriangleRegion {
            vertices: [(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))],
        }
    }

    /// Twice the signed area.
    pub fn doubled_area(&self) -> BigRational {
        let [(x0, y0), (x1, y1), (x2, y2)] = &self.vertices;
        (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.doubled_area().is_zero()
    }

    pub fn centroid(&self) -> RatPoint {
        let three = rat(3, 1);
        let [a, b, c] = &self.vertices;
        ((&a.0 + &b.0 + &c.0) / &three, (&a.1 + &b.1 + &c.1) / &three)
    }

    /// Largest squared edge length.
    pub fn diameter_squared(&self) -> BigRational {
        let d2 = |p: &RatPoint, q: &RatPoint| {
            let dx = &p.0 - &q.0;
            let dy = &p.1 - &q.1;
            &dx * &dx + &dy * &dy
        };
        let [a, b, c] = &self.vertices;
        [d2(a, b), d2(b, c), d2(a, c)].into_iter().max().expect("three edges")
    }

    /// Closed containment via barycentric signs.
    pub fn contains(&self, p: &RatPoint) -> bool {
        let [a, b, c] = &self.vertices;
        let orient = |u: &RatPoint, v: &RatPoint, w: &RatPoint| {
            (&v.0 - &u.0) * (&w.1 - &u.1) - (&w.0 - &u.0) * (&v.1 - &u.1)
        };
        let s = [orient(a, b, p), orient(b, c, p), orient(c, a, p)];
        s.iter().all(|v| !v.is_negative()) || s.iter().all(|v| !v.is_positive())
    }

    pub fn contains_region(&self, other: &TriangleRegion) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }
}

/// Preimage of `(u, v)` under the `D_k` branch of the triangle map.
pub fn inverse_branch(k: &BigUint, (u, v): &RatPoint) -> RatPoint {
    let k = BigRational::from_integer(biguint_to_bigint(k));
    let scale = BigRational::one() / (BigRational::one() + &k * u + v);
    (scale.clone(), u * &scale)
}

/// Forward map restricted to the `D_k` branch, used for the round-trip contract.
pub fn forward_branch(k: &BigUint, (a, b): &RatPoint) -> RatPoint {
    let k = BigRational::from_integer(biguint_to_bigint(k));
    (b / a, (BigRational::one() - a - &k * b) / a)
}

/// The subtriangle of `D_k` that the map sends onto `region`.
pub fn preimage_region(k: &BigUint, region: &TriangleRegion) -> TriangleRegion {
    TriangleRegion { vertices: region.vertices.clone().map(|v| inverse_branch(k, &v)) }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub region: TriangleRegion,
    /// Centroid of `region`; an interior point whose sequence starts with the prefix.
    pub witness: RatPoint,
}

impl Realization {
    pub fn witness_point(&self) -> Point2 {
        Point2::new(self.witness.0.clone().into(), self.witness.1.clone().into())
            .expect("centroid of a subregion lies in the triangle")
    }
}

/// Nested region and centroid witness for a nonempty finite prefix.
pub fn realize(symbols: &[BigUint]) -> Realization {
    let region = symbols
        .iter()
        .rev()
        .fold(TriangleRegion::full(), |r, k| preimage_region(k, &r));
    let witness = region.centroid();
    Realization { region, witness }
}

/// Regions for every prefix length `1..=symbols.len()`.
pub fn realize_prefixes(symbols: &[BigUint]) -> Vec<TriangleRegion> {
    (1..=symbols.len()).map(|n| realize(&symbols[..n]).region).collect()
}

/// Parse a comma-separated list of nonnegative integers.
pub fn parse_symbols(s: &str) -> crate::Result<Vec<BigUint>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<BigUint>()
                .map_err(|_| crate::Error::Parse(format!("bad symbol {t:?}")))
        })
        .collect()
}
