//! Exact arithmetic on finite-dimensional tori with rational coordinates.
//!
//! Distances use the max-coordinate circle metric: the distance between two
//! points of T^d is the maximum over coordinates of the circular distance
//! `min(|x - y|, 1 - |x - y|)`. Everything here is exact: results carry no
//! rounding and are independent of evaluation order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::serde_rat;

/// Reduces a rational into `[0, 1)`: returns `q - floor(q)`.
pub fn torus_reduce(q: &BigRational) -> BigRational {
    let f = q.floor();
    q - f
}

/// Circular distance between two reduced points of the 1-torus.
///
/// Value lies in `[0, 1/2]`.
pub fn circle_dist(x: &BigRational, y: &BigRational) -> BigRational {
    let d = (torus_reduce(x) - torus_reduce(y)).abs();
    let one = BigRational::one();
    let wrap = &one - &d;
    if d <= wrap {
        d
    } else {
        wrap
    }
}

/// An exact rational point of T^d. Coordinates are kept reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint {
    #[serde(with = "crate::rat::serde_rat_vec")]
    coords: Vec<BigRational>,
}

impl TorusPoint {
    /// Builds a point from arbitrary rational coordinates, reducing each into `[0, 1)`.
    pub fn new(coords: Vec<BigRational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("torus point needs dim >= 1".into()));
        }
        Ok(TorusPoint { coords: coords.iter().map(torus_reduce).collect() })
    }

    pub fn one_dim(x: BigRational) -> Self {
        TorusPoint { coords: vec![torus_reduce(&x)] }
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "torus point needs dim >= 1");
        TorusPoint { coords: vec![BigRational::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// The single coordinate of a 1-dimensional point.
    pub fn coord_1d(&self) -> &BigRational {
        assert_eq!(self.coords.len(), 1, "coord_1d on a point of dim != 1");
        &self.coords[0]
    }

    /// Concatenates the coordinates of two points.
    pub fn concat(&self, other: &TorusPoint) -> TorusPoint {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        TorusPoint { coords }
    }

    /// Pads with zero coordinates up to `dim`. Distances are unchanged because
    /// the metric takes the max over coordinates and new coordinates coincide.
    pub fn pad_to(&self, dim: usize) -> TorusPoint {
        let mut coords = self.coords.clone();
        while coords.len() < dim {
            coords.push(BigRational::zero());
        }
        TorusPoint { coords }
    }
}

/// Max-coordinate circle distance between points of equal dimension.
pub fn torus_dist(x: &TorusPoint, y: &TorusPoint) -> Result<BigRational> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let mut best = BigRational::zero();
    for (a, b) in x.coords.iter().zip(&y.coords) {
        let d = circle_dist(a, b);
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Minimum pairwise distance between two nonempty finite subsets of T^d.
pub fn set_dist(xs: &[TorusPoint], ys: &[TorusPoint]) -> Result<BigRational> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySet("set_dist"));
    }
    let mut best: Option<BigRational> = None;
    for x in xs {
        for y in ys {
            let d = torus_dist(x, y)?;
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
    }
    Ok(best.unwrap())
}

/// The point `r * alpha`, reduced coordinate-wise. Exact for any integer `r`.
pub fn scalar_orbit(r: &BigInt, alpha: &TorusPoint) -> TorusPoint {
    let r = BigRational::from(r.clone());
    TorusPoint { coords: alpha.coords.iter().map(|c| torus_reduce(&(&r * c))).collect() }
}

/// Distance of a point to the origin of its torus.
pub fn norm_to_zero(x: &TorusPoint) -> BigRational {
    torus_dist(x, &TorusPoint::origin(x.dim())).expect("dims match")
}

/// An arc on the circle with rational endpoints, possibly wrapping through 0.
///
/// Endpoints are normalized into `[0, 1)`; `full` marks the whole circle
/// (where endpoints alone would be ambiguous).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleInterval {
    #[serde(with = "serde_rat")]
    pub left: BigRational,
    #[serde(with = "serde_rat")]
    pub right: BigRational,
    pub closed_left: bool,
    pub closed_right: bool,
    pub full: bool,
}

impl CircleInterval {
    pub fn full() -> Self {
        CircleInterval {
            left: BigRational::zero(),
            right: BigRational::zero(),
            closed_left: true,
            closed_right: false,
            full: true,
        }
    }

    pub fn new(left: &BigRational, right: &BigRational, closed_left: bool, closed_right: bool) -> Self {
        CircleInterval {
            left: torus_reduce(left),
            right: torus_reduce(right),
            closed_left,
            closed_right,
            full: false,
        }
    }

    /// Open arc `(left, right)`.
    pub fn open(left: &BigRational, right: &BigRational) -> Self {
        Self::new(left, right, false, false)
    }

    /// Half-open arc `[left, right)`.
    pub fn half_open(left: &BigRational, right: &BigRational) -> Self {
        Self::new(left, right, true, false)
    }

    pub fn wraps(&self) -> bool {
        !self.full && self.right < self.left
    }

    /// Arc length in `[0, 1]`.
    pub fn length(&self) -> BigRational {
        if self.full {
            return BigRational::one();
        }
        torus_reduce(&(&self.right - &self.left))
    }

    /// Midpoint of the arc (for the full circle: 0).
    pub fn midpoint(&self) -> BigRational {
        if self.full {
            return BigRational::zero();
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        torus_reduce(&(&self.left + self.length() * half))
    }

    /// Exact membership test; the query point is reduced first.
    pub fn contains(&self, x: &BigRational) -> bool {
        if self.full {
            return true;
        }
        let x = torus_reduce(x);
        let after_left = if self.closed_left { x >= self.left } else { x > self.left };
        let before_right = if self.closed_right { x <= self.right } else { x < self.right };
        if self.wraps() {
            after_left || before_right
        } else {
            after_left && before_right
        }
    }

    /// True iff the closed interval `[lo, hi]` (of reals, `0 <= lo <= hi < 1`)
    /// is disjoint from this arc. Used for certified verdicts about orbit
    /// points known only up to an enclosure.
    pub fn disjoint_from_enclosure(&self, lo: &BigRational, hi: &BigRational) -> bool {
        if self.full {
            return false;
        }
        debug_assert!(lo <= hi);
        // The enclosure must avoid the arc entirely. Split the arc into its
        // linear pieces (wrapping arcs cover [left,1) and [0,right]).
        let pieces: Vec<(BigRational, bool, BigRational, bool)> = if self.wraps() {
            vec![
                (self.left.clone(), self.closed_left, BigRational::one(), false),
                (BigRational::zero(), true, self.right.clone(), self.closed_right),
            ]
        } else {
            vec![(self.left.clone(), self.closed_left, self.right.clone(), self.closed_right)]
        };
        for (l, cl, r, cr) in pieces {
            // [lo, hi] intersects [l, r] (with open/closed ends on the arc side)?
            let left_of = if cl { hi < &l } else { hi <= &l };
            let right_of = if cr { lo > &r } else { lo >= &r };
            if !(left_of || right_of) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use num_traits::Pow;

    #[test]
    fn reduce_examples() {
        assert_eq!(torus_reduce(&rat(7, 3)), rat(1, 3));
        assert_eq!(torus_reduce(&rat(-1, 4)), rat(3, 4));
        assert_eq!(torus_reduce(&rat(0, 1)), rat(0, 1));
    }

    #[test]
    fn circle_dist_examples() {
        assert_eq!(circle_dist(&rat(1, 4), &rat(3, 4)), rat(1, 2));
        assert_eq!(circle_dist(&rat(0, 1), &rat(9, 10)), rat(1, 10));
        assert_eq!(circle_dist(&rat(1, 3), &rat(1, 3)), rat(0, 1));
    }

    #[test]
    fn torus_dist_examples() {
        let x = TorusPoint::new(vec![rat(0, 1), rat(0, 1)]).unwrap();
        let y = TorusPoint::new(vec![rat(1, 2), rat(1, 10)]).unwrap();
        assert_eq!(torus_dist(&x, &y).unwrap(), rat(1, 2));
        // d = 1 reduces to circle_dist
        let a = TorusPoint::one_dim(rat(1, 4));
        let b = TorusPoint::one_dim(rat(3, 4));
        assert_eq!(torus_dist(&a, &b).unwrap(), circle_dist(&rat(1, 4), &rat(3, 4)));
        assert_eq!(torus_dist(&x, &x).unwrap(), rat(0, 1));
        let bad = TorusPoint::one_dim(rat(1, 2));
        assert!(torus_dist(&x, &bad).is_err());
    }

    #[test]
    fn set_dist_examples() {
        let xs = vec![TorusPoint::one_dim(rat(1, 3))];
        let ys = vec![TorusPoint::one_dim(rat(2, 3))];
        assert_eq!(set_dist(&xs, &ys).unwrap(), rat(1, 3));
        assert_eq!(set_dist(&xs, &xs).unwrap(), rat(0, 1));
        let xs = vec![TorusPoint::one_dim(rat(0, 1)), TorusPoint::one_dim(rat(1, 2))];
        let ys = vec![TorusPoint::one_dim(rat(1, 4))];
        assert_eq!(set_dist(&xs, &ys).unwrap(), rat(1, 4));
        assert!(set_dist(&[], &ys).is_err());
    }

    #[test]
    fn scalar_orbit_examples() {
        let third = TorusPoint::one_dim(rat(1, 3));
        assert_eq!(scalar_orbit(&BigInt::from(5), &third), TorusPoint::one_dim(rat(2, 3)));
        assert_eq!(scalar_orbit(&BigInt::from(0), &third), TorusPoint::origin(1));
        // 2^64 mod 3 = 1
        let big = BigInt::from(2).pow(64u32);
        assert_eq!(scalar_orbit(&big, &third), TorusPoint::one_dim(rat(1, 3)));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_to_zero(&TorusPoint::one_dim(rat(3, 4))), rat(1, 4));
        assert_eq!(norm_to_zero(&TorusPoint::origin(3)), rat(0, 1));
        let p = TorusPoint::new(vec![rat(1, 2), rat(1, 8)]).unwrap();
        assert_eq!(norm_to_zero(&p), rat(1, 2));
    }

    #[test]
    fn interval_membership() {
        let arc = CircleInterval::half_open(&rat(3, 4), &rat(1, 1)); // [3/4, 1) == [3/4, 0)
        assert!(arc.contains(&rat(3, 4)));
        assert!(arc.contains(&rat(9, 10)));
        assert!(!arc.contains(&rat(0, 1)));
        assert!(!arc.contains(&rat(1, 2)));

        let wrap = CircleInterval::new(&rat(9, 10), &rat(1, 10), true, true);
        assert!(wrap.wraps());
        assert!(wrap.contains(&rat(0, 1)));
        assert!(wrap.contains(&rat(19, 20)));
        assert!(!wrap.contains(&rat(1, 2)));
        assert_eq!(wrap.length(), rat(1, 5));

        assert!(CircleInterval::full().contains(&rat(17, 23)));
    }

    #[test]
    fn enclosure_disjointness() {
        let arc = CircleInterval::half_open(&rat(3, 4), &rat(1, 1));
        // [1/2, 5/8] is clear of [3/4, 1)
        assert!(arc.disjoint_from_enclosure(&rat(1, 2), &rat(5, 8)));
        // touching the closed end is not disjoint
        assert!(!arc.disjoint_from_enclosure(&rat(5, 8), &rat(3, 4)));
        // [0, 1/8] sits inside the excluded-from-arc region
        assert!(arc.disjoint_from_enclosure(&rat(0, 1), &rat(1, 8)));
    }

    #[test]
    fn midpoints() {
        assert_eq!(CircleInterval::open(&rat(1, 4), &rat(1, 2)).midpoint(), rat(3, 8));
        let wrap = CircleInterval::open(&rat(9, 10), &rat(1, 10));
        assert_eq!(wrap.midpoint(), rat(0, 1));
        assert_eq!(CircleInterval::full().midpoint(), rat(0, 1));
    }
}
