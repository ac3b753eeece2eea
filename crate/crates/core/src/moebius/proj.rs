//! Exact points and arcs on the boundary circle `R ∪ {∞}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::matrix::IntMatrix2;

/// A point of the projective line with rational coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Finite(BigRational),
    Infinity,
}

impl ProjPoint {
    pub fn int(n: i64) -> Self {
        ProjPoint::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        ProjPoint::Finite(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }
}

/// Linear order used to walk the circle: finite values ascending, then `∞`.
impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ProjPoint::Infinity, ProjPoint::Infinity) => Ordering::Equal,
            (ProjPoint::Infinity, _) => Ordering::Greater,
            (_, ProjPoint::Infinity) => Ordering::Less,
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Infinity => f.write_str("inf"),
            ProjPoint::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Möbius action `x ↦ (ax + b)/(cx + d)` on the projective line.
pub fn mobius(m: &IntMatrix2, x: &ProjPoint) -> ProjPoint {
    let [a, b, c, d] = m.entries();
    match x {
        ProjPoint::Infinity => {
            if c.is_zero() {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(BigRational::new(a.clone(), c.clone()))
            }
        }
        ProjPoint::Finite(r) => {
            let (n, q) = (r.numer(), r.denom());
            let num = a * n + b * q;
            let den = c * n + d * q;
            if den.is_zero() {
                ProjPoint::Infinity
            } else {
                ProjPoint::Finite(BigRational::new(num, den))
            }
        }
    }
}

/// Closed arc traversed in increasing direction from `start` to `end`,
/// wrapping through `∞` when `start > end`. `start == end` is a single point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub start: ProjPoint,
    pub end: ProjPoint,
}

impl Arc {
    pub fn new(start: ProjPoint, end: ProjPoint) -> Self {
        Arc { start, end }
    }

    fn wraps(&self) -> bool {
        self.start > self.end
    }

    pub fn contains(&self, x: &ProjPoint) -> bool {
        if self.wraps() {
            x >= &self.start || x <= &self.end
        } else {
            &self.start <= x && x <= &self.end
        }
    }

    /// Position of `x` when walking the circle from `origin`.
    fn offset<'a>(origin: &ProjPoint, x: &'a ProjPoint) -> (bool, &'a ProjPoint) {
        (x < origin, x)
    }

    pub fn is_subset_of(&self, other: &Arc) -> bool {
        other.contains(&self.start)
            && other.contains(&self.end)
            && Arc::offset(&other.start, &self.start) <= Arc::offset(&other.start, &self.end)
    }

    /// Closure of the complement.
    pub fn complement(&self) -> Arc {
        Arc::new(self.end.clone(), self.start.clone())
    }

    /// Interiors are disjoint; the arcs may still share endpoints.
    pub fn interiors_disjoint(&self, other: &Arc) -> bool {
        self.is_subset_of(&other.complement())
    }

    /// Endpoints the two arcs have in common (as a set).
    pub fn touch_points(&self, other: &Arc) -> Vec<ProjPoint> {
        let mut out = Vec::new();
        for p in [&self.start, &self.end] {
            if other.contains(p) && !out.contains(p) {
                out.push(p.clone());
            }
        }
        out
    }

    pub fn image(&self, m: &IntMatrix2) -> Arc {
        Arc::new(mobius(m, &self.start), mobius(m, &self.end))
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// A closed rational interval `[lo, hi]` on the real line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatInterval {
    #[serde(serialize_with = "ser_rat")]
    pub lo: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub hi: BigRational,
}

pub(crate) fn ser_rat<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        if lo <= hi {
            RatInterval { lo, hi }
        } else {
            RatInterval { lo: hi, hi: lo }
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn disjoint(&self, other: &RatInterval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    pub fn widen(&self, r: &BigRational) -> RatInterval {
        RatInterval::new(&self.lo - r, &self.hi + r)
    }

    pub fn to_arc(&self) -> Arc {
        Arc::new(
            ProjPoint::Finite(self.lo.clone()),
            ProjPoint::Finite(self.hi.clone()),
        )
    }

    /// Image under a Möbius map whose pole lies outside the interval.
    pub fn image(&self, m: &IntMatrix2) -> Option<RatInterval> {
        let [_, _, c, d] = m.entries();
        let den = |x: &BigRational| x * BigRational::from_integer(c.clone()) + BigRational::from_integer(d.clone());
        let (dl, dh) = (den(&self.lo), den(&self.hi));
        if dl.is_zero() || dh.is_zero() || dl.is_negative() != dh.is_negative() {
            return None;
        }
        match (
            mobius(m, &ProjPoint::Finite(self.lo.clone())),
            mobius(m, &ProjPoint::Finite(self.hi.clone())),
        ) {
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => Some(RatInterval::new(a, b)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(a: ProjPoint, b: ProjPoint) -> Arc {
        Arc::new(a, b)
    }

    #[test]
    fn wrapping_arc_membership() {
        let a = arc(ProjPoint::int(1), ProjPoint::int(-1));
        assert!(a.contains(&ProjPoint::Infinity));
        assert!(a.contains(&ProjPoint::int(5)));
        assert!(a.contains(&ProjPoint::int(-3)));
        assert!(!a.contains(&ProjPoint::int(0)));
    }

    #[test]
    fn subset_respects_direction() {
        let big = arc(ProjPoint::int(0), ProjPoint::int(10));
        assert!(arc(ProjPoint::int(2), ProjPoint::int(3)).is_subset_of(&big));
        assert!(!arc(ProjPoint::int(3), ProjPoint::int(2)).is_subset_of(&big));
        let around = arc(ProjPoint::int(5), ProjPoint::int(-5));
        assert!(arc(ProjPoint::int(7), ProjPoint::Infinity).is_subset_of(&around));
        assert!(arc(ProjPoint::Infinity, ProjPoint::int(-6)).is_subset_of(&around));
        assert!(!arc(ProjPoint::int(-6), ProjPoint::int(7)).is_subset_of(&around));
    }

    #[test]
    fn touching_arcs_have_disjoint_interiors() {
        let a = arc(ProjPoint::int(1), ProjPoint::Infinity);
        let b = arc(ProjPoint::int(0), ProjPoint::int(1));
        assert!(a.interiors_disjoint(&b));
        assert_eq!(a.touch_points(&b), vec![ProjPoint::int(1)]);
        let c = arc(ProjPoint::int(0), ProjPoint::int(2));
        assert!(!a.interiors_disjoint(&c));
    }

    #[test]
    fn mobius_on_infinity() {
        let r = IntMatrix2::new(1, 1, 0, 1).unwrap();
        assert_eq!(mobius(&r, &ProjPoint::Infinity), ProjPoint::Infinity);
        let l = IntMatrix2::new(1, 0, 1, 1).unwrap();
        assert_eq!(mobius(&l, &ProjPoint::Infinity), ProjPoint::int(1));
        assert_eq!(mobius(&l, &ProjPoint::int(-1)), ProjPoint::Infinity);
    }
}
