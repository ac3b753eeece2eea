use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::IntMatrix2;

/// A reduced fraction `p/q` with `q ≥ 0`; `1/0` is the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    p: BigInt,
    q: BigInt,
}

impl Slope {
    /// Normalizes `p/q`; fails only for `0/0`.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(Error::Domain("0/0 is not a slope".into()));
        }
        Ok(Slope::normalized(p, q))
    }

    pub(crate) fn normalized(p: BigInt, q: BigInt) -> Self {
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Slope { p, q }
    }

    pub fn infinity() -> Self {
        Slope { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn int(n: i64) -> Self {
        Slope { p: BigInt::from(n), q: BigInt::one() }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    /// `max(|p|, q)`.
    pub fn height(&self) -> BigInt {
        self.p.abs().max(self.q.clone())
    }

    pub fn apply(&self, m: &IntMatrix2) -> Slope {
        let [a, b, c, d] = m.entries();
        Slope::normalized(a * &self.p + b * &self.q, c * &self.p + d * &self.q)
    }

    /// `p s - q r` for `self = p/q`, `other = r/s`.
    pub fn det(&self, other: &Slope) -> BigInt {
        &self.p * &other.q - &self.q * &other.p
    }

    /// Farey sum `(p + r)/(q + s)` of the representatives.
    pub fn mediant(&self, other: &Slope) -> Slope {
        Slope::normalized(&self.p + &other.p, &self.q + &other.q)
    }

    /// `(p - r)/(q - s)` of the representatives.
    pub fn difference(&self, other: &Slope) -> Slope {
        Slope::normalized(&self.p - &other.p, &self.q - &other.q)
    }

    /// A determinant-one matrix sending `∞` to `self` and `0` to `other`;
    /// `self` and `other` must be adjacent.
    pub fn edge_matrix(&self, other: &Slope) -> IntMatrix2 {
        let (p, q, r, s) = (&self.p, &self.q, &other.p, &other.q);
        if self.det(other).is_one() {
            IntMatrix2::canonical(p.clone(), r.clone(), q.clone(), s.clone())
        } else {
            IntMatrix2::canonical(p.clone(), -r, q.clone(), -s)
        }
    }

    /// A determinant-one matrix sending `∞` to `self`.
    pub fn frame(&self) -> IntMatrix2 {
        let e = self.p.extended_gcd(&self.q);
        // p·x + q·y = 1, so [[p, -y], [q, x]] has determinant one.
        IntMatrix2::canonical(self.p.clone(), -e.y, self.q.clone(), e.x)
    }
}

/// Adjacency in the Farey graph.
pub fn farey_adjacent(a: &Slope, b: &Slope) -> bool {
    a.det(b).abs().is_one()
}

/// Orders by `(q, p)`; this is the geodesic tie-break order.
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.cmp(&other.q).then_with(|| self.p.cmp(&other.p))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Accepts `p/q`, an integer `n`, or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(Slope::infinity());
        }
        let bad = || Error::Parse(format!("bad slope `{s}`"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Slope::new(p, q).map_err(|_| bad())
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Slope {
        x.parse().unwrap()
    }

    #[test]
    fn normalization() {
        assert_eq!(s("2/-4"), s("-1/2"));
        assert_eq!(s("-3/0"), Slope::infinity());
        assert_eq!(s("inf").to_string(), "1/0");
        assert_eq!(s("7"), Slope::int(7));
        assert!("0/0".parse::<Slope>().is_err());
        assert!("x/2".parse::<Slope>().is_err());
    }

    #[test]
    fn adjacency_examples() {
        assert!(farey_adjacent(&s("0/1"), &s("1/0")));
        assert!(farey_adjacent(&s("1/2"), &s("1/3")));
        assert!(!farey_adjacent(&s("1/1"), &s("-1/1")));
    }

    #[test]
    fn apply_examples() {
        let r = IntMatrix2::new(1, 1, 0, 1).unwrap();
        assert_eq!(s("0/1").apply(&r), s("1/1"));
        assert_eq!(Slope::infinity().apply(&r), Slope::infinity());
        assert_eq!(s("3/7").apply(&IntMatrix2::identity()), s("3/7"));
    }

    #[test]
    fn edge_matrix_sends_frame() {
        for (u, v) in [("0/1", "1/0"), ("1/2", "1/3"), ("-2/3", "-1/1"), ("1/0", "5/1")] {
            let (u, v) = (s(u), s(v));
            let m = u.edge_matrix(&v);
            assert_eq!(Slope::infinity().apply(&m), u);
            assert_eq!(Slope::int(0).apply(&m), v);
        }
    }

    #[test]
    fn frame_sends_infinity() {
        for x in ["0/1", "5/7", "-13/8", "1/0", "4/1"] {
            assert_eq!(Slope::infinity().apply(&s(x).frame()), s(x));
        }
    }

    #[test]
    fn order_is_by_denominator_first() {
        let mut v = vec![s("1/2"), s("1/0"), s("-1/1"), s("0/1"), s("-1/2")];
        v.sort();
        assert_eq!(v, vec![s("1/0"), s("-1/1"), s("0/1"), s("-1/2"), s("1/2")]);
    }
}
