//! Fixed points of Möbius maps as exact rational enclosures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::matrix::{IntMatrix2, MatrixClass};
use super::proj::{ProjPoint, RatInterval};
use crate::error::{Error, Result};

/// One root `((a - d) + s·√D) / 2c` of `c x² + (d - a) x - b = 0`,
/// with `√D` bracketed by rationals.
#[derive(Clone, Debug)]
struct QuadraticRoot {
    base: BigRational,
    two_c: BigRational,
    sign: i8,
    disc: BigRational,
    sqrt_lo: BigRational,
    sqrt_hi: BigRational,
}

impl QuadraticRoot {
    fn enclosure(&self) -> RatInterval {
        let s = BigRational::from_integer(BigInt::from(self.sign));
        let at = |r: &BigRational| (&self.base + &s * r) / &self.two_c;
        RatInterval::new(at(&self.sqrt_lo), at(&self.sqrt_hi))
    }

    fn bisect(&mut self) {
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (&self.sqrt_lo + &self.sqrt_hi) / two;
        if &mid * &mid < self.disc {
            self.sqrt_lo = mid;
        } else {
            self.sqrt_hi = mid;
        }
    }
}

/// Attracting and repelling fixed points of a hyperbolic map.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    attracting: QuadraticRoot,
    repelling: QuadraticRoot,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointEnclosures {
    pub attracting: RatInterval,
    pub repelling: RatInterval,
}

impl FixedPoints {
    pub fn attracting(&self) -> RatInterval {
        self.attracting.enclosure()
    }

    pub fn repelling(&self) -> RatInterval {
        self.repelling.enclosure()
    }

    pub fn enclosures(&self) -> FixedPointEnclosures {
        FixedPointEnclosures {
            attracting: self.attracting(),
            repelling: self.repelling(),
        }
    }

    /// Halves both enclosure widths.
    pub fn refine(&mut self) {
        self.attracting.bisect();
        self.repelling.bisect();
    }

    pub fn refine_to(&mut self, width: &BigRational) {
        while self.attracting().width() > *width || self.repelling().width() > *width {
            self.refine();
        }
    }
}

/// Fixed points of a hyperbolic matrix; the attracting one is where the
/// derivative `1/(cx + d)²` is below one.
pub fn fixed_points(m: &IntMatrix2) -> Result<FixedPoints> {
    if m.classify() != MatrixClass::Hyperbolic {
        return Err(Error::Domain(format!(
            "fixed_points needs a hyperbolic map, got {} {m}",
            m.classify()
        )));
    }
    let [a, _, c, d] = m.entries();
    let tr = m.trace();
    let disc_int: BigInt = &tr * &tr - BigInt::from(4);
    let s = disc_int.sqrt();
    let rat = |x: BigInt| BigRational::from_integer(x);
    let sign: i8 = if tr.is_positive() { 1 } else { -1 };
    let root = |sign: i8| QuadraticRoot {
        base: rat(a - d),
        two_c: rat(c * 2),
        sign,
        disc: rat(disc_int.clone()),
        sqrt_lo: rat(s.clone()),
        sqrt_hi: rat(&s + BigInt::one()),
    };
    Ok(FixedPoints {
        attracting: root(sign),
        repelling: root(-sign),
    })
}

/// The unique fixed point of a parabolic map.
pub fn parabolic_fixed_point(m: &IntMatrix2) -> Result<ProjPoint> {
    if m.classify() != MatrixClass::Parabolic {
        return Err(Error::Domain(format!("{m} is not parabolic")));
    }
    let [a, _, c, d] = m.entries();
    if c.is_zero() {
        Ok(ProjPoint::Infinity)
    } else {
        Ok(ProjPoint::Finite(BigRational::new(a - d, c * 2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::proj::mobius;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d).unwrap()
    }

    fn quad(m: &IntMatrix2, x: &BigRational) -> BigRational {
        let [a, b, c, d] = m.entries();
        let r = |v: &BigInt| BigRational::from_integer(v.clone());
        r(c) * x * x + (r(d) - r(a)) * x - r(b)
    }

    #[test]
    fn golden_pair() {
        let g = m(2, 1, 1, 1);
        let mut fp = fixed_points(&g).unwrap();
        fp.refine_to(&BigRational::new(1.into(), 1000.into()));
        let att = fp.attracting();
        let rep = fp.repelling();
        // x² - x - 1 changes sign across each enclosure.
        for iv in [&att, &rep] {
            let (l, h) = (quad(&g, &iv.lo), quad(&g, &iv.hi));
            assert!(l.is_negative() != h.is_negative() || l.is_zero() || h.is_zero());
        }
        assert!(att.lo > BigRational::new(1617.into(), 1000.into()));
        assert!(att.hi < BigRational::new(1619.into(), 1000.into()));
        assert!(rep.lo > BigRational::new((-619).into(), 1000.into()));
        assert!(rep.hi < BigRational::new((-617).into(), 1000.into()));
    }

    #[test]
    fn parabolic_is_rejected() {
        assert!(matches!(fixed_points(&m(1, 1, 0, 1)), Err(Error::Domain(_))));
        assert_eq!(parabolic_fixed_point(&m(1, 1, 0, 1)).unwrap(), ProjPoint::Infinity);
        assert_eq!(parabolic_fixed_point(&m(1, 0, 1, 1)).unwrap(), ProjPoint::int(0));
    }

    #[test]
    fn iteration_lands_in_attracting_enclosure() {
        // Oracle: iterate the map on sample points; the orbit converges to the attractor.
        let g = m(3, 1, 2, 1);
        let mut fp = fixed_points(&g).unwrap();
        fp.refine_to(&BigRational::new(1.into(), 100.into()));
        let att = fp.attracting();
        for start in [0i64, 5, -3, 100] {
            let mut x = ProjPoint::int(start);
            for _ in 0..12 {
                x = mobius(&g, &x);
            }
            match x {
                ProjPoint::Finite(v) => assert!(att.contains(&v), "{start} -> {v} not in {att:?}"),
                ProjPoint::Infinity => panic!("orbit hit infinity"),
            }
        }
    }

    #[test]
    fn negative_trace_orientation() {
        let g = m(2, 1, 1, 1).inverse().mul(&m(-1, 0, 0, -1));
        let fp = fixed_points(&g).unwrap();
        // inverse swaps attracting and repelling
        let fwd = fixed_points(&m(2, 1, 1, 1)).unwrap();
        assert_eq!(fp.attracting(), fwd.repelling());
    }

    #[test]
    fn attracting_enclosure_maps_into_itself() {
        for g in [m(2, 1, 1, 1), m(3, 1, 2, 1), m(5, 2, 2, 1), m(1, -3, -2, 7)] {
            let mut fp = fixed_points(&g).unwrap();
            fp.refine();
            fp.refine_to(&BigRational::new(1.into(), 64.into()));
            let att = fp.attracting();
            let img = att.image(&g).expect("pole outside");
            assert!(att.contains_interval(&img), "{g}: {img:?} not in {att:?}");
        }
    }
}
