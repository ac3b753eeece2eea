//! Ping-pong certificates for two-generator free subgroups.
//!
//! A certificate consists of four closed arcs `A+`, `A-`, `B+`, `B-` on the
//! boundary circle with rational endpoints such that
//!
//! * the arcs have pairwise disjoint interiors (arcs may touch, but only at
//!   rational endpoints),
//! * `a(cl(X \ A-)) ⊆ A+` and `a⁻¹(cl(X \ A+)) ⊆ A-`, likewise for `b`.
//!
//! The group acts on the irrational points of the circle, where the four
//! arcs are genuinely disjoint, so the classical ping-pong argument applies
//! there and `⟨a, b⟩` is free of rank two. Every check is exact: Möbius maps
//! preserve the cyclic order, so an arc's image is the arc between the
//! images of its endpoints.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::fixed::{fixed_points, parabolic_fixed_point, FixedPoints};
use super::matrix::{IntMatrix2, MatrixClass};
use super::proj::{Arc, ProjPoint, RatInterval};
use super::word::{evaluate_word, GeneratorSet, GroupWord};
use crate::error::{Error, Result};

/// Maximum number of bisections spent separating fixed-point enclosures.
pub const MAX_REFINEMENT: u32 = 256;

/// Arc scales tried are `2^e` for `e` in this range, largest first.
const SCALE_EXPONENTS: std::ops::RangeInclusive<i32> = -48..=6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PingPongArcs {
    pub a_plus: Arc,
    pub a_minus: Arc,
    pub b_plus: Arc,
    pub b_minus: Arc,
}

impl PingPongArcs {
    fn all(&self) -> [&Arc; 4] {
        [&self.a_plus, &self.a_minus, &self.b_plus, &self.b_minus]
    }

    /// True when some pair of arcs shares an endpoint.
    pub fn touching(&self) -> bool {
        let arcs = self.all();
        (0..4).any(|i| (i + 1..4).any(|j| !arcs[i].touch_points(arcs[j]).is_empty()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PingPongCertificate {
    pub words: [GroupWord; 2],
    pub power: u32,
    pub arcs: Option<PingPongArcs>,
    pub valid: bool,
}

enum Center {
    Hyperbolic(FixedPoints),
    Parabolic(ProjPoint),
}

impl Center {
    fn of(m: &IntMatrix2) -> Result<Center> {
        match m.classify() {
            MatrixClass::Hyperbolic => Ok(Center::Hyperbolic(fixed_points(m)?)),
            MatrixClass::Parabolic => Ok(Center::Parabolic(parabolic_fixed_point(m)?)),
            other => Err(Error::Domain(format!(
                "ping-pong needs hyperbolic or parabolic maps, got {other} {m}"
            ))),
        }
    }

    fn refine(&mut self) {
        if let Center::Hyperbolic(fp) = self {
            fp.refine();
        }
    }

    /// Enclosures of the fixed points; `None` stands for the point at infinity.
    fn regions(&self) -> Vec<Option<RatInterval>> {
        match self {
            Center::Hyperbolic(fp) => vec![Some(fp.attracting()), Some(fp.repelling())],
            Center::Parabolic(ProjPoint::Infinity) => vec![None],
            Center::Parabolic(ProjPoint::Finite(p)) => {
                vec![Some(RatInterval::new(p.clone(), p.clone()))]
            }
        }
    }
}

fn same_fixed_set(a: &IntMatrix2, b: &IntMatrix2) -> bool {
    // Both fixed sets are the roots of c x² + (d - a) x - b; for elements of
    // an integral group the sets agree exactly when the quadratics are proportional.
    let q = |m: &IntMatrix2| {
        let [a, b, c, d] = m.entries();
        [c.clone(), d - a, -b]
    };
    let (p, r) = (q(a), q(b));
    (0..3).all(|i| (0..3).all(|j| &p[i] * &r[j] == &p[j] * &r[i]))
}

fn regions_disjoint(x: &Option<RatInterval>, y: &Option<RatInterval>) -> bool {
    match (x, y) {
        (None, None) => false,
        (None, Some(_)) | (Some(_), None) => true,
        (Some(u), Some(v)) => u.disjoint(v),
    }
}

fn separated(a: &Center, b: &Center) -> bool {
    let mut regions = a.regions();
    regions.extend(b.regions());
    (0..regions.len()).all(|i| (i + 1..regions.len()).all(|j| regions_disjoint(&regions[i], &regions[j])))
}

fn pow2(e: i32) -> BigRational {
    let two = BigInt::from(2);
    if e >= 0 {
        BigRational::from_integer(two.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), two.pow((-e) as u32))
    }
}

/// Candidate `(plus, minus)` arc pairs for one generator, largest scale first.
fn candidates(m: &IntMatrix2, center: &mut Center) -> Vec<(Arc, Arc)> {
    let mut out = Vec::new();
    for e in SCALE_EXPONENTS.rev() {
        let rho = pow2(e);
        let options: Vec<(Arc, Arc)> = match center {
            Center::Hyperbolic(fp) => {
                fp.refine_to(&(&rho / BigRational::from_integer(BigInt::from(4))));
                vec![(
                    fp.attracting().widen(&rho).to_arc(),
                    fp.repelling().widen(&rho).to_arc(),
                )]
            }
            Center::Parabolic(ProjPoint::Finite(p)) => {
                let p = p.clone();
                let right = Arc::new(ProjPoint::Finite(p.clone()), ProjPoint::Finite(&p + &rho));
                let left = Arc::new(ProjPoint::Finite(&p - &rho), ProjPoint::Finite(p));
                vec![(right.clone(), left.clone()), (left, right)]
            }
            Center::Parabolic(ProjPoint::Infinity) => {
                let inv = BigRational::one() / &rho;
                let right = Arc::new(ProjPoint::Finite(inv.clone()), ProjPoint::Infinity);
                let left = Arc::new(ProjPoint::Infinity, ProjPoint::Finite(-inv));
                vec![(right.clone(), left.clone()), (left, right)]
            }
        };
        for (plus, minus) in options {
            if generator_condition(m, &plus, &minus) {
                out.push((plus, minus));
            }
        }
    }
    out
}

/// `m(cl(X \ minus)) ⊆ plus` and `m⁻¹(cl(X \ plus)) ⊆ minus`, arcs proper.
fn generator_condition(m: &IntMatrix2, plus: &Arc, minus: &Arc) -> bool {
    plus.start != plus.end
        && minus.start != minus.end
        && plus.interiors_disjoint(minus)
        && minus.complement().image(m).is_subset_of(plus)
        && plus.complement().image(&m.inverse()).is_subset_of(minus)
}

/// Exact validation of a full four-arc configuration.
pub fn check_arcs(a: &IntMatrix2, b: &IntMatrix2, arcs: &PingPongArcs) -> bool {
    let all = arcs.all();
    let disjoint = (0..4).all(|i| (i + 1..4).all(|j| all[i].interiors_disjoint(all[j])));
    disjoint
        && generator_condition(a, &arcs.a_plus, &arcs.a_minus)
        && generator_condition(b, &arcs.b_plus, &arcs.b_minus)
}

/// Tries to certify that `⟨w1^k, w2^k⟩` is free of rank two.
///
/// Returns a certificate with `valid = false` when no arc configuration
/// works at this power, `Err(FixedPointsCoincide)` when the two maps share
/// fixed points and `Err(Inconclusive)` when the fixed-point enclosures do
/// not separate within [`MAX_REFINEMENT`] bisections.
pub fn ping_pong_certify(
    w1: &GroupWord,
    w2: &GroupWord,
    k: u32,
    gens: &GeneratorSet,
) -> Result<PingPongCertificate> {
    if k == 0 {
        return Err(Error::Domain("power must be positive".into()));
    }
    let a = evaluate_word(&w1.pow(k as i64), gens)?;
    let b = evaluate_word(&w2.pow(k as i64), gens)?;
    let mut ca = Center::of(&a)?;
    let mut cb = Center::of(&b)?;
    if same_fixed_set(&a, &b) {
        return Err(Error::FixedPointsCoincide);
    }
    let mut depth = 0;
    while !separated(&ca, &cb) {
        if depth >= MAX_REFINEMENT {
            return Err(Error::Inconclusive(depth));
        }
        ca.refine();
        cb.refine();
        depth += 1;
    }

    let cand_a = candidates(&a, &mut ca);
    let cand_b = candidates(&b, &mut cb);
    let mut arcs = None;
    'search: for (ap, am) in &cand_a {
        for (bp, bm) in &cand_b {
            let trial = PingPongArcs {
                a_plus: ap.clone(),
                a_minus: am.clone(),
                b_plus: bp.clone(),
                b_minus: bm.clone(),
            };
            if check_arcs(&a, &b, &trial) {
                arcs = Some(trial);
                break 'search;
            }
        }
    }
    let valid = arcs.is_some();
    Ok(PingPongCertificate {
        words: [w1.clone(), w2.clone()],
        power: k,
        arcs,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> GeneratorSet {
        GeneratorSet::standard()
    }

    fn w(s: &str) -> GroupWord {
        gens().parse_word(s).unwrap()
    }

    #[test]
    fn sanov_pair_is_certified() {
        let cert = ping_pong_certify(&w("R"), &w("L"), 2, &gens()).unwrap();
        assert!(cert.valid);
        let arcs = cert.arcs.unwrap();
        let a = evaluate_word(&w("R^2"), &gens()).unwrap();
        let b = evaluate_word(&w("L^2"), &gens()).unwrap();
        assert!(check_arcs(&a, &b, &arcs));
    }

    #[test]
    fn power_one_of_r_l_fails() {
        // <R, L> is the whole modular group, which has torsion.
        let cert = ping_pong_certify(&w("R"), &w("L"), 1, &gens()).unwrap();
        assert!(!cert.valid);
    }

    #[test]
    fn identical_maps_are_rejected() {
        assert_eq!(
            ping_pong_certify(&w("R"), &w("R"), 2, &gens()).unwrap_err(),
            Error::FixedPointsCoincide
        );
        assert_eq!(
            ping_pong_certify(&w("R L"), &w("R L R L"), 2, &gens()).unwrap_err(),
            Error::FixedPointsCoincide
        );
    }

    #[test]
    fn elliptic_is_domain_error() {
        assert!(matches!(
            ping_pong_certify(&w("R L^-1"), &w("L"), 1, &gens()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hyperbolic_pair_certifies_after_doubling() {
        let mut k = 1;
        let cert = loop {
            let c = ping_pong_certify(&w("R L"), &w("L R"), k, &gens()).unwrap();
            if c.valid || k > 64 {
                break c;
            }
            k *= 2;
        };
        assert!(cert.valid, "no certificate up to k = 64");
        assert!(!cert.arcs.unwrap().touching());
    }

    #[test]
    fn tampered_arcs_fail_validation() {
        let cert = ping_pong_certify(&w("R"), &w("L"), 2, &gens()).unwrap();
        let mut arcs = cert.arcs.unwrap();
        std::mem::swap(&mut arcs.a_plus, &mut arcs.a_minus);
        let a = evaluate_word(&w("R^2"), &gens()).unwrap();
        let b = evaluate_word(&w("L^2"), &gens()).unwrap();
        assert!(!check_arcs(&a, &b, &arcs));
    }
}
