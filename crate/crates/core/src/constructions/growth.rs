use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{homogenize, Evaluator, Homogenized};
use crate::error::{Error, Result};
use crate::graph::Element;
use crate::moebius::proj::ser_rat;

/// `G[i][j]`: the homogenized estimate of `h_{ω_i}` at `f_j`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthMatrix {
    pub power: u64,
    pub defects: Vec<i64>,
    pub entries: Vec<Vec<Homogenized>>,
    /// Every entry used the requested power and stabilized.
    pub complete: bool,
}

impl GrowthMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Entries as `(value, error)` pairs.
    pub fn intervals(&self) -> Vec<Vec<(BigRational, BigRational)>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| (e.value.clone(), e.error.clone())).collect())
            .collect()
    }

    /// Diagonal entries exceed their error bars.
    pub fn diagonal_positive(&self) -> bool {
        (0..self.size()).all(|i| self.entries[i][i].lower() > BigRational::zero())
    }
}

/// Evaluates every entry at power `m`, row `i` using defect `defects[i]`.
pub fn growth_matrix(evaluators: &[Evaluator], family: &[Element], m: u64, defects: &[i64]) -> Result<GrowthMatrix> {
    if evaluators.len() != defects.len() {
        return Err(Error::Config("one defect per counting function is required".into()));
    }
    let cells: Vec<(usize, usize)> =
        (0..evaluators.len()).flat_map(|i| (0..family.len()).map(move |j| (i, j))).collect();
    let values: Vec<Homogenized> = cells
        .par_iter()
        .map(|&(i, j)| homogenize(&evaluators[i], &family[j], m, defects[i]))
        .collect::<Result<_>>()?;
    let n = family.len();
    let entries: Vec<Vec<Homogenized>> = values.chunks(n.max(1)).take(evaluators.len()).map(<[_]>::to_vec).collect();
    let complete = values.iter().all(|h| h.stabilized && !h.partial);
    Ok(GrowthMatrix { power: m, defects: defects.to_vec(), entries, complete })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    IntervalDeterminant,
    DiagonalDominance,
}

/// Outcome of an independence check on a matrix with error bars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceCertificate {
    pub certified: bool,
    pub method: Option<CertificateMethod>,
    /// Distance of the determinant enclosure from zero, or the smallest
    /// row slack of diagonal dominance.
    #[serde(serialize_with = "ser_opt_rat")]
    pub margin: Option<BigRational>,
}

fn ser_opt_rat<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => ser_rat(r, s),
        None => s.serialize_none(),
    }
}

/// Largest size for which the determinant is expanded over all permutations.
pub const MAX_INTERVAL_DET: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    fn around(v: &BigRational, e: &BigRational) -> Self {
        Interval { lo: v - e.abs(), hi: v + e.abs() }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    fn mul(&self, o: &Interval) -> Interval {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = p.iter().min().expect("four products").clone();
        let hi = p.iter().max().expect("four products").clone();
        Interval { lo, hi }
    }
}

/// Permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(Vec::new(), true)];
    }
    let mut out = Vec::new();
    for (p, even) in permutations(n - 1) {
        // insert n-1 at position k: moves it past n-1-k entries
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push((q, even == (n - 1 - k).is_multiple_of(2)));
        }
    }
    out
}

fn interval_determinant(m: &[Vec<(BigRational, BigRational)>]) -> Interval {
    let n = m.len();
    let mut acc = Interval::point(BigRational::zero());
    for (perm, even) in permutations(n) {
        let mut term = Interval::point(BigRational::from_integer(1.into()));
        for (i, &j) in perm.iter().enumerate() {
            term = term.mul(&Interval::around(&m[i][j].0, &m[i][j].1));
        }
        acc = acc.add(&if even { term } else { term.neg() });
    }
    acc
}

fn dominance_margin(m: &[Vec<(BigRational, BigRational)>]) -> BigRational {
    (0..m.len())
        .map(|i| {
            let (v, e) = &m[i][i];
            let off: BigRational = (0..m.len())
                .filter(|&j| j != i)
                .map(|j| m[i][j].0.abs() + m[i][j].1.abs())
                .fold(BigRational::zero(), |a, b| a + b);
            v.abs() - e.abs() - off
        })
        .min()
        .expect("nonempty matrix")
}

/// Certifies that every matrix within the error bars is invertible.
///
/// Tries the interval determinant for sizes up to [`MAX_INTERVAL_DET`],
/// then strict diagonal dominance. An empty matrix is never certified.
pub fn independence_certificate(m: &[Vec<(BigRational, BigRational)>]) -> Result<IndependenceCertificate> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Config("growth matrix must be square".into()));
    }
    let none = IndependenceCertificate { certified: false, method: None, margin: None };
    if n == 0 {
        return Ok(none);
    }
    if n <= MAX_INTERVAL_DET {
        let det = interval_determinant(m);
        let zero = BigRational::zero();
        let margin = if det.lo > zero {
            Some(det.lo)
        } else if det.hi < zero {
            Some(-det.hi)
        } else {
            None
        };
        if let Some(margin) = margin {
            return Ok(IndependenceCertificate {
                certified: true,
                method: Some(CertificateMethod::IntervalDeterminant),
                margin: Some(margin),
            });
        }
    }
    let slack = dominance_margin(m);
    if slack > BigRational::zero() {
        return Ok(IndependenceCertificate {
            certified: true,
            method: Some(CertificateMethod::DiagonalDominance),
            margin: Some(slack),
        });
    }
    Ok(none)
}
