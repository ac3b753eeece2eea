use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::axis::model_distance;
use crate::counting::{enumerate_translates, evaluate_all, Evaluator, OmegaSegment};
use crate::error::{Error, Result};
use crate::graph::{subgroup_words, OrbitSet, TruncatedGraph, Vertex};
use crate::moebius::proj::ser_rat;
use crate::moebius::GroupWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditKind {
    Cyclic,
    Stabilizer,
    Handlebody,
    DoubleCoset,
    Avoidance,
}

impl fmt::Display for AuditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditKind::Cyclic => "cyclic",
            AuditKind::Stabilizer => "stabilizer",
            AuditKind::Handlebody => "handlebody",
            AuditKind::DoubleCoset => "double-coset",
            AuditKind::Avoidance => "avoidance",
        })
    }
}

/// Least-squares slope of `h(g^n)` against `n`, with the bound on how far
/// a defect-`D` perturbation can move it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeFit {
    #[serde(serialize_with = "ser_rat")]
    pub slope: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub error: BigRational,
}

impl SlopeFit {
    /// `|slope| ≤ error`.
    pub fn flat(&self) -> bool {
        self.slope.abs() <= self.error
    }

    /// `slope ≥ error`, with a positive error bar or a positive slope.
    pub fn growing(&self) -> bool {
        self.slope >= self.error && self.slope > BigRational::zero()
    }
}

/// Result of one finite audit. `sup` is attained at `witness`.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub kind: AuditKind,
    pub parameters: BTreeMap<String, String>,
    pub samples: usize,
    /// Samples skipped because an evaluation did not stabilize.
    pub excluded: usize,
    pub sup: i64,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    /// Largest parameter reached before the truncation ran out.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reach: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<SlopeFit>,
    /// Per-sample values, where the audit has a natural index.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<i64>,
}

impl AuditReport {
    fn new(kind: AuditKind, parameters: BTreeMap<String, String>) -> Self {
        AuditReport {
            kind,
            parameters,
            samples: 0,
            excluded: 0,
            sup: 0,
            witness: None,
            bound: None,
            passed: None,
            reach: None,
            fit: None,
            values: Vec::new(),
        }
    }

    fn offer(&mut self, value: i64, witness: impl FnOnce() -> String) {
        if self.witness.is_none() || value > self.sup {
            self.sup = value;
            self.witness = Some(witness());
        }
    }
}

fn params<const N: usize>(kv: [(&str, String); N]) -> BTreeMap<String, String> {
    kv.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Slope of the least-squares line through `(n, y_n)`, `n = 1, 2, ...`,
/// and `D·Σ|n - n̄| / Σ(n - n̄)²`.
pub fn slope_fit(ys: &[i64], d: i64) -> Option<SlopeFit> {
    let len = ys.len() as i64;
    if len < 2 {
        return None;
    }
    // work with 2n - (len + 1) = 2(n - n̄) to stay in integers
    let centered: Vec<i64> = (1..=len).map(|n| 2 * n - (len + 1)).collect();
    let sxx: i64 = centered.iter().map(|c| c * c).sum();
    let sxy: BigInt = centered.iter().zip(ys).map(|(c, y)| BigInt::from(*c) * BigInt::from(*y)).sum();
    let sabs: i64 = centered.iter().map(|c| c.abs()).sum();
    Some(SlopeFit {
        slope: BigRational::new(2 * sxy, BigInt::from(sxx)),
        error: BigRational::new(BigInt::from(2 * d * sabs), BigInt::from(sxx)),
    })
}

/// `sup_{1 ≤ n ≤ nmax} |h(g^n)|` with the slope of `n ↦ h(g^n)`.
pub fn cyclic_bound_audit(ev: &Evaluator, label: &str, g: &GroupWord, nmax: u64, d: i64) -> Result<AuditReport> {
    let mut report = AuditReport::new(
        AuditKind::Cyclic,
        params([("element", label.to_string()), ("nmax", nmax.to_string()), ("defect", d.to_string())]),
    );
    let powers: Vec<GroupWord> = (1..=nmax).map(|n| g.pow(n as i64)).collect();
    let refs: Vec<&GroupWord> = powers.iter().collect();
    let values = evaluate_all(ev, &refs)?;
    for (i, v) in values.iter().enumerate() {
        let Some(v) = v else { break };
        let n = i as u64 + 1;
        report.values.push(v.value);
        report.reach = Some(n);
        report.offer(v.value.abs(), || format!("{label}^{n}"));
    }
    report.samples = report.values.len();
    report.excluded = values.len() - report.values.len();
    report.fit = slope_fit(&report.values, d);
    Ok(report)
}

/// `sup |h(g)|` over every subgroup word of length at most `maxlen` in
/// the named generators.
pub fn subgroup_bound_audit(
    ev: &Evaluator,
    kind: AuditKind,
    generators: &[(String, GroupWord)],
    maxlen: u32,
) -> Result<AuditReport> {
    let names: Vec<&str> = generators.iter().map(|(n, _)| n.as_str()).collect();
    let mut report =
        AuditReport::new(kind, params([("generators", names.join(", ")), ("maxlen", maxlen.to_string())]));
    let gens: Vec<GroupWord> = generators.iter().map(|(_, w)| w.clone()).collect();
    let words = subgroup_words(&gens, maxlen);
    let refs: Vec<&GroupWord> = words.iter().collect();
    let values = evaluate_all(ev, &refs)?;
    report.samples = words.len();
    for (w, v) in words.iter().zip(&values) {
        match v {
            Some(v) => report.offer(v.value.abs(), || ev.group().display_word(w)),
            None => report.excluded += 1,
        }
    }
    Ok(report)
}

/// Number of vertices of each translate of `ω` in `g` lying within
/// distance `b` of the disk set, as the longest consecutive run.
///
/// Distances to the disk set are exact distances in the full model graph.
/// Passes when no translate has all of its vertices that close.
pub fn avoidance_audit(omega: &OmegaSegment, disk: &OrbitSet, b: u32, g: &TruncatedGraph) -> Result<AuditReport> {
    let mut report = AuditReport::new(
        AuditKind::Avoidance,
        params([
            ("omega_length", omega.len().to_string()),
            ("b", b.to_string()),
            ("disk_points", disk.members.len().to_string()),
            ("graph", format!("{} {}", g.kind(), g.bound())),
        ]),
    );
    let set = enumerate_translates(omega, g)?;
    let mut ids: Vec<u32> = set.copies.iter().flat_map(|c| c.ids.iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    let model = omega.model();
    let near: HashMap<u32, bool> = ids
        .par_iter()
        .map(|&id| {
            let v = g.vertex(id);
            let close = within(model, v, &disk.members, b)?;
            Ok((id, close))
        })
        .collect::<Result<_>>()?;
    for c in &set.copies {
        let mut run = 0i64;
        let mut best = (0i64, 0usize);
        for (k, id) in c.ids.iter().enumerate() {
            run = if near[id] { run + 1 } else { 0 };
            if run > best.0 {
                best = (run, k + 1 - run as usize);
            }
        }
        report.offer(best.0, || format!("translate starting at {} (run from vertex {})", g.vertex(c.start()), best.1));
    }
    report.samples = set.copies.len();
    report.excluded = set.dropped;
    report.bound = Some(omega.len() as i64);
    report.passed = Some(report.sup <= omega.len() as i64);
    Ok(report)
}

fn within(model: crate::graph::Model, v: &Vertex, members: &[Vertex], b: u32) -> Result<bool> {
    for m in members {
        if model_distance(model, v, m)? <= b {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Parameters of a double-coset sample.
#[derive(Clone, Debug)]
pub struct CosetSampling {
    pub count: usize,
    pub cap: u32,
    pub seed: u64,
}

fn random_subgroup_word(rng: &mut ChaCha8Rng, gens: &[(String, GroupWord)], cap: u32) -> (String, GroupWord) {
    let len = rng.gen_range(0..=cap);
    let mut w = GroupWord::identity();
    let mut label: Vec<String> = Vec::new();
    let mut last: Option<(usize, i64)> = None;
    let mut placed = 0;
    while placed < len {
        let i = rng.gen_range(0..gens.len());
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        if last == Some((i, -e)) {
            continue;
        }
        w = w.concat(&gens[i].1.pow(e));
        label.push(if e == 1 { gens[i].0.clone() } else { format!("{}^-1", gens[i].0) });
        last = Some((i, e));
        placed += 1;
    }
    let label = if label.is_empty() { "1".to_string() } else { label.join(" ") };
    (label, w)
}

/// `sup |h(a f b) - h(f)|` over sampled `f` from `family` and `a, b` in the
/// subgroup `T`, checked against `2·D + 2·B_T`.
pub fn double_coset_audit(
    ev: &Evaluator,
    family: &[(String, GroupWord)],
    t_gens: &[(String, GroupWord)],
    sampling: &CosetSampling,
    d_report: i64,
    b_t: i64,
) -> Result<AuditReport> {
    if family.is_empty() || t_gens.is_empty() {
        return Err(Error::Config("double-coset audit needs elements and subgroup generators".into()));
    }
    let names: Vec<&str> = t_gens.iter().map(|(n, _)| n.as_str()).collect();
    let mut report = AuditReport::new(
        AuditKind::DoubleCoset,
        params([
            ("subgroup", names.join(", ")),
            ("cap", sampling.cap.to_string()),
            ("count", sampling.count.to_string()),
            ("seed", sampling.seed.to_string()),
        ]),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let triples: Vec<(usize, (String, GroupWord), (String, GroupWord))> = (0..sampling.count)
        .map(|_| {
            let f = rng.gen_range(0..family.len());
            let a = random_subgroup_word(&mut rng, t_gens, sampling.cap);
            let b = random_subgroup_word(&mut rng, t_gens, sampling.cap);
            (f, a, b)
        })
        .collect();
    let products: Vec<GroupWord> =
        triples.iter().map(|(f, a, b)| a.1.concat(&family[*f].1).concat(&b.1)).collect();
    let mut refs: Vec<&GroupWord> = family.iter().map(|(_, w)| w).collect();
    refs.extend(products.iter());
    let values = evaluate_all(ev, &refs)?;
    let (base, moved) = values.split_at(family.len());
    report.samples = triples.len();
    for ((f, a, b), v) in triples.iter().zip(moved) {
        let (Some(hf), Some(v)) = (&base[*f], v) else {
            report.excluded += 1;
            continue;
        };
        let dev = (v.value - hf.value).abs();
        report.offer(dev, || format!("({}) {} ({})", a.0, family[*f].0, b.0));
    }
    let bound = 2 * d_report + 2 * b_t;
    report.bound = Some(bound);
    report.passed = Some(report.sup <= bound);
    Ok(report)
}
