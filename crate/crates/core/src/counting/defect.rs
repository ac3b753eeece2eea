use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::functional::{Evaluator, QMValue};
use crate::error::{Error, Result};
use crate::graph::Element;
use crate::moebius::proj::ser_rat;
use crate::moebius::GroupWord;

/// A sampled group element with a readable spelling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledWord {
    pub label: String,
    #[serde(skip)]
    pub word: GroupWord,
}

impl SampledWord {
    pub fn new(label: impl Into<String>, word: GroupWord) -> Self {
        SampledWord { label: label.into(), word }
    }
}

/// Seeded sampler of word pairs `(a, b)`.
///
/// Random words are products of at most `max_len` letters drawn from
/// `letters` and their inverses. `required` pairs are placed first.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub letters: Vec<(String, GroupWord)>,
    pub max_len: u32,
    pub count: usize,
    pub seed: u64,
    pub required: Vec<(SampledWord, SampledWord)>,
}

impl Sampler {
    /// `(g^m, g^m)` for `m = 1, 2, 4, ...` up to `max_power`.
    pub fn power_pairs(label: &str, g: &GroupWord, max_power: u64) -> Vec<(SampledWord, SampledWord)> {
        let mut out = Vec::new();
        let mut m = 1;
        while m <= max_power {
            let w = SampledWord::new(format!("{label}^{m}"), g.pow(m as i64));
            out.push((w.clone(), w));
            m *= 2;
        }
        out
    }

    fn random_word(&self, rng: &mut ChaCha8Rng) -> SampledWord {
        let len = rng.gen_range(1..=self.max_len.max(1));
        let mut syllables: Vec<(usize, i64)> = Vec::new();
        for _ in 0..len {
            let i = rng.gen_range(0..self.letters.len());
            let e = if rng.gen_bool(0.5) { 1 } else { -1 };
            match syllables.last_mut() {
                Some((j, x)) if *j == i => *x += e,
                _ => syllables.push((i, e)),
            }
            if syllables.last().is_some_and(|s| s.1 == 0) {
                syllables.pop();
            }
        }
        let mut word = GroupWord::identity();
        let mut parts = Vec::new();
        for &(i, e) in &syllables {
            let (name, w) = &self.letters[i];
            word = word.concat(&w.pow(e));
            parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
        }
        let label = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
        SampledWord::new(label, word)
    }

    /// Required pairs followed by `count` random pairs.
    pub fn pairs(&self) -> Result<Vec<(SampledWord, SampledWord)>> {
        let mut out = self.required.clone();
        if self.count > 0 && self.letters.is_empty() {
            return Err(Error::Config("sampler has no letters".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.count {
            let a = self.random_word(&mut rng);
            let b = self.random_word(&mut rng);
            out.push((a, b));
        }
        Ok(out)
    }

    pub fn describe(&self) -> String {
        let names: Vec<&str> = self.letters.iter().map(|(n, _)| n.as_str()).collect();
        format!(
            "{} required + {} random pairs, words of <= {} letters over {{{}}}, seed {}",
            self.required.len(),
            self.count,
            self.max_len,
            names.join(", "),
            self.seed
        )
    }
}

/// Largest observed `|h(ab) - h(a) - h(b)|` over a sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    pub sample: String,
    pub pairs: usize,
    /// Pairs skipped because some value did not stabilize.
    pub excluded: usize,
    pub d_report: i64,
    pub argmax: Option<[String; 2]>,
    /// `(sample index, new maximum)` each time the running maximum grew.
    pub increases: Vec<(usize, i64)>,
    /// No new maximum in the second half of the sample.
    pub stabilized: bool,
}

/// Values of `h` on every element needed by the sample, computed in
/// parallel and returned in sample order.
pub(crate) fn evaluate_all(ev: &Evaluator, words: &[&GroupWord]) -> Result<Vec<Option<QMValue>>> {
    let mut index: HashMap<Element, usize> = HashMap::new();
    let mut unique: Vec<Element> = Vec::new();
    let mut slots = Vec::with_capacity(words.len());
    for w in words {
        let e = ev.group().evaluate(w)?;
        let k = *index.entry(e.clone()).or_insert_with(|| {
            unique.push(e);
            unique.len() - 1
        });
        slots.push(k);
    }
    let values: Vec<Option<QMValue>> = unique
        .par_iter()
        .map(|e| match ev.h(e) {
            Ok(v) if v.stabilized => Ok(Some(v)),
            Ok(_) | Err(Error::Unreachable { .. }) | Err(Error::NotInGraph(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(slots.into_iter().map(|k| values[k].clone()).collect())
}

pub fn defect_estimate(ev: &Evaluator, sampler: &Sampler) -> Result<DefectReport> {
    let pairs = sampler.pairs()?;
    let products: Vec<GroupWord> = pairs.iter().map(|(a, b)| a.word.concat(&b.word)).collect();
    let mut words: Vec<&GroupWord> = Vec::with_capacity(3 * pairs.len());
    for ((a, b), ab) in pairs.iter().zip(&products) {
        words.extend([&a.word, &b.word, ab]);
    }
    let values = evaluate_all(ev, &words)?;
    let mut report = DefectReport {
        sample: sampler.describe(),
        pairs: pairs.len(),
        excluded: 0,
        d_report: 0,
        argmax: None,
        increases: Vec::new(),
        stabilized: true,
    };
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (Some(ha), Some(hb), Some(hab)) = (&values[3 * i], &values[3 * i + 1], &values[3 * i + 2]) else {
            report.excluded += 1;
            continue;
        };
        let defect = (hab.value - ha.value - hb.value).abs();
        if defect > report.d_report || report.argmax.is_none() {
            if defect > report.d_report {
                report.increases.push((i, defect));
            }
            report.d_report = defect;
            report.argmax = Some([a.label.clone(), b.label.clone()]);
        }
    }
    let half = pairs.len() / 2;
    report.stabilized = report.increases.iter().all(|&(i, _)| i < half);
    Ok(report)
}

/// `h(g^M)/M` with its error bar `D/M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homogenized {
    pub requested_power: u64,
    pub power: u64,
    pub h: i64,
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub error: BigRational,
    pub stabilized: bool,
    /// The requested power was out of reach and a smaller one was used.
    pub partial: bool,
}

impl Homogenized {
    pub fn lower(&self) -> BigRational {
        &self.value - &self.error
    }

    pub fn upper(&self) -> BigRational {
        &self.value + &self.error
    }
}

/// Estimates the homogenization of `h` at `g` from `h(g^M)`, halving `M`
/// while `g^M·d₀` is out of reach.
pub fn homogenize(ev: &Evaluator, g: &Element, m: u64, d: i64) -> Result<Homogenized> {
    if m == 0 {
        return Err(Error::Config("power must be positive".into()));
    }
    let mut power = m;
    loop {
        match ev.h(&g.pow(power as i64)) {
            Ok(v) => {
                let denom = BigInt::from(power);
                return Ok(Homogenized {
                    requested_power: m,
                    power,
                    h: v.value,
                    value: BigRational::new(BigInt::from(v.value), denom.clone()),
                    error: BigRational::new(BigInt::from(d), denom),
                    stabilized: v.stabilized,
                    partial: power != m,
                });
            }
            Err(Error::Unreachable { .. }) | Err(Error::NotInGraph(_)) if power > 1 => power /= 2,
            Err(e) => return Err(e),
        }
    }
}

/// `|h(g^{2m})/(2m) - h(g^m)/m| ≤ D/(2m)`, i.e. `|h(g^{2m}) - 2h(g^m)| ≤ D`.
pub fn doubling_consistent(h_m: i64, h_2m: i64, d: i64) -> bool {
    (h_2m - 2 * h_m).abs() <= d
}
