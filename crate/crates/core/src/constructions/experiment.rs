use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::audits::{
    avoidance_audit, cyclic_bound_audit, double_coset_audit, subgroup_bound_audit, AuditKind, AuditReport,
    CosetSampling,
};
use super::axis::{axis_basepoint, axis_segment, AxisSegment};
use super::family::{build_family, FamilySchedule};
use super::growth::{growth_matrix, independence_certificate, GrowthMatrix, IndependenceCertificate};
use super::schottky::SchottkyPair;
use crate::counting::{
    defect_estimate, doubling_consistent, parse_key_values, DefectReport, Evaluator, PenaltySpec, Sampler,
};
use crate::error::{Error, Result};
use crate::graph::{
    farey_corridor, subgroup_ball, ActingGroup, Element, Model, OrbitSet, Schedule, Universe, Vertex,
};
use crate::moebius::{GeneratorSet, GroupWord};

/// The flagship configuration on the Farey graph.
pub const FLAGSHIP: &str = "\
# Farey graph, pair-local corridors
model = farey-corridor
schedule = 0,1
basepoint = 0/1
pair = R L; L R
max_pair_power = 64
family = 4,5,6,7; 8,9,10,11; 12,13,14,15
halfwidth = 1
w = 1
powers = 8,16,32,64
seed = 1
defect_samples = 300
defect_max_len = 8
cyclic_nmax = 20
handlebody = R
stabilizer = L
subgroup_maxlen = 6
avoidance_b = 0,1,2
avoidance_thickness = 1
coset_samples = 100
coset_cap = 6
";

/// A full experiment description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub universe: Universe,
    pub schedule: Schedule,
    pub basepoint: Vertex,
    pub pair: [String; 2],
    pub max_pair_power: u32,
    pub family: FamilySchedule,
    pub halfwidth: u32,
    pub w: u32,
    pub powers: Vec<u64>,
    pub seed: u64,
    pub defect_samples: usize,
    pub defect_max_len: u32,
    pub cyclic_nmax: u64,
    pub handlebody: Vec<String>,
    pub stabilizer: Vec<String>,
    pub subgroup_maxlen: u32,
    pub avoidance_b: Vec<u32>,
    pub avoidance_thickness: u64,
    pub coset_samples: usize,
    pub coset_cap: u32,
}

const KEYS: [&str; 20] = [
    "model",
    "schedule",
    "basepoint",
    "pair",
    "max_pair_power",
    "family",
    "halfwidth",
    "w",
    "powers",
    "seed",
    "defect_samples",
    "defect_max_len",
    "cyclic_nmax",
    "handlebody",
    "stabilizer",
    "subgroup_maxlen",
    "avoidance_b",
    "avoidance_thickness",
    "coset_samples",
    "coset_cap",
];

fn num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("`{key}`: bad number `{s}`")))
}

fn num_list<T: std::str::FromStr>(key: &str, s: &str) -> Result<Vec<T>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| num(key, t)).collect()
}

fn word_list(s: &str) -> Vec<String> {
    s.split(';').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

impl ExperimentConfig {
    pub fn flagship() -> Self {
        ExperimentConfig::parse(FLAGSHIP).expect("flagship configuration parses")
    }

    /// Parses `key = value` lines. Unset keys take their flagship values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = parse_key_values(FLAGSHIP)?;
        for (k, v) in parse_key_values(text)? {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
            kv.insert(k, v);
        }
        let get = |k: &str| kv[k].as_str();
        let universe: Universe = get("model").parse()?;
        let pair = word_list(get("pair"));
        let pair: [String; 2] =
            pair.try_into().map_err(|_| Error::Config("`pair` needs exactly two words".into()))?;
        let powers: Vec<u64> = num_list("powers", get("powers"))?;
        if powers.is_empty() || powers.windows(2).any(|w| w[0] >= w[1]) || powers[0] == 0 {
            return Err(Error::Config("`powers` must be positive and strictly increasing".into()));
        }
        Ok(ExperimentConfig {
            basepoint: universe.model.parse_vertex(get("basepoint"))?,
            universe,
            schedule: get("schedule").parse()?,
            pair,
            max_pair_power: num("max_pair_power", get("max_pair_power"))?,
            family: get("family").parse()?,
            halfwidth: num("halfwidth", get("halfwidth"))?,
            w: num("w", get("w"))?,
            powers,
            seed: num("seed", get("seed"))?,
            defect_samples: num("defect_samples", get("defect_samples"))?,
            defect_max_len: num("defect_max_len", get("defect_max_len"))?,
            cyclic_nmax: num("cyclic_nmax", get("cyclic_nmax"))?,
            handlebody: word_list(get("handlebody")),
            stabilizer: word_list(get("stabilizer")),
            subgroup_maxlen: num("subgroup_maxlen", get("subgroup_maxlen"))?,
            avoidance_b: num_list("avoidance_b", get("avoidance_b"))?,
            avoidance_thickness: num("avoidance_thickness", get("avoidance_thickness"))?,
            coset_samples: num("coset_samples", get("coset_samples"))?,
            coset_cap: num("coset_cap", get("coset_cap"))?,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("model", self.universe.to_string());
        line("schedule", self.schedule.to_string());
        line("basepoint", self.basepoint.to_string());
        line("pair", self.pair.join("; "));
        line("max_pair_power", self.max_pair_power.to_string());
        line("family", self.family.to_string());
        line("halfwidth", self.halfwidth.to_string());
        line("w", self.w.to_string());
        line("powers", join(&self.powers, ","));
        line("seed", self.seed.to_string());
        line("defect_samples", self.defect_samples.to_string());
        line("defect_max_len", self.defect_max_len.to_string());
        line("cyclic_nmax", self.cyclic_nmax.to_string());
        line("handlebody", self.handlebody.join("; "));
        line("stabilizer", self.stabilizer.join("; "));
        line("subgroup_maxlen", self.subgroup_maxlen.to_string());
        line("avoidance_b", join(&self.avoidance_b, ","));
        line("avoidance_thickness", self.avoidance_thickness.to_string());
        line("coset_samples", self.coset_samples.to_string());
        line("coset_cap", self.coset_cap.to_string());
        s
    }
}

/// One `f_i` with the axis segment `ω_i` built from it.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyMember {
    pub label: String,
    pub word: String,
    #[serde(skip)]
    pub element: Element,
    #[serde(skip)]
    pub group_word: GroupWord,
    pub axis_point: Vertex,
    pub displacement: u32,
    pub segment: AxisSegment,
}

/// `|h(g^{2m}) - 2h(g^m)| ≤ D` for one element and power.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingCheck {
    pub omega: usize,
    pub element: String,
    pub m: u64,
    pub h_m: i64,
    pub h_2m: i64,
    pub defect: i64,
    pub consistent: bool,
}

/// The growth matrix at the first certified power, or the last one tried.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthOutcome {
    pub matrix: GrowthMatrix,
    pub certificate: IndependenceCertificate,
    pub tried: Vec<u64>,
}

/// A built experiment: certified pair, family, axis segments and one
/// evaluator per segment.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub gens: GeneratorSet,
    pub group: ActingGroup,
    pub pair: SchottkyPair,
    pub family: Vec<FamilyMember>,
    pub evaluators: Vec<Evaluator>,
}

impl Experiment {
    pub fn build(config: ExperimentConfig, gens: GeneratorSet) -> Result<Self> {
        if config.universe.model != Model::Farey {
            return Err(Error::Config("experiments run on the Farey model".into()));
        }
        let model = Model::Farey;
        let parse = |s: &str| gens.parse_word(s);
        let pair = SchottkyPair::certify(&parse(&config.pair[0])?, &parse(&config.pair[1])?, &gens, config.max_pair_power)?;
        let words = build_family(&pair, &config.family, &gens)?;
        let group = ActingGroup::Mobius(gens.clone());
        let family = words
            .into_par_iter()
            .enumerate()
            .map(|(i, w)| {
                let element = group.evaluate(&w)?;
                let (v, t) = axis_basepoint(model, &element, &config.basepoint)?;
                let segment = axis_segment(model, &element, config.halfwidth, &v, None)?;
                Ok(FamilyMember {
                    label: format!("f{}", i + 1),
                    word: group.display_word(&w),
                    element,
                    group_word: w,
                    axis_point: v,
                    displacement: t,
                    segment,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let evaluators = family
            .iter()
            .map(|m| {
                let spec = PenaltySpec::new(
                    config.universe,
                    config.schedule.clone(),
                    m.segment.omega.clone(),
                    config.w,
                    config.basepoint.clone(),
                )?;
                Evaluator::new(spec, group.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Experiment { config, gens, group, pair, family, evaluators })
    }

    fn max_power(&self) -> u64 {
        *self.config.powers.last().expect("nonempty powers")
    }

    fn words(&self, names: &[String]) -> Result<Vec<(String, GroupWord)>> {
        names.iter().map(|n| Ok((n.clone(), self.gens.parse_word(n)?))).collect()
    }

    pub fn family_words(&self) -> Vec<(String, GroupWord)> {
        self.family.iter().map(|m| (m.label.clone(), m.group_word.clone())).collect()
    }

    /// Random pairs over the generators, preceded by `(f_j^m, f_j^m)` for
    /// every `m` whose double is at most the largest homogenization power.
    pub fn sampler(&self) -> Sampler {
        let letters = self
            .gens
            .alphabet()
            .ids()
            .map(|id| (self.gens.alphabet().name(id).to_string(), GroupWord::generator(id, 1)))
            .collect();
        let required = self
            .family
            .iter()
            .flat_map(|m| Sampler::power_pairs(&m.label, &m.group_word, self.max_power() / 2))
            .collect();
        Sampler {
            letters,
            max_len: self.config.defect_max_len,
            count: self.config.defect_samples,
            seed: self.config.seed,
            required,
        }
    }

    pub fn defects(&self) -> Result<Vec<DefectReport>> {
        let sampler = self.sampler();
        self.evaluators.iter().map(|ev| defect_estimate(ev, &sampler)).collect()
    }

    /// Doubling checks for every power pair in the defect sample.
    pub fn doubling_checks(&self, defects: &[i64]) -> Result<Vec<DoublingCheck>> {
        let mut out = Vec::new();
        for (i, ev) in self.evaluators.iter().enumerate() {
            for m in &self.family {
                let mut p = 1;
                while 2 * p <= self.max_power() {
                    let h_m = ev.h(&m.element.pow(p as i64))?.value;
                    let h_2m = ev.h(&m.element.pow(2 * p as i64))?.value;
                    out.push(DoublingCheck {
                        omega: i + 1,
                        element: m.label.clone(),
                        m: p,
                        h_m,
                        h_2m,
                        defect: defects[i],
                        consistent: doubling_consistent(h_m, h_2m, defects[i]),
                    });
                    p *= 2;
                }
            }
        }
        Ok(out)
    }

    /// Tries the configured powers in order and stops at the first
    /// certified growth matrix.
    pub fn growth(&self, defects: &[i64]) -> Result<GrowthOutcome> {
        let elements: Vec<Element> = self.family.iter().map(|m| m.element.clone()).collect();
        let mut tried = Vec::new();
        let mut last = None;
        for &m in &self.config.powers {
            tried.push(m);
            let matrix = growth_matrix(&self.evaluators, &elements, m, defects)?;
            let certificate = independence_certificate(&matrix.intervals())?;
            let done = certificate.certified && matrix.diagonal_positive();
            last = Some(GrowthOutcome { matrix, certificate, tried: tried.clone() });
            if done {
                break;
            }
        }
        Ok(last.expect("at least one power"))
    }

    /// `cyclic_bound_audit` of every `h_{ω_i}` on every `f_j`, row-major.
    pub fn cyclic_audits(&self, defects: &[i64]) -> Result<Vec<AuditReport>> {
        let n = self.family.len();
        (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let m = &self.family[j];
                let mut r = cyclic_bound_audit(&self.evaluators[i], &m.label, &m.group_word, self.config.cyclic_nmax, defects[i])?;
                r.parameters.insert("omega".into(), (i + 1).to_string());
                Ok(r)
            })
            .collect()
    }

    /// Subgroup audit of every `h_{ω_i}` on the handlebody-like subgroup or
    /// on the stabilizer.
    pub fn subgroup_audits(&self, kind: AuditKind) -> Result<Vec<AuditReport>> {
        let names = match kind {
            AuditKind::Handlebody => &self.config.handlebody,
            AuditKind::Stabilizer => &self.config.stabilizer,
            _ => return Err(Error::Config(format!("{kind} is not a subgroup audit"))),
        };
        let gens = self.words(names)?;
        self.evaluators
            .iter()
            .enumerate()
            .map(|(i, ev)| {
                let mut r = subgroup_bound_audit(ev, kind, &gens, self.config.subgroup_maxlen)?;
                r.parameters.insert("omega".into(), (i + 1).to_string());
                Ok(r)
            })
            .collect()
    }

    /// The handlebody-like orbit of the basepoint, up to the subgroup cap.
    pub fn disk_set(&self) -> Result<OrbitSet> {
        let gens: Vec<GroupWord> = self.words(&self.config.handlebody)?.into_iter().map(|(_, w)| w).collect();
        let mut members: Vec<Vertex> = subgroup_ball(&gens, self.config.subgroup_maxlen, &self.group)?
            .iter()
            .map(|(_, e)| e.apply(&self.config.basepoint))
            .collect::<Result<_>>()?;
        members.sort();
        members.dedup();
        Ok(OrbitSet { members, dropped: 0 })
    }

    /// Avoidance audit of each `ω_i` for each configured `B`, inside the
    /// corridor from `f_i^-2·v_i` to `f_i^2·v_i` thickened
    /// `avoidance_thickness` times.
    pub fn avoidance_audits(&self) -> Result<Vec<AuditReport>> {
        let disk = self.disk_set()?;
        let mut out = Vec::new();
        for (i, m) in self.family.iter().enumerate() {
            let a = m.element.pow(-2).apply(&m.axis_point)?;
            let b = m.element.pow(2).apply(&m.axis_point)?;
            let (Some(sa), Some(sb)) = (a.slope(), b.slope()) else {
                return Err(Error::Domain("axis points must be slopes".into()));
            };
            let g = farey_corridor(sa, sb, self.config.avoidance_thickness);
            for &bb in &self.config.avoidance_b {
                let mut r = avoidance_audit(&m.segment.omega, &disk, bb, &g)?;
                r.parameters.insert("omega".into(), (i + 1).to_string());
                out.push(r);
            }
        }
        Ok(out)
    }

    /// Double-coset audit of each `h_{ω_i}` over the family and the
    /// stabilizer, against `2·D_i + 2·B_T`.
    pub fn coset_audits(&self, defects: &[i64], b_t: &[i64]) -> Result<Vec<AuditReport>> {
        let t = self.words(&self.config.stabilizer)?;
        let fam = self.family_words();
        let sampling = CosetSampling {
            count: self.config.coset_samples,
            cap: self.config.coset_cap,
            seed: self.config.seed,
        };
        self.evaluators
            .iter()
            .enumerate()
            .map(|(i, ev)| {
                let mut r = double_coset_audit(ev, &fam, &t, &sampling, defects[i], b_t[i])?;
                r.parameters.insert("omega".into(), (i + 1).to_string());
                Ok(r)
            })
            .collect()
    }
}

/// A compact text rendering of a growth matrix.
pub fn growth_table(g: &GrowthMatrix) -> String {
    let mut s = format!("M = {}\n", g.power);
    for (i, row) in g.entries.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|h| format!("{:>12}", format!("{}±{}", h.value, h.error))).collect();
        let _ = writeln!(s, "h{} | {}", i + 1, cells.join(" "));
    }
    s
}
