use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use serde::Serialize;

use super::omega::{OmegaSegment, PenaltySpec};
use super::translates::enumerate_translates;
use crate::error::{Error, Result};
use crate::graph::{stabilize, too_small_as_none, ActingGroup, Element, TruncatedGraph, Vertex, UNREACHED};
use crate::moebius::GroupWord;

/// Shortcut arcs contributed by the translates of `ω` in one graph.
///
/// Each copy `g·ω` from `s` to `t` gives an arc `s → t` for `ω` and, read
/// backwards, an arc `t → s` for `ω⁻¹`: the translates of `ω⁻¹` are exactly
/// the reversed translates of `ω`.
#[derive(Clone, Debug, Default)]
pub struct Shortcuts {
    forward: Vec<Vec<u32>>,
    backward: Vec<Vec<u32>>,
    pub translates: usize,
    pub dropped: usize,
}

impl Shortcuts {
    pub fn new(omega: &OmegaSegment, g: &TruncatedGraph) -> Result<Self> {
        let set = enumerate_translates(omega, g)?;
        let mut forward = vec![Vec::new(); g.len()];
        let mut backward = vec![Vec::new(); g.len()];
        for c in &set.copies {
            forward[c.start() as usize].push(c.end());
            backward[c.end() as usize].push(c.start());
        }
        Ok(Shortcuts { forward, backward, translates: set.copies.len(), dropped: set.dropped })
    }

    fn arcs(&self, reversed: bool) -> &[Vec<u32>] {
        if reversed {
            &self.backward
        } else {
            &self.forward
        }
    }
}

/// Dijkstra on the graph plus shortcut arcs of the given cost.
fn augmented_distance(g: &TruncatedGraph, arcs: &[Vec<u32>], cost: u32, x: u32, y: u32) -> Option<u32> {
    let mut dist = vec![UNREACHED; g.len()];
    let mut heap = BinaryHeap::new();
    dist[x as usize] = 0;
    heap.push(Reverse((0u32, x)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if u == y {
            return Some(d);
        }
        if d > dist[u as usize] {
            continue;
        }
        let steps = g.neighbor_ids(u).iter().map(|&v| (v, 1)).chain(arcs[u as usize].iter().map(|&v| (v, cost)));
        for (v, c) in steps {
            let nd = d + c;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    None
}

/// `inf_α (|α| - W·|α|_ω)` over paths from `x` to `y` in `g`, using
/// precomputed shortcuts. Choosing disjoint copies along a path is the
/// same as walking in the graph augmented by one arc of cost `|ω| - W`
/// per copy, so the infimum is a shortest-path distance.
pub fn penalized_infimum_with(
    g: &TruncatedGraph,
    shortcuts: &Shortcuts,
    omega_len: usize,
    w: u32,
    reversed: bool,
    x: &Vertex,
    y: &Vertex,
) -> Result<u32> {
    let (i, j) = (g.require(x)?, g.require(y)?);
    let cost = omega_len as u32 - w;
    augmented_distance(g, shortcuts.arcs(reversed), cost, i, j).ok_or_else(|| g.unreachable(x, y))
}

pub fn penalized_infimum(x: &Vertex, y: &Vertex, omega: &OmegaSegment, w: u32, g: &TruncatedGraph) -> Result<u32> {
    check_penalty(omega, w)?;
    let sc = Shortcuts::new(omega, g)?;
    penalized_infimum_with(g, &sc, omega.len(), w, false, x, y)
}

/// `C_{ω,W}(x, y) = d(x, y) - inf_α (|α| - W·|α|_ω)` in a single graph.
pub fn counting_value_in(x: &Vertex, y: &Vertex, omega: &OmegaSegment, w: u32, g: &TruncatedGraph) -> Result<i64> {
    let d = g.distance(x, y)?;
    Ok(d as i64 - penalized_infimum(x, y, omega, w, g)? as i64)
}

fn check_penalty(omega: &OmegaSegment, w: u32) -> Result<()> {
    if w == 0 || w as usize >= omega.len() {
        return Err(Error::Config(format!("penalty {w} must lie strictly between 0 and {}", omega.len())));
    }
    Ok(())
}

/// A counting or quasi-homomorphism value with its truncation provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QMValue {
    pub value: i64,
    pub n_star: u64,
    pub stabilized: bool,
    pub translates: usize,
    pub dropped: usize,
    /// `C_{ω,W}` and `C_{ω⁻¹,W}` for values of `h_ω`.
    pub terms: Option<[i64; 2]>,
}

struct Stage {
    graph: Arc<TruncatedGraph>,
    shortcuts: Arc<Shortcuts>,
}

type GlobalStages = Mutex<BTreeMap<u64, (Arc<TruncatedGraph>, Arc<Shortcuts>)>>;

/// Evaluates `C_{ω,W}` and `h_ω` for one [`PenaltySpec`], following its
/// truncation schedule. Values of `h_ω` are memoized by group element.
pub struct Evaluator {
    spec: PenaltySpec,
    group: ActingGroup,
    globals: GlobalStages,
    memo: RwLock<HashMap<Element, QMValue>>,
}

impl Evaluator {
    pub fn new(spec: PenaltySpec, group: ActingGroup) -> Result<Self> {
        if group.model() != spec.universe.model {
            return Err(Error::Config("generators and model do not match".into()));
        }
        Ok(Evaluator { spec, group, globals: Mutex::new(BTreeMap::new()), memo: RwLock::new(HashMap::new()) })
    }

    pub fn spec(&self) -> &PenaltySpec {
        &self.spec
    }

    pub fn group(&self) -> &ActingGroup {
        &self.group
    }

    fn stage(&self, x: &Vertex, y: &Vertex, n: u64) -> Result<Stage> {
        if self.spec.universe.is_pair_local() {
            let graph = self.spec.universe.graph(x, y, n)?;
            let shortcuts = Shortcuts::new(&self.spec.omega, &graph)?;
            return Ok(Stage { graph: Arc::new(graph), shortcuts: Arc::new(shortcuts) });
        }
        if let Some((g, s)) = self.globals.lock().expect("stage lock").get(&n) {
            return Ok(Stage { graph: g.clone(), shortcuts: s.clone() });
        }
        let graph = Arc::new(self.spec.universe.graph(x, y, n)?);
        let shortcuts = Arc::new(Shortcuts::new(&self.spec.omega, &graph)?);
        let mut map = self.globals.lock().expect("stage lock");
        let (g, s) = map.entry(n).or_insert((graph, shortcuts));
        Ok(Stage { graph: g.clone(), shortcuts: s.clone() })
    }

    /// `(C_{ω,W}(x,y), C_{ω⁻¹,W}(x,y))` at one schedule point.
    fn terms_at(&self, x: &Vertex, y: &Vertex, n: u64, with_inverse: bool) -> Result<([i64; 2], usize, usize)> {
        let st = self.stage(x, y, n)?;
        let d = st.graph.distance(x, y)? as i64;
        let (len, w) = (self.spec.omega.len(), self.spec.w);
        let plus = d - penalized_infimum_with(&st.graph, &st.shortcuts, len, w, false, x, y)? as i64;
        let minus = if with_inverse {
            d - penalized_infimum_with(&st.graph, &st.shortcuts, len, w, true, x, y)? as i64
        } else {
            0
        };
        Ok(([plus, minus], st.shortcuts.translates, st.shortcuts.dropped))
    }

    fn run(&self, x: &Vertex, y: &Vertex, with_inverse: bool) -> Result<QMValue> {
        let mut counts: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
        let st = stabilize(&self.spec.schedule, |n| {
            let r = too_small_as_none(self.terms_at(x, y, n, with_inverse))?;
            Ok(r.map(|(terms, t, d)| {
                counts.insert(n, (t, d));
                terms
            }))
        })?;
        let (translates, dropped) = counts[&st.n_star];
        let [plus, minus] = st.value;
        Ok(QMValue {
            value: plus - minus,
            n_star: st.n_star,
            stabilized: st.stable,
            translates,
            dropped,
            terms: with_inverse.then_some([plus, minus]),
        })
    }

    /// `C_{ω,W}(x, y)` across the schedule.
    pub fn counting_value(&self, x: &Vertex, y: &Vertex) -> Result<QMValue> {
        self.run(x, y, false)
    }

    /// `h_ω(g) = C_{ω,W}(d₀, g·d₀) - C_{ω⁻¹,W}(d₀, g·d₀)`.
    pub fn h(&self, g: &Element) -> Result<QMValue> {
        if let Some(v) = self.memo.read().expect("memo lock").get(g) {
            return Ok(v.clone());
        }
        let d0 = &self.spec.basepoint;
        let v = self.run(d0, &g.apply(d0)?, true)?;
        self.memo.write().expect("memo lock").insert(g.clone(), v.clone());
        Ok(v)
    }

    pub fn h_word(&self, w: &GroupWord) -> Result<QMValue> {
        self.h(&self.group.evaluate(w)?)
    }
}
