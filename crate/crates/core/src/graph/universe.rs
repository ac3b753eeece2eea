use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::RwLock;

use serde::Serialize;

use super::corridor::{farey_corridor, tree_corridor};
use super::truncated::{farey_height, tree_ball, TruncatedGraph};
use super::vertex::{Model, Vertex};
use crate::error::{Error, Result};

/// How the finite graph for a pair of vertices is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truncation {
    /// One graph for all pairs: Farey height `≤ N` or tree ball of radius `N`.
    Global,
    /// A corridor of width `N` around the pair.
    Corridor,
}

/// A model together with its truncation scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    pub model: Model,
    pub truncation: Truncation,
}

impl Universe {
    pub fn new(model: Model, truncation: Truncation) -> Self {
        Universe { model, truncation }
    }

    /// The graph at truncation parameter `n` that serves the pair `(x, y)`.
    pub fn graph(&self, x: &Vertex, y: &Vertex, n: u64) -> Result<TruncatedGraph> {
        match (self.model, self.truncation) {
            (Model::Farey, Truncation::Global) => Ok(farey_height(n)),
            (Model::Tree { rank }, Truncation::Global) => tree_ball(rank, n),
            (Model::Farey, Truncation::Corridor) => {
                let (a, b) = (slope_of(x)?, slope_of(y)?);
                Ok(farey_corridor(a, b, n))
            }
            (Model::Tree { rank }, Truncation::Corridor) => {
                let (a, b) = (word_of(x)?, word_of(y)?);
                tree_corridor(a, b, rank, n)
            }
        }
    }

    pub fn is_pair_local(&self) -> bool {
        self.truncation == Truncation::Corridor
    }
}

fn slope_of(v: &Vertex) -> Result<&super::Slope> {
    v.slope().ok_or_else(|| Error::Domain(format!("{v} is not a slope")))
}

fn word_of(v: &Vertex) -> Result<&crate::moebius::GroupWord> {
    v.word().ok_or_else(|| Error::Domain(format!("{v} is not a tree vertex")))
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.model, self.truncation) {
            (Model::Farey, Truncation::Global) => f.write_str("farey"),
            (Model::Farey, Truncation::Corridor) => f.write_str("farey-corridor"),
            (Model::Tree { rank }, Truncation::Global) => write!(f, "tree:{rank}"),
            (Model::Tree { rank }, Truncation::Corridor) => write!(f, "tree-corridor:{rank}"),
        }
    }
}

impl FromStr for Universe {
    type Err = Error;

    /// `farey`, `farey-corridor`, `tree[:rank]` or `tree-corridor[:rank]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rank) = match s.split_once(':') {
            Some((h, r)) => {
                let r: u16 = r.parse().map_err(|_| Error::Parse(format!("bad rank in `{s}`")))?;
                (h, Some(r))
            }
            None => (s, None),
        };
        let tree = || Model::tree(rank.unwrap_or(2));
        let u = match head {
            "farey" if rank.is_none() => Universe::new(Model::Farey, Truncation::Global),
            "farey-corridor" if rank.is_none() => Universe::new(Model::Farey, Truncation::Corridor),
            "tree" => Universe::new(tree()?, Truncation::Global),
            "tree-corridor" => Universe::new(tree()?, Truncation::Corridor),
            _ => return Err(Error::Parse(format!("unknown model `{s}`"))),
        };
        Ok(u)
    }
}

impl Serialize for Universe {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A strictly increasing, nonempty list of truncation parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule(Vec<u64>);

impl Schedule {
    pub fn new(points: Vec<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("empty truncation schedule".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("schedule {points:?} is not strictly increasing")));
        }
        Ok(Schedule(points))
    }

    pub fn points(&self) -> &[u64] {
        &self.0
    }

    pub fn first(&self) -> u64 {
        self.0[0]
    }

    pub fn last(&self) -> u64 {
        self.0[self.0.len() - 1]
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let pts = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad schedule `{s}`"))))
            .collect::<Result<Vec<u64>>>()?;
        Schedule::new(pts)
    }
}

/// Result of running a computation across a truncation schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilized<T> {
    pub value: T,
    /// First schedule point of the agreeing pair, or the last usable point.
    pub n_star: u64,
    pub stable: bool,
    /// Value at each schedule point visited; `None` where the truncation was too small.
    pub trail: Vec<(u64, Option<T>)>,
}

/// Evaluates `f` along the schedule and stops at the first value seen at
/// two consecutive points. `f` returns `Ok(None)` when the truncation is
/// too small to answer.
pub fn stabilize<T, F>(schedule: &Schedule, mut f: F) -> Result<Stabilized<T>>
where
    T: Clone + PartialEq,
    F: FnMut(u64) -> Result<Option<T>>,
{
    let mut trail: Vec<(u64, Option<T>)> = Vec::new();
    for &n in schedule.points() {
        let v = f(n)?;
        if let (Some((pn, Some(prev))), Some(cur)) = (trail.last(), v.as_ref()) {
            if prev == cur {
                let (value, n_star) = (cur.clone(), *pn);
                trail.push((n, v));
                return Ok(Stabilized { value, n_star, stable: true, trail });
            }
        }
        trail.push((n, v));
    }
    match trail.iter().rev().find_map(|(n, v)| v.clone().map(|v| (*n, v))) {
        Some((n_star, value)) => Ok(Stabilized { value, n_star, stable: false, trail }),
        None => Err(Error::Unreachable {
            n: schedule.last(),
            detail: "no schedule point produced a value".into(),
        }),
    }
}

/// Maps truncation failures to `None` so that [`stabilize`] moves on.
pub fn too_small_as_none<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unreachable { .. }) | Err(Error::NotInGraph(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Distance across a schedule; distances are non-increasing in `N`.
pub fn distance_stable(
    x: &Vertex,
    y: &Vertex,
    universe: &Universe,
    schedule: &Schedule,
    cache: Option<&DistanceCache>,
) -> Result<Stabilized<u32>> {
    let model = universe.to_string();
    stabilize(schedule, |n| {
        if let Some(d) = cache.and_then(|c| c.get(&model, n, x, y)) {
            return Ok(Some(d));
        }
        let d = too_small_as_none(universe.graph(x, y, n).and_then(|g| g.distance(x, y)))?;
        if let (Some(c), Some(d)) = (cache, d) {
            c.insert(&model, n, x, y, d);
        }
        Ok(d)
    })
}

type CacheKey = (String, u64, String, String);

/// Distance cache persisted as lines `model,N,x,y,d`.
///
/// Readers share the map; writers take it exclusively and the last write
/// wins. Values are deterministic, so concurrent writers agree.
#[derive(Debug, Default)]
pub struct DistanceCache {
    path: Option<PathBuf>,
    map: RwLock<HashMap<CacheKey, u32>>,
}

impl DistanceCache {
    pub fn in_memory() -> Self {
        DistanceCache::default()
    }

    /// Opens a cache file, which need not exist yet.
    pub fn open(path: &Path) -> Result<Self> {
        let mut map = HashMap::new();
        if path.exists() {
            for (i, line) in fs::read_to_string(path)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let bad = || Error::Parse(format!("{}:{}: bad cache record", path.display(), i + 1));
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 5 {
                    return Err(bad());
                }
                let n: u64 = f[1].parse().map_err(|_| bad())?;
                let d: u32 = f[4].parse().map_err(|_| bad())?;
                map.insert((f[0].to_string(), n, f[2].to_string(), f[3].to_string()), d);
            }
        }
        Ok(DistanceCache { path: Some(path.to_path_buf()), map: RwLock::new(map) })
    }

    pub fn get(&self, model: &str, n: u64, x: &Vertex, y: &Vertex) -> Option<u32> {
        let key = (model.to_string(), n, x.to_string(), y.to_string());
        self.map.read().expect("cache lock").get(&key).copied()
    }

    pub fn insert(&self, model: &str, n: u64, x: &Vertex, y: &Vertex, d: u32) {
        let key = (model.to_string(), n, x.to_string(), y.to_string());
        self.map.write().expect("cache lock").insert(key, d);
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes all records, sorted, to the backing file if there is one.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let map = self.map.read().expect("cache lock");
        let sorted: BTreeMap<&CacheKey, &u32> = map.iter().collect();
        let mut out = fs::File::create(path)?;
        for ((m, n, x, y), d) in sorted {
            writeln!(out, "{m},{n},{x},{y},{d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(x: &str) -> Vertex {
        Model::Farey.parse_vertex(x).unwrap()
    }

    #[test]
    fn universe_names_round_trip() {
        for s in ["farey", "farey-corridor", "tree:2", "tree-corridor:3"] {
            assert_eq!(s.parse::<Universe>().unwrap().to_string(), s);
        }
        assert_eq!("tree".parse::<Universe>().unwrap().to_string(), "tree:2");
        assert!("farey:2".parse::<Universe>().is_err());
        assert!("torus".parse::<Universe>().is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!("4,8,16".parse::<Schedule>().is_ok());
        assert!("4,4".parse::<Schedule>().is_err());
        assert!("".parse::<Schedule>().is_err());
    }

    #[test]
    fn stable_distance_examples() {
        let u: Universe = "farey".parse().unwrap();
        let sch: Schedule = "1,2,3,4".parse().unwrap();
        let r = distance_stable(&sv("0/1"), &sv("1/0"), &u, &sch, None).unwrap();
        assert_eq!((r.value, r.n_star, r.stable), (1, 1, true));
        let r = distance_stable(&sv("2/3"), &sv("2/3"), &u, &sch, None).unwrap();
        assert_eq!((r.value, r.n_star, r.stable), (0, 3, true));
        let r = distance_stable(&sv("-1/1"), &sv("1/1"), &u, &sch, None).unwrap();
        assert_eq!((r.value, r.n_star), (2, 1));
    }

    #[test]
    fn fibonacci_slopes_stabilize() {
        let u: Universe = "farey".parse().unwrap();
        let sch: Schedule = "8,13,21,34".parse().unwrap();
        let r = distance_stable(&sv("0/1"), &sv("5/8"), &u, &sch, None).unwrap();
        assert!(r.stable);
        let vals: Vec<u32> = r.trail.iter().filter_map(|(_, v)| *v).collect();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let corridor: Universe = "farey-corridor".parse().unwrap();
        let c = distance_stable(&sv("0/1"), &sv("5/8"), &corridor, &"0,1".parse().unwrap(), None)
            .unwrap();
        assert_eq!(c.value, r.value);
    }

    #[test]
    fn unstable_is_reported() {
        let u: Universe = "farey".parse().unwrap();
        let sch: Schedule = "2".parse().unwrap();
        let r = distance_stable(&sv("0/1"), &sv("1/2"), &u, &sch, None).unwrap();
        assert!(!r.stable);
        assert!(distance_stable(&sv("0/1"), &sv("1/7"), &u, &sch, None).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let u: Universe = "farey".parse().unwrap();
        let sch: Schedule = "3,5".parse().unwrap();
        let cache = DistanceCache::open(&path).unwrap();
        let fresh = distance_stable(&sv("-1/1"), &sv("2/3"), &u, &sch, Some(&cache)).unwrap();
        cache.save().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("farey,3,-1/1,2/3,"));
        let reopened = DistanceCache::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
        let again = distance_stable(&sv("-1/1"), &sv("2/3"), &u, &sch, Some(&reopened)).unwrap();
        assert_eq!(fresh, again);
        std::fs::write(&path, "farey,3,x\n").unwrap();
        assert!(DistanceCache::open(&path).is_err());
    }
}
