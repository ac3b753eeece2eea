use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::slope::Slope;
use super::vertex::{Model, Vertex};
use crate::error::{Error, Result};
use crate::moebius::{GenId, GroupWord};

/// Distance value for vertices not reached by a search.
pub const UNREACHED: u32 = u32::MAX;

/// How a finite graph was cut out of its model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// Slopes of height at most `N`.
    FareyHeight,
    /// The ladder of Farey triangles between two slopes, thickened `N` times.
    FareyCorridor,
    /// Reduced words of length at most `N`.
    TreeBall { rank: u16 },
    /// The `N`-neighbourhood of a tree geodesic.
    TreeCorridor { rank: u16 },
    /// A base graph with one apex per configured subset.
    ConeOff { base: Box<GraphKind>, subsets: usize },
}

impl GraphKind {
    pub fn model(&self) -> Model {
        match self {
            GraphKind::FareyHeight | GraphKind::FareyCorridor => Model::Farey,
            GraphKind::TreeBall { rank } | GraphKind::TreeCorridor { rank } => {
                Model::Tree { rank: *rank }
            }
            GraphKind::ConeOff { base, .. } => base.model(),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::FareyHeight => f.write_str("farey"),
            GraphKind::FareyCorridor => f.write_str("farey-corridor"),
            GraphKind::TreeBall { rank } => write!(f, "tree:{rank}"),
            GraphKind::TreeCorridor { rank } => write!(f, "tree-corridor:{rank}"),
            GraphKind::ConeOff { base, subsets } => write!(f, "coned({base};{subsets})"),
        }
    }
}

/// A finite, immutable piece of a model graph.
///
/// Vertices are stored in increasing [`Vertex`] order, so vertex ids and
/// neighbour lists are ordered the same way as the vertices themselves.
#[derive(Clone, Debug)]
pub struct TruncatedGraph {
    kind: GraphKind,
    bound: u64,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, u32>,
    adj: Vec<Vec<u32>>,
}

impl TruncatedGraph {
    /// Builds the graph on `vertices` with the given undirected edges.
    /// Edges touching unknown vertices and loops are ignored.
    pub fn from_edges<I>(kind: GraphKind, bound: u64, vertices: BTreeSet<Vertex>, edges: I) -> Self
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let vertices: Vec<Vertex> = vertices.into_iter().collect();
        let index: HashMap<Vertex, u32> =
            vertices.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        for (u, v) in edges {
            if let (Some(&i), Some(&j)) = (index.get(&u), index.get(&v)) {
                if i != j {
                    adj[i as usize].push(j);
                    adj[j as usize].push(i);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        TruncatedGraph { kind, bound, vertices, index, adj }
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn model(&self) -> Model {
        self.kind.model()
    }

    /// The truncation parameter `N` (height, radius or corridor width).
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: u32) -> &Vertex {
        &self.vertices[id as usize]
    }

    pub fn id(&self, v: &Vertex) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(v)
    }

    pub(crate) fn require(&self, v: &Vertex) -> Result<u32> {
        self.id(v).ok_or_else(|| Error::NotInGraph(v.to_string()))
    }

    pub fn neighbor_ids(&self, id: u32) -> &[u32] {
        &self.adj[id as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    /// Neighbours of `v` inside the truncation, in vertex order.
    pub fn neighbors(&self, v: &Vertex) -> Result<Vec<&Vertex>> {
        let id = self.require(v)?;
        Ok(self.neighbor_ids(id).iter().map(|&j| self.vertex(j)).collect())
    }

    /// Ordered edges `(u, v)`, each undirected edge appearing twice.
    pub fn ordered_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&j| (i as u32, j)))
    }

    /// Breadth-first distances from a set of sources.
    pub fn bfs(&self, sources: &[u32]) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize] != 0 {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &self.adj[u as usize] {
                if dist[v as usize] == UNREACHED {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub(crate) fn unreachable(&self, x: &Vertex, y: &Vertex) -> Error {
        Error::Unreachable {
            n: self.bound,
            detail: format!("{y} not reachable from {x} in {}", self.kind),
        }
    }

    pub fn distance(&self, x: &Vertex, y: &Vertex) -> Result<u32> {
        let (i, j) = (self.require(x)?, self.require(y)?);
        match self.bfs(&[i])[j as usize] {
            UNREACHED => Err(self.unreachable(x, y)),
            d => Ok(d),
        }
    }

    /// Canonical geodesic as vertex ids: from each vertex, step to the
    /// smallest neighbour that is one closer to the target.
    pub fn geodesic_ids(&self, i: u32, j: u32) -> Option<Vec<u32>> {
        let dist = self.bfs(&[j]);
        if dist[i as usize] == UNREACHED {
            return None;
        }
        let mut path = vec![i];
        let mut u = i;
        while u != j {
            let du = dist[u as usize];
            u = *self.adj[u as usize]
                .iter()
                .find(|&&v| dist[v as usize] == du - 1)
                .expect("bfs predecessor");
            path.push(u);
        }
        Some(path)
    }

    pub fn geodesic(&self, x: &Vertex, y: &Vertex) -> Result<GraphPath> {
        let (i, j) = (self.require(x)?, self.require(y)?);
        let ids = self.geodesic_ids(i, j).ok_or_else(|| self.unreachable(x, y))?;
        Ok(self.path_from_ids(&ids))
    }

    pub fn path_from_ids(&self, ids: &[u32]) -> GraphPath {
        GraphPath::new(ids.iter().map(|&i| self.vertex(i).clone()).collect())
    }

    /// Vertex ids of a path, checking membership and adjacency.
    pub fn path_ids(&self, path: &GraphPath) -> Result<Vec<u32>> {
        let ids = path
            .vertices()
            .iter()
            .map(|v| self.require(v))
            .collect::<Result<Vec<u32>>>()?;
        for w in ids.windows(2) {
            if !self.has_edge(w[0], w[1]) {
                return Err(Error::InvalidPath(format!(
                    "{} and {} are not adjacent",
                    self.vertex(w[0]),
                    self.vertex(w[1])
                )));
            }
        }
        Ok(ids)
    }

    /// The induced subgraph on a vertex subset.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> TruncatedGraph {
        let edges = self
            .ordered_edges()
            .map(|(a, b)| (self.vertex(a).clone(), self.vertex(b).clone()))
            .collect::<Vec<_>>();
        let verts = keep.iter().filter(|v| self.contains(v)).cloned().collect();
        TruncatedGraph::from_edges(self.kind.clone(), self.bound, verts, edges)
    }
}

/// An ordered list of vertices; consecutive vertices should be adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GraphPath {
    vertices: Vec<Vertex>,
}

impl GraphPath {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        GraphPath { vertices }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.vertices
    }

    /// Length in edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn start(&self) -> Option<&Vertex> {
        self.vertices.first()
    }

    pub fn end(&self) -> Option<&Vertex> {
        self.vertices.last()
    }

    pub fn reversed(&self) -> GraphPath {
        GraphPath::new(self.vertices.iter().rev().cloned().collect())
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn join(&self, other: &GraphPath) -> Result<GraphPath> {
        match (self.end(), other.start()) {
            (Some(a), Some(b)) if a == b => {
                let mut v = self.vertices.clone();
                v.extend(other.vertices[1..].iter().cloned());
                Ok(GraphPath::new(v))
            }
            (None, _) => Ok(other.clone()),
            (_, None) => Ok(self.clone()),
            _ => Err(Error::InvalidPath("paths do not share an endpoint".into())),
        }
    }

    pub fn has_backtracking(&self) -> bool {
        self.vertices.windows(3).any(|w| w[0] == w[2])
    }

    /// Checks the path against a graph; immediate backtracking is rejected
    /// unless allowed.
    pub fn validate(&self, g: &TruncatedGraph, allow_backtracking: bool) -> Result<()> {
        g.path_ids(self)?;
        if !allow_backtracking && self.has_backtracking() {
            return Err(Error::InvalidPath("path backtracks".into()));
        }
        Ok(())
    }
}

impl fmt::Display for GraphPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if !r.is_zero() && (r.is_positive() == b.is_positive()) {
        q + 1
    } else {
        q
    }
}

/// Farey neighbours of `s` of height at most `n`.
pub fn farey_neighbors_within(s: &Slope, n: u64) -> Vec<Slope> {
    let n = BigInt::from(n);
    let frame = s.frame();
    let [p, r, q, t] = frame.entries();
    // Neighbours of s are frame(k/1) = (p k + r)/(q k + t) for k in Z;
    // substituting -k makes the coefficient of k in the denominator nonnegative.
    let (p, q) = if q.is_negative() { (-p, -q) } else { (p.clone(), q.clone()) };
    let (p, q) = (&p, &q);
    let (lo, hi) = if q.is_zero() {
        (-&n, n.clone())
    } else {
        (ceil_div(&(-&n - t), q), (&n - t).div_floor(q))
    };
    let mut out = Vec::new();
    let mut k = lo;
    while k <= hi {
        let nb = Slope::normalized(p * &k + r, q * &k + t);
        if nb.height() <= n {
            out.push(nb);
        }
        k += 1;
    }
    out
}

/// All slopes of height at most `n`, plus `∞`.
pub fn farey_height(n: u64) -> TruncatedGraph {
    let mut verts = BTreeSet::new();
    verts.insert(Vertex::Slope(Slope::infinity()));
    for q in 1..=n {
        for p in -(n as i64)..=(n as i64) {
            if num_integer::gcd(p.unsigned_abs(), q) == 1 {
                verts.insert(Vertex::Slope(Slope::new(p, q).expect("nonzero q")));
            }
        }
    }
    let mut edges = Vec::new();
    for v in &verts {
        let s = v.slope().expect("slope vertex");
        for nb in farey_neighbors_within(s, n) {
            edges.push((v.clone(), Vertex::Slope(nb)));
        }
    }
    TruncatedGraph::from_edges(GraphKind::FareyHeight, n, verts, edges)
}

/// Neighbours of a vertex in the Cayley tree of the free group.
pub fn tree_neighbors(w: &GroupWord, rank: u16) -> impl Iterator<Item = GroupWord> + '_ {
    (0..rank).flat_map(move |g| {
        [1i64, -1].into_iter().map(move |e| w.concat(&GroupWord::generator(GenId(g), e)))
    })
}

/// Reduced words of length at most `radius` in a free group of the given rank.
pub fn tree_ball(rank: u16, radius: u64) -> Result<TruncatedGraph> {
    Model::tree(rank)?;
    let mut verts = BTreeSet::new();
    let mut frontier = vec![GroupWord::identity()];
    verts.insert(Vertex::Word(GroupWord::identity()));
    let mut edges = Vec::new();
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for nb in tree_neighbors(w, rank) {
                if nb.len() > w.len() {
                    edges.push((Vertex::Word(w.clone()), Vertex::Word(nb.clone())));
                    verts.insert(Vertex::Word(nb.clone()));
                    next.push(nb);
                }
            }
        }
        frontier = next;
    }
    Ok(TruncatedGraph::from_edges(GraphKind::TreeBall { rank }, radius, verts, edges))
}

/// Electrifies `base`: apex `i` is joined to every member of `subsets[i]`.
pub fn cone_off(base: &TruncatedGraph, subsets: &[Vec<Vertex>]) -> Result<TruncatedGraph> {
    let mut verts: BTreeSet<Vertex> = base.vertices().iter().cloned().collect();
    let mut edges: Vec<(Vertex, Vertex)> = base
        .ordered_edges()
        .filter(|(a, b)| a < b)
        .map(|(a, b)| (base.vertex(a).clone(), base.vertex(b).clone()))
        .collect();
    for (i, subset) in subsets.iter().enumerate() {
        if subset.is_empty() {
            return Err(Error::Config(format!("cone-off subset {i} is empty")));
        }
        let apex = Vertex::Apex(i as u32);
        for v in subset {
            base.require(v)?;
            edges.push((apex.clone(), v.clone()));
        }
        verts.insert(apex);
    }
    let kind = GraphKind::ConeOff { base: Box::new(base.kind.clone()), subsets: subsets.len() };
    Ok(TruncatedGraph::from_edges(kind, base.bound, verts, edges))
}
