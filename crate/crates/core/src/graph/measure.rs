use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::truncated::{GraphPath, TruncatedGraph, UNREACHED};
use super::vertex::{ActingGroup, Element, Vertex};
use crate::error::{Error, Result};
use crate::moebius::GroupWord;

fn ids_of(g: &TruncatedGraph, vs: &[Vertex]) -> Result<Vec<u32>> {
    vs.iter().map(|v| g.require(v)).collect()
}

/// Every `b ∈ B` at minimal distance from `A`.
pub fn coarse_projection(a: &[Vertex], b: &[Vertex], g: &TruncatedGraph) -> Result<Vec<Vertex>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Config("coarse projection needs nonempty sets".into()));
    }
    let dist = g.bfs(&ids_of(g, a)?);
    let bids = ids_of(g, b)?;
    let best = bids.iter().map(|&i| dist[i as usize]).min().expect("nonempty");
    if best == UNREACHED {
        return Err(Error::Unreachable { n: g.bound(), detail: "sets are disconnected".into() });
    }
    let picked: BTreeSet<u32> = bids.into_iter().filter(|&i| dist[i as usize] == best).collect();
    Ok(picked.into_iter().map(|i| g.vertex(i).clone()).collect())
}

/// The apex closest to `v` in a coned-off graph, smallest apex on ties.
pub fn project(v: &Vertex, coned: &TruncatedGraph) -> Result<Vertex> {
    let dist = coned.bfs(&[coned.require(v)?]);
    coned
        .vertices()
        .iter()
        .enumerate()
        .filter(|(i, u)| matches!(u, Vertex::Apex(_)) && dist[*i] != UNREACHED)
        .min_by_key(|(i, u)| (dist[*i], (*u).clone()))
        .map(|(_, u)| u.clone())
        .ok_or_else(|| Error::Unreachable { n: coned.bound(), detail: format!("no apex reachable from {v}") })
}

/// Constants `(λ, c)` with `(j - i)/λ - c ≤ d(p_i, p_j) ≤ λ(j - i) + c`.
///
/// Along a path `d(p_i, p_j) ≤ j - i`, so `λ = 1` always admits a finite
/// `c`; the lexicographically least pair therefore has `λ = 1` and
/// `c = max (j - i - d(p_i, p_j))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiGeodesicConstants {
    pub lambda: u32,
    pub c: u32,
}

fn pairwise_distances(path: &GraphPath, g: &TruncatedGraph) -> Result<Vec<Vec<u32>>> {
    let ids = g.path_ids(path)?;
    Ok(ids
        .iter()
        .map(|&i| {
            let dist = g.bfs(&[i]);
            ids.iter().map(|&j| dist[j as usize]).collect()
        })
        .collect())
}

pub fn quasi_geodesic_constants(path: &GraphPath, g: &TruncatedGraph) -> Result<QuasiGeodesicConstants> {
    let d = pairwise_distances(path, g)?;
    let n = d.len();
    let c = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (j - i) as u32 - d[i][j])
        .max()
        .unwrap_or(0);
    Ok(QuasiGeodesicConstants { lambda: 1, c })
}

/// The least additive constant that works with a given multiplicative one.
pub fn additive_constant(path: &GraphPath, g: &TruncatedGraph, lambda: &BigRational) -> Result<BigRational> {
    if *lambda < BigRational::from_integer(BigInt::from(1)) {
        return Err(Error::Domain("lambda must be at least 1".into()));
    }
    let d = pairwise_distances(path, g)?;
    let n = d.len();
    let mut c = BigRational::from_integer(BigInt::from(0));
    for i in 0..n {
        for j in i + 1..n {
            let len = BigRational::from_integer(BigInt::from(j - i));
            let dij = BigRational::from_integer(BigInt::from(d[i][j]));
            let lower = &len / lambda - &dij;
            let upper = &dij - lambda * &len;
            c = c.max(lower).max(upper);
        }
    }
    Ok(c)
}

/// The disk-set stand-in: the orbit of a seed vertex under a subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct DiskSetSpec {
    pub generators: Vec<GroupWord>,
    pub seed: Vertex,
    /// Longest subgroup word (in the generators) used to reach orbit points.
    pub cap: u32,
}

/// The materialized orbit, cut down to a truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSet {
    pub members: Vec<Vertex>,
    /// Orbit points that fell outside the truncation.
    pub dropped: usize,
}

impl OrbitSet {
    pub fn contains(&self, v: &Vertex) -> bool {
        self.members.binary_search(v).is_ok()
    }
}

/// All subgroup elements given by words of length at most `cap` in the
/// generators, together with one shortest spelling each.
pub fn subgroup_ball(
    generators: &[GroupWord],
    cap: u32,
    group: &ActingGroup,
) -> Result<Vec<(GroupWord, Element)>> {
    let gens: Vec<(GroupWord, Element)> = generators
        .iter()
        .flat_map(|w| [w.clone(), w.inverse()])
        .map(|w| group.evaluate(&w).map(|e| (w, e)))
        .collect::<Result<_>>()?;
    let identity = group.evaluate(&GroupWord::identity())?;
    let mut seen: HashSet<Element> = HashSet::from([identity.clone()]);
    let mut out = vec![(GroupWord::identity(), identity)];
    let mut frontier = 0..1;
    for _ in 0..cap {
        let start = out.len();
        for k in frontier.clone() {
            for (gw, ge) in &gens {
                let e = out[k].1.compose(ge)?;
                if seen.insert(e.clone()) {
                    let w = out[k].0.concat(gw);
                    out.push((w, e));
                }
            }
        }
        frontier = start..out.len();
    }
    Ok(out)
}

/// The subgroup words of length at most `cap` spelled over subgroup
/// generators, as words in the ambient generators (not deduplicated).
pub fn subgroup_words(generators: &[GroupWord], cap: u32) -> Vec<GroupWord> {
    let letters: Vec<GroupWord> = generators.iter().flat_map(|w| [w.clone(), w.inverse()]).collect();
    let mut out = vec![(GroupWord::identity(), None::<usize>)];
    let mut frontier = 0..1;
    for _ in 0..cap {
        let start = out.len();
        for k in frontier.clone() {
            for (li, l) in letters.iter().enumerate() {
                // skip immediate cancellation in the subgroup alphabet
                if out[k].1 == Some(li ^ 1) {
                    continue;
                }
                out.push((out[k].0.concat(l), Some(li)));
            }
        }
        frontier = start..out.len();
    }
    out.into_iter().map(|(w, _)| w).collect()
}

pub fn orbit_subset(spec: &DiskSetSpec, group: &ActingGroup, g: &TruncatedGraph) -> Result<OrbitSet> {
    let mut points = BTreeSet::new();
    for (_, e) in subgroup_ball(&spec.generators, spec.cap, group)? {
        points.insert(e.apply(&spec.seed)?);
    }
    let (inside, outside): (Vec<Vertex>, Vec<Vertex>) = points.into_iter().partition(|v| g.contains(v));
    Ok(OrbitSet { members: inside, dropped: outside.len() })
}

/// `max` over pairs `a, b ∈ D` of the distance from the canonical geodesic
/// `[a, b]` to `D`.
pub fn quasiconvexity_audit(d: &[Vertex], g: &TruncatedGraph) -> Result<u32> {
    if d.len() < 2 {
        return Err(Error::Config("quasi-convexity audit needs at least two vertices".into()));
    }
    let ids = ids_of(g, d)?;
    let to_set = g.bfs(&ids);
    let mut worst = 0;
    for &a in &ids {
        for &b in &ids {
            if a == b {
                continue;
            }
            let path = g
                .geodesic_ids(a, b)
                .ok_or_else(|| g.unreachable(g.vertex(a), g.vertex(b)))?;
            worst = path.iter().map(|&v| to_set[v as usize]).fold(worst, u32::max);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::truncated::{cone_off, farey_height, tree_ball};
    use crate::graph::vertex::Model;

    fn sv(x: &str) -> Vertex {
        Model::Farey.parse_vertex(x).unwrap()
    }

    fn farey_group() -> ActingGroup {
        ActingGroup::for_model(Model::Farey, None)
    }

    fn word(s: &str) -> GroupWord {
        farey_group().parse_word(s).unwrap()
    }

    #[test]
    fn projection_examples() {
        let g = farey_height(8);
        let a = [sv("1/0")];
        assert_eq!(coarse_projection(&a, &[sv("0/1"), sv("5/7")], &g).unwrap(), vec![sv("0/1")]);
        assert_eq!(coarse_projection(&a, &[sv("5/7")], &g).unwrap(), vec![sv("5/7")]);
        let both = [sv("1/2"), sv("2/3")];
        assert_eq!(coarse_projection(&both, &[sv("2/3"), sv("3/4")], &g).unwrap(), vec![sv("2/3")]);
        let tie = coarse_projection(&a, &[sv("1/2"), sv("-1/2")], &g).unwrap();
        assert_eq!(tie.len(), 2);
    }

    #[test]
    fn qg_constants_of_geodesic_and_backtrack() {
        let g = farey_height(6);
        let geo = g.geodesic(&sv("-1/1"), &sv("5/6")).unwrap();
        assert_eq!(quasi_geodesic_constants(&geo, &g).unwrap(), QuasiGeodesicConstants { lambda: 1, c: 0 });
        let back = GraphPath::new(vec![sv("0/1"), sv("1/0"), sv("0/1"), sv("1/1")]);
        let k = quasi_geodesic_constants(&back, &g).unwrap();
        assert_eq!(k.c, 2);
        let two = BigRational::from_integer(BigInt::from(2));
        assert!(additive_constant(&back, &g, &two).unwrap() < BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn orbit_examples() {
        let g = farey_height(4);
        let spec = DiskSetSpec { generators: vec![word("R")], seed: sv("0/1"), cap: 3 };
        let orbit = orbit_subset(&spec, &farey_group(), &g).unwrap();
        let names: Vec<String> = orbit.members.iter().map(|v| v.to_string()).collect();
        assert_eq!(names, ["-3/1", "-2/1", "-1/1", "0/1", "1/1", "2/1", "3/1"]);
        assert_eq!(orbit.dropped, 0);
        let small = farey_height(2);
        assert_eq!(orbit_subset(&spec, &farey_group(), &small).unwrap().dropped, 2);
        let zero = DiskSetSpec { cap: 0, ..spec.clone() };
        assert_eq!(orbit_subset(&zero, &farey_group(), &g).unwrap().members, vec![sv("0/1")]);
        let stab = DiskSetSpec { generators: vec![word("L")], seed: sv("0/1"), cap: 4 };
        assert_eq!(orbit_subset(&stab, &farey_group(), &g).unwrap().members, vec![sv("0/1")]);
    }

    #[test]
    fn subgroup_words_count() {
        let w = subgroup_words(&[word("R"), word("L")], 3);
        assert_eq!(w.len(), 1 + 4 + 12 + 36);
        let ball = subgroup_ball(&[word("R")], 5, &farey_group()).unwrap();
        assert_eq!(ball.len(), 11);
    }

    #[test]
    fn quasiconvexity_examples() {
        let g = farey_height(6);
        assert_eq!(quasiconvexity_audit(&[sv("0/1"), sv("1/0")], &g).unwrap(), 0);
        let mut d = vec![sv("1/0")];
        d.extend((-6..=6).map(|n| sv(&format!("{n}/1"))));
        assert_eq!(quasiconvexity_audit(&d, &g).unwrap(), 0);
        let orbit: Vec<Vertex> = (-6..=6).map(|n| sv(&format!("{n}/1"))).collect();
        assert!(quasiconvexity_audit(&orbit, &g).unwrap() <= 1);
        assert!(quasiconvexity_audit(&orbit[..1], &g).is_err());
    }

    #[test]
    fn project_to_apex() {
        let t = Model::tree(2).unwrap();
        let g = tree_ball(2, 3).unwrap();
        let a = t.parse_vertex("a").unwrap();
        let b = t.parse_vertex("b^-1").unwrap();
        let coned = cone_off(&g, &[vec![a.clone()], vec![b.clone()]]).unwrap();
        assert_eq!(project(&a, &coned).unwrap(), Vertex::Apex(0));
        assert_eq!(project(&b, &coned).unwrap(), Vertex::Apex(1));
        assert_eq!(project(&t.origin(), &coned).unwrap(), Vertex::Apex(0));
        let far = t.parse_vertex("b^-3").unwrap();
        assert_eq!(project(&far, &coned).unwrap(), Vertex::Apex(1));
        // apexes of two singletons are 2 + d(a, b) apart
        assert_eq!(coned.distance(&Vertex::Apex(0), &Vertex::Apex(1)).unwrap(), 4);
    }
}
