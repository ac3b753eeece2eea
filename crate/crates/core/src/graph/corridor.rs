//! Corridor truncations: finite subgraphs built around a pair of vertices.
//!
//! In the Farey graph the corridor between `x` and `y` starts from the
//! triangles of the tessellation crossed by the hyperbolic geodesic from
//! `x` to `y` (the ladder) and is thickened `k` times by adding every
//! triangle that shares an edge with the current set. The union is a convex
//! ideal polygon, so it contains every Farey geodesic from `x` to `y` and its
//! edges are exactly the Farey edges among its vertices. The construction
//! commutes with the group action.
//!
//! In the tree the corridor is the `k`-neighbourhood of the unique geodesic.

use std::collections::{BTreeSet, HashSet};

use num_traits::One;

use super::slope::{farey_adjacent, Slope};
use super::truncated::{tree_neighbors, GraphKind, TruncatedGraph};
use super::vertex::{Model, Vertex};
use crate::error::{Error, Result};
use crate::moebius::GroupWord;

type Triangle = [Slope; 3];

fn triangle(a: Slope, b: Slope, c: Slope) -> Triangle {
    let mut t = [a, b, c];
    t.sort();
    t
}

/// The third vertex of the Farey triangle on edge `{u, v}` that is not `w`.
fn third(u: &Slope, v: &Slope, w: &Slope) -> Slope {
    let s = u.mediant(v);
    if &s == w {
        u.difference(v)
    } else {
        s
    }
}

/// Triangles crossed by the geodesic from `x` to `y`; empty when `x` and
/// `y` coincide or are adjacent.
pub fn ladder_triangles(x: &Slope, y: &Slope) -> Vec<Triangle> {
    if x == y || farey_adjacent(x, y) {
        return Vec::new();
    }
    let frame = x.frame();
    let to_inf = frame.inverse();
    let target = y.apply(&to_inf);
    let (p, q) = (target.p().clone(), target.q().clone());
    // target is finite and not an integer, since y is not adjacent to x.
    let n = num_integer::Integer::div_floor(&p, &q);
    let mut a = Slope::normalized(n.clone(), One::one());
    let mut b = Slope::normalized(n + 1, One::one());
    let mut tris = vec![triangle(Slope::infinity(), a.clone(), b.clone())];
    loop {
        let m = a.mediant(&b);
        tris.push(triangle(a.clone(), b.clone(), m.clone()));
        if m == target {
            break;
        }
        // compare target with m; both denominators are positive
        if &p * m.q() < m.p() * &q {
            b = m;
        } else {
            a = m;
        }
    }
    tris.into_iter()
        .map(|[u, v, w]| triangle(u.apply(&frame), v.apply(&frame), w.apply(&frame)))
        .collect()
}

/// Farey corridor of width `k` between two slopes.
pub fn farey_corridor(x: &Slope, y: &Slope, k: u64) -> TruncatedGraph {
    let kind = GraphKind::FareyCorridor;
    let mut verts = BTreeSet::new();
    verts.insert(Vertex::Slope(x.clone()));
    if x == y {
        return TruncatedGraph::from_edges(kind, k, verts, Vec::new());
    }
    let mut tris: Vec<Triangle> = ladder_triangles(x, y);
    let mut rounds = k;
    if tris.is_empty() {
        verts.insert(Vertex::Slope(y.clone()));
        if k == 0 {
            let edge = (Vertex::Slope(x.clone()), Vertex::Slope(y.clone()));
            return TruncatedGraph::from_edges(kind, k, verts, vec![edge]);
        }
        tris = vec![
            triangle(x.clone(), y.clone(), x.mediant(y)),
            triangle(x.clone(), y.clone(), x.difference(y)),
        ];
        rounds -= 1;
    }
    let mut seen: HashSet<Triangle> = tris.iter().cloned().collect();
    let mut front = tris.clone();
    for _ in 0..rounds {
        let mut next = Vec::new();
        for t in &front {
            for (i, j, l) in [(0, 1, 2), (1, 2, 0), (0, 2, 1)] {
                let nt = triangle(t[i].clone(), t[j].clone(), third(&t[i], &t[j], &t[l]));
                if seen.insert(nt.clone()) {
                    next.push(nt);
                }
            }
        }
        tris.extend(next.iter().cloned());
        front = next;
    }
    let mut edges = Vec::with_capacity(tris.len() * 3);
    for t in &tris {
        for s in t {
            verts.insert(Vertex::Slope(s.clone()));
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            edges.push((Vertex::Slope(t[i].clone()), Vertex::Slope(t[j].clone())));
        }
    }
    TruncatedGraph::from_edges(kind, k, verts, edges)
}

/// Vertices of the tree geodesic from `x` to `y`.
pub fn tree_geodesic(x: &GroupWord, y: &GroupWord) -> Vec<GroupWord> {
    let xs = x.unit_letters();
    let ys = y.unit_letters();
    let common = xs.iter().zip(&ys).take_while(|(a, b)| a == b).count();
    let mut path = Vec::with_capacity(xs.len() + ys.len() - 2 * common + 1);
    for i in (common..=xs.len()).rev() {
        path.push(GroupWord::from_letters(&xs[..i]));
    }
    for i in common + 1..=ys.len() {
        path.push(GroupWord::from_letters(&ys[..i]));
    }
    path
}

/// Tree corridor: the `k`-neighbourhood of the geodesic from `x` to `y`.
pub fn tree_corridor(x: &GroupWord, y: &GroupWord, rank: u16, k: u64) -> Result<TruncatedGraph> {
    Model::tree(rank)?;
    if x.letters().iter().chain(y.letters()).any(|l| l.gen.0 >= rank) {
        return Err(Error::Domain(format!("word outside the free group of rank {rank}")));
    }
    let mut seen: HashSet<GroupWord> = HashSet::new();
    let mut front = tree_geodesic(x, y);
    seen.extend(front.iter().cloned());
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &front {
            for nb in tree_neighbors(w, rank) {
                if seen.insert(nb.clone()) {
                    next.push(nb);
                }
            }
        }
        front = next;
    }
    let mut edges = Vec::new();
    for w in &seen {
        for nb in tree_neighbors(w, rank) {
            if nb.len() > w.len() && seen.contains(&nb) {
                edges.push((Vertex::Word(w.clone()), Vertex::Word(nb)));
            }
        }
    }
    let verts = seen.into_iter().map(Vertex::Word).collect();
    Ok(TruncatedGraph::from_edges(GraphKind::TreeCorridor { rank }, k, verts, edges))
}
