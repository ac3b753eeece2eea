use rayon::prelude::*;

use super::omega::OmegaSegment;
use crate::error::{Error, Result};
use crate::graph::{farey_adjacent, Element, GraphPath, Slope, TruncatedGraph, Vertex};
use crate::moebius::{GroupWord, IntMatrix2};

/// One copy `g·ω` inside a truncated graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translate {
    /// Vertex ids of `g·ω_0, g·ω_1, ...`.
    pub ids: Vec<u32>,
    pub element: Element,
}

impl Translate {
    pub fn start(&self) -> u32 {
        self.ids[0]
    }

    pub fn end(&self) -> u32 {
        self.ids[self.ids.len() - 1]
    }
}

/// All copies of `ω` found in a graph.
#[derive(Clone, Debug, Default)]
pub struct TranslateSet {
    pub copies: Vec<Translate>,
    /// Candidate placements tried (ordered edges or vertices).
    pub candidates: usize,
    /// Candidates whose image left the truncation.
    pub dropped: usize,
}

/// `ω` moved so that its first edge (Farey) or first vertex (tree) is the
/// standard one. The copy anchored at a given edge or vertex is the image
/// of this normal form.
#[derive(Clone, Debug)]
pub(crate) enum NormalForm {
    Farey { tail: Vec<Slope>, to_normal: IntMatrix2 },
    Tree { tail: Vec<GroupWord>, to_normal: GroupWord },
}

impl NormalForm {
    pub(crate) fn of(omega: &OmegaSegment) -> Result<Self> {
        let vs = omega.vertices();
        let mixed = || Error::InvalidPath("mixed vertex kinds".into());
        match (&vs[0], &vs[1]) {
            (Vertex::Slope(a), Vertex::Slope(b)) => {
                let to_normal = a.edge_matrix(b).inverse();
                let tail = vs[2..]
                    .iter()
                    .map(|v| v.slope().map(|s| s.apply(&to_normal)))
                    .collect::<Option<Vec<Slope>>>()
                    .ok_or_else(mixed)?;
                Ok(NormalForm::Farey { tail, to_normal })
            }
            (Vertex::Word(a), Vertex::Word(_)) => {
                let to_normal = a.inverse();
                let tail = vs[1..]
                    .iter()
                    .map(|v| v.word().map(|w| to_normal.concat(w)))
                    .collect::<Option<Vec<GroupWord>>>()
                    .ok_or_else(mixed)?;
                Ok(NormalForm::Tree { tail, to_normal })
            }
            _ => Err(Error::InvalidPath("segment vertices must be slopes or words".into())),
        }
    }

    fn trace(g: &TruncatedGraph, ids: &mut Vec<u32>, images: impl Iterator<Item = Vertex>) -> bool {
        for z in images {
            match g.id(&z) {
                Some(id) if g.has_edge(*ids.last().expect("nonempty"), id) => ids.push(id),
                _ => return false,
            }
        }
        true
    }

    /// Copies anchored at the ordered edges leaving `a` (Farey) or at `a`
    /// itself (tree). Returns `(candidates, dropped)`.
    fn copies_at(&self, g: &TruncatedGraph, a: u32, out: &mut Vec<Translate>) -> (usize, usize) {
        let mut tried = 0;
        let mut dropped = 0;
        match self {
            NormalForm::Farey { tail, to_normal } => {
                let Some(u) = g.vertex(a).slope() else { return (0, 0) };
                for &b in g.neighbor_ids(a) {
                    let Some(v) = g.vertex(b).slope() else { continue };
                    tried += 1;
                    let frame = u.edge_matrix(v);
                    let mut ids = vec![a, b];
                    if Self::trace(g, &mut ids, tail.iter().map(|t| Vertex::Slope(t.apply(&frame)))) {
                        out.push(Translate { ids, element: Element::Mobius(frame.mul(to_normal)) });
                    } else {
                        dropped += 1;
                    }
                }
            }
            NormalForm::Tree { tail, to_normal } => {
                let Some(u) = g.vertex(a).word() else { return (0, 0) };
                tried += 1;
                let mut ids = vec![a];
                if Self::trace(g, &mut ids, tail.iter().map(|t| Vertex::Word(u.concat(t)))) {
                    out.push(Translate { ids, element: Element::Free(u.concat(to_normal)) });
                } else {
                    dropped += 1;
                }
            }
        }
        (tried, dropped)
    }

    /// Whether `alpha[s..=s + |ω|]` is a copy of `ω`.
    fn matches_at(&self, alpha: &[Vertex], s: usize) -> bool {
        match self {
            NormalForm::Farey { tail, .. } => {
                let (Some(u), Some(v)) = (alpha[s].slope(), alpha[s + 1].slope()) else {
                    return false;
                };
                if !farey_adjacent(u, v) {
                    return false;
                }
                let frame = u.edge_matrix(v);
                tail.iter()
                    .enumerate()
                    .all(|(k, t)| alpha[s + 2 + k].slope() == Some(&t.apply(&frame)))
            }
            NormalForm::Tree { tail, .. } => {
                let Some(u) = alpha[s].word() else { return false };
                tail.iter()
                    .enumerate()
                    .all(|(k, t)| alpha[s + 1 + k].word() == Some(&u.concat(t)))
            }
        }
    }
}

/// Every translate `g·ω` lying entirely inside `g`, in vertex-id order.
///
/// A Farey copy is fixed by the image of its first ordered edge, a tree
/// copy by the image of its first vertex.
pub fn enumerate_translates(omega: &OmegaSegment, g: &TruncatedGraph) -> Result<TranslateSet> {
    if omega.model() != g.model() {
        return Err(Error::Domain("segment and graph use different models".into()));
    }
    let normal = NormalForm::of(omega)?;
    let per_vertex: Vec<(Vec<Translate>, usize, usize)> = (0..g.len() as u32)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            let (t, d) = normal.copies_at(g, a, &mut out);
            (out, t, d)
        })
        .collect();
    let mut set = TranslateSet::default();
    for (copies, tried, dropped) in per_vertex {
        set.copies.extend(copies);
        set.candidates += tried;
        set.dropped += dropped;
    }
    Ok(set)
}

/// Start positions `s` with `alpha[s..=s+|ω|]` a copy of `ω`.
pub fn copy_positions(alpha: &GraphPath, omega: &OmegaSegment) -> Result<Vec<usize>> {
    let normal = NormalForm::of(omega)?;
    let a = alpha.vertices();
    let l = omega.len();
    if a.len() <= l {
        return Ok(Vec::new());
    }
    Ok((0..a.len() - l).filter(|&s| normal.matches_at(a, s)).collect())
}

/// `|α|_ω`: the largest number of edge-disjoint copies of `ω` in `α`.
/// Copies have equal length, so greedy selection is optimal.
pub fn max_nonoverlapping_copies(alpha: &GraphPath, omega: &OmegaSegment) -> Result<usize> {
    let l = omega.len();
    let mut count = 0;
    let mut free_from = 0;
    for s in copy_positions(alpha, omega)? {
        if s >= free_from {
            count += 1;
            free_from = s + l;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::{farey_height, tree_ball, Model};

    fn farey_omega(s: &str) -> OmegaSegment {
        OmegaSegment::parse(Model::Farey, s).unwrap()
    }

    fn path(model: Model, s: &str) -> GraphPath {
        GraphPath::new(s.split(';').map(|x| model.parse_vertex(x.trim()).unwrap()).collect())
    }

    #[test]
    fn farey_copies_are_images_of_omega() {
        let g = farey_height(6);
        let om = farey_omega("0/1; 1/0; 1/1; 1/2");
        let set = enumerate_translates(&om, &g).unwrap();
        assert!(!set.copies.is_empty());
        let mut found_self = false;
        for c in &set.copies {
            let p = g.path_from_ids(&c.ids);
            p.validate(&g, false).unwrap();
            for (v, w) in om.vertices().iter().zip(p.vertices()) {
                assert_eq!(&c.element.apply(v).unwrap(), w);
            }
            found_self |= c.element.is_identity();
        }
        assert!(found_self);
        assert_eq!(set.candidates, 2 * g.edge_count());
        assert_eq!(set.candidates, set.copies.len() + set.dropped);
    }

    #[test]
    fn farey_copies_match_brute_force_matrices() {
        let g = farey_height(4);
        let om = farey_omega("0/1; 1/0; 1/1");
        let set = enumerate_translates(&om, &g).unwrap();
        let mut expected = BTreeSet::new();
        for a in -8i64..=8 {
            for b in -8i64..=8 {
                for c in -8i64..=8 {
                    for d in -8i64..=8 {
                        let Ok(m) = IntMatrix2::new(a, b, c, d) else { continue };
                        let e = Element::Mobius(m);
                        let ids: Option<Vec<u32>> =
                            om.vertices().iter().map(|v| g.id(&e.apply(v).unwrap())).collect();
                        if let Some(ids) = ids {
                            expected.insert(ids);
                        }
                    }
                }
            }
        }
        let got: BTreeSet<Vec<u32>> = set.copies.iter().map(|c| c.ids.clone()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn tree_copies_follow_the_label() {
        let t = Model::tree(2).unwrap();
        let g = tree_ball(2, 3).unwrap();
        let om = OmegaSegment::parse(t, "1; a; a b").unwrap();
        let set = enumerate_translates(&om, &g).unwrap();
        let a = t.parse_vertex("a").unwrap();
        let ab = t.parse_vertex("a b").unwrap();
        let expected = g
            .vertices()
            .iter()
            .filter(|v| {
                let w = v.word().unwrap();
                w.concat(ab.word().unwrap()).len() <= 3 && w.concat(a.word().unwrap()).len() <= 3
            })
            .count();
        assert_eq!(set.copies.len(), expected);
        for c in &set.copies {
            assert_eq!(g.vertex(c.start()), &c.element.apply(&t.origin()).unwrap());
        }
    }

    #[test]
    fn nonoverlapping_examples() {
        let t = Model::tree(2).unwrap();
        let om = OmegaSegment::parse(t, "1; a; a b").unwrap();
        assert_eq!(max_nonoverlapping_copies(om.path(), &om).unwrap(), 1);
        assert_eq!(max_nonoverlapping_copies(&path(t, "1; a; a b; a b a; a b a b"), &om).unwrap(), 2);
        assert_eq!(max_nonoverlapping_copies(&path(t, "1; b; b^2; b^3"), &om).unwrap(), 0);
        let om3 = OmegaSegment::parse(t, "1; a; a b; a b a").unwrap();
        let overlapping = path(t, "1; a; a b; a b a; a b a b; a b a b a");
        assert_eq!(copy_positions(&overlapping, &om3).unwrap(), vec![0, 2]);
        assert_eq!(max_nonoverlapping_copies(&overlapping, &om3).unwrap(), 1);

        let far = farey_omega("0/1; 1/0; 1/1");
        let f = Model::Farey;
        assert_eq!(max_nonoverlapping_copies(&path(f, "-1/1; 0/1; 1/0; 1/1; 2/1"), &far).unwrap(), 1);
        let twice = path(f, "0/1; 1/0; 1/1; 2/1; 3/2");
        assert_eq!(copy_positions(&twice, &far).unwrap(), vec![0, 2]);
        assert_eq!(max_nonoverlapping_copies(&twice, &far).unwrap(), 2);
    }
}
