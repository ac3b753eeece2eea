use serde::Serialize;

use crate::counting::OmegaSegment;
use crate::error::{Error, Result};
use crate::graph::{farey_corridor, tree_geodesic, Element, GraphPath, Model, TruncatedGraph, Vertex};

/// Exact distance in the full model graph.
pub fn model_distance(model: Model, x: &Vertex, y: &Vertex) -> Result<u32> {
    match (model, x, y) {
        (Model::Farey, Vertex::Slope(a), Vertex::Slope(b)) => farey_corridor(a, b, 0).distance(x, y),
        (Model::Tree { .. }, Vertex::Word(a), Vertex::Word(b)) => Ok(a.inverse().concat(b).len() as u32),
        _ => Err(Error::Domain(format!("{x} and {y} are not vertices of the {model:?} model"))),
    }
}

/// The canonical geodesic between two vertices of the full model graph.
pub fn model_geodesic(model: Model, x: &Vertex, y: &Vertex) -> Result<GraphPath> {
    match (model, x, y) {
        (Model::Farey, Vertex::Slope(a), Vertex::Slope(b)) => farey_corridor(a, b, 0).geodesic(x, y),
        (Model::Tree { .. }, Vertex::Word(a), Vertex::Word(b)) => {
            Ok(GraphPath::new(tree_geodesic(a, b).into_iter().map(Vertex::Word).collect()))
        }
        _ => Err(Error::Domain(format!("{x} and {y} are not vertices of the {model:?} model"))),
    }
}

/// The orbit path `g^lo·γ, ..., g^(hi-1)·γ` where `γ` is the canonical
/// geodesic from `v0` to `g·v0`.
pub fn axis_path(model: Model, g: &Element, v0: &Vertex, lo: i64, hi: i64) -> Result<GraphPath> {
    if lo >= hi {
        return Err(Error::Construction("empty orbit range".into()));
    }
    let gamma = model_geodesic(model, v0, &g.apply(v0)?)?;
    if gamma.is_empty() {
        return Err(Error::Construction("the element fixes the basepoint".into()));
    }
    let mut out: Vec<Vertex> = Vec::new();
    for j in lo..hi {
        let gj = g.pow(j);
        let piece = gamma.vertices().iter().map(|v| gj.apply(v)).collect::<Result<Vec<_>>>()?;
        let skip = usize::from(!out.is_empty());
        out.extend(piece.into_iter().skip(skip));
    }
    Ok(GraphPath::new(out))
}

/// An axis segment with the orbit range it covers.
#[derive(Clone, Debug, Serialize)]
pub struct AxisSegment {
    pub omega: OmegaSegment,
    pub lo: i64,
    pub hi: i64,
    /// The whole requested range `-k..k` was used.
    pub complete: bool,
}

/// The segment `g^-k·γ ... g^(k-1)·γ` of the quasi-axis through `v0`.
///
/// With `within`, the range is shrunk to the largest window around
/// `j = 0` whose pieces lie inside that graph.
pub fn axis_segment(
    model: Model,
    g: &Element,
    halfwidth: u32,
    v0: &Vertex,
    within: Option<&TruncatedGraph>,
) -> Result<AxisSegment> {
    if halfwidth == 0 {
        return Err(Error::Construction("halfwidth must be positive".into()));
    }
    let k = halfwidth as i64;
    let fits = |j: i64| -> Result<bool> {
        match within {
            None => Ok(true),
            Some(t) => Ok(axis_path(model, g, v0, j, j + 1)?.vertices().iter().all(|v| t.contains(v))),
        }
    };
    let mut lo = 0;
    while lo > -k && fits(lo - 1)? {
        lo -= 1;
    }
    let mut hi = 0;
    while hi < k && fits(hi)? {
        hi += 1;
    }
    if hi == lo {
        return Err(Error::Construction(format!("the orbit of {v0} leaves the truncation")));
    }
    let path = axis_path(model, g, v0, lo, hi)?;
    let omega = OmegaSegment::new(model, path).map_err(|e| Error::Construction(format!("axis segment: {e}")))?;
    Ok(AxisSegment { omega, lo, hi, complete: lo == -k && hi == k })
}

/// A vertex `v` in the middle half of the geodesic from `g^-2·d0` to
/// `g^2·d0` with `d(v, g²v) = 2·d(v, gv)`, and its displacement `d(v, gv)`.
pub fn axis_basepoint(model: Model, g: &Element, d0: &Vertex) -> Result<(Vertex, u32)> {
    let a = g.pow(-2).apply(d0)?;
    let b = g.pow(2).apply(d0)?;
    let geo = model_geodesic(model, &a, &b)?;
    let vs = geo.vertices();
    let (from, to) = (vs.len() / 4, (3 * vs.len()).div_ceil(4));
    for v in &vs[from..to] {
        let t1 = model_distance(model, v, &g.apply(v)?)?;
        let t2 = model_distance(model, v, &g.pow(2).apply(v)?)?;
        if t1 > 0 && t2 == 2 * t1 {
            return Ok((v.clone(), t1));
        }
    }
    Err(Error::Construction(format!("no axis point found between {a} and {b}")))
}
