use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphPath, Model, Schedule, Universe, Vertex};

/// An oriented path `ω` of at least two edges in a model graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OmegaSegment {
    model: Model,
    path: GraphPath,
}

impl OmegaSegment {
    /// Checks that consecutive vertices are adjacent in the model and that
    /// the path never immediately backtracks.
    pub fn new(model: Model, path: GraphPath) -> Result<Self> {
        if path.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "a segment needs at least two edges, got {}",
                path.len()
            )));
        }
        for w in path.vertices().windows(2) {
            if !model.adjacent(&w[0], &w[1]) {
                return Err(Error::InvalidPath(format!("{} and {} are not adjacent", w[0], w[1])));
            }
        }
        if path.has_backtracking() {
            return Err(Error::InvalidPath("segment backtracks".into()));
        }
        Ok(OmegaSegment { model, path })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn path(&self) -> &GraphPath {
        &self.path
    }

    pub fn vertices(&self) -> &[Vertex] {
        self.path.vertices()
    }

    /// `|ω|` in edges.
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `ω⁻¹`.
    pub fn reversed(&self) -> OmegaSegment {
        OmegaSegment { model: self.model, path: self.path.reversed() }
    }

    /// `v0; v1; ...`, the syntax accepted by [`OmegaSegment::parse`].
    pub fn to_list(&self) -> String {
        let parts: Vec<String> = self.vertices().iter().map(Vertex::to_string).collect();
        parts.join("; ")
    }

    pub fn parse(model: Model, s: &str) -> Result<Self> {
        let verts = s
            .split(';')
            .map(|t| model.parse_vertex(t.trim()))
            .collect::<Result<Vec<Vertex>>>()?;
        OmegaSegment::new(model, GraphPath::new(verts))
    }
}

impl fmt::Display for OmegaSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_list())
    }
}

/// The data defining one counting function: `(ω, W)`, the basepoint and
/// the truncation protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PenaltySpec {
    pub universe: Universe,
    pub schedule: Schedule,
    pub omega: OmegaSegment,
    pub w: u32,
    pub basepoint: Vertex,
}

impl PenaltySpec {
    /// Enforces `0 < W < |ω|` and that all data live in the same model.
    pub fn new(
        universe: Universe,
        schedule: Schedule,
        omega: OmegaSegment,
        w: u32,
        basepoint: Vertex,
    ) -> Result<Self> {
        if w == 0 || w as usize >= omega.len() {
            return Err(Error::Config(format!(
                "penalty W = {w} must satisfy 0 < W < |omega| = {}",
                omega.len()
            )));
        }
        if omega.model() != universe.model {
            return Err(Error::Config("omega and universe use different models".into()));
        }
        let basepoint = universe.model.parse_vertex(&basepoint.to_string())?;
        Ok(PenaltySpec { universe, schedule, omega, w, basepoint })
    }

    /// The same counting data for `ω⁻¹`.
    pub fn reversed(&self) -> PenaltySpec {
        PenaltySpec { omega: self.omega.reversed(), ..self.clone() }
    }

    /// Parses `key = value` lines: `model`, `schedule`, `omega`, `w`
    /// (default 1) and `basepoint` (default: the model origin).
    pub fn parse(text: &str) -> Result<Self> {
        let kv = parse_key_values(text)?;
        let get = |k: &str| kv.get(k).map(String::as_str);
        let universe: Universe = get("model").ok_or_else(|| missing("model"))?.parse()?;
        let schedule: Schedule = get("schedule").ok_or_else(|| missing("schedule"))?.parse()?;
        let omega = OmegaSegment::parse(universe.model, get("omega").ok_or_else(|| missing("omega"))?)?;
        let w = match get("w") {
            Some(s) => s.parse().map_err(|_| Error::Parse(format!("bad W `{s}`")))?,
            None => 1,
        };
        let basepoint = match get("basepoint") {
            Some(s) => universe.model.parse_vertex(s)?,
            None => universe.model.origin(),
        };
        for k in kv.keys() {
            if !["model", "schedule", "omega", "w", "basepoint"].contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
        }
        PenaltySpec::new(universe, schedule, omega, w, basepoint)
    }

    pub fn to_text(&self) -> String {
        format!(
            "model = {}\nschedule = {}\nomega = {}\nw = {}\nbasepoint = {}\n",
            self.universe, self.schedule, self.omega, self.w, self.basepoint
        )
    }
}

fn missing(k: &str) -> Error {
    Error::Config(format!("missing key `{k}`"))
}

/// `key = value` lines with `#` comments; later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 1)))?;
        out.insert(k.trim().to_lowercase(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_validation() {
        assert!(OmegaSegment::parse(Model::Farey, "0/1; 1/0; 1/1").is_ok());
        assert!(OmegaSegment::parse(Model::Farey, "0/1; 1/0").is_err());
        assert!(OmegaSegment::parse(Model::Farey, "0/1; 1/0; 0/1").is_err());
        assert!(OmegaSegment::parse(Model::Farey, "0/1; 1/1; -1/1").is_err());
        let t = Model::tree(2).unwrap();
        let om = OmegaSegment::parse(t, "1; a; a b").unwrap();
        assert_eq!(om.len(), 2);
        assert_eq!(om.reversed().to_list(), "a b; a; 1");
        assert!(OmegaSegment::parse(t, "1; a; a^2 b").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let text = "model = farey-corridor\nschedule = 0,1\nomega = 0/1; 1/0; 1/1\nw = 1\nbasepoint = 0/1\n";
        let spec = PenaltySpec::parse(text).unwrap();
        assert_eq!(spec.to_text(), text);
        assert_eq!(PenaltySpec::parse(&spec.to_text()).unwrap(), spec);
    }

    #[test]
    fn penalty_must_be_below_length() {
        let text = "model = farey\nschedule = 4\nomega = 0/1; 1/0; 1/1\nw = 2\n";
        assert!(matches!(PenaltySpec::parse(text), Err(Error::Config(_))));
        let zero = "model = farey\nschedule = 4\nomega = 0/1; 1/0; 1/1\nw = 0\n";
        assert!(PenaltySpec::parse(zero).is_err());
        let extra = "model = farey\nschedule = 4\nomega = 0/1; 1/0; 1/1\ncolour = red\n";
        assert!(PenaltySpec::parse(extra).is_err());
    }
}
