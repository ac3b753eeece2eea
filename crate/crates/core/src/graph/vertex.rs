use std::fmt;

use serde::{Serialize, Serializer};

use super::slope::{farey_adjacent, Slope};
use crate::error::{Error, Result};
use crate::moebius::{evaluate_word, Alphabet, GeneratorSet, GroupWord, IntMatrix2};

/// Largest free rank whose generators have single-letter names.
pub const MAX_TREE_RANK: u16 = 26;

/// The two underlying models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Farey,
    Tree { rank: u16 },
}

impl Model {
    pub fn tree(rank: u16) -> Result<Model> {
        if rank == 0 || rank > MAX_TREE_RANK {
            return Err(Error::Config(format!("tree rank must be in 1..={MAX_TREE_RANK}")));
        }
        Ok(Model::Tree { rank })
    }

    pub fn parse_vertex(&self, s: &str) -> Result<Vertex> {
        match self {
            Model::Farey => Ok(Vertex::Slope(s.parse()?)),
            Model::Tree { rank } => {
                let w = Alphabet::free(*rank as usize).parse_word(s)?;
                Ok(Vertex::Word(w))
            }
        }
    }

    /// Adjacency in the full (untruncated) model graph.
    pub fn adjacent(&self, a: &Vertex, b: &Vertex) -> bool {
        match (self, a, b) {
            (Model::Farey, Vertex::Slope(x), Vertex::Slope(y)) => farey_adjacent(x, y),
            (Model::Tree { rank }, Vertex::Word(x), Vertex::Word(y)) => {
                let step = x.inverse().concat(y);
                step.len() == 1 && step.letters()[0].gen.0 < *rank
            }
            _ => false,
        }
    }

    /// The base vertex: `0/1` or the empty word.
    pub fn origin(&self) -> Vertex {
        match self {
            Model::Farey => Vertex::Slope(Slope::int(0)),
            Model::Tree { .. } => Vertex::Word(GroupWord::identity()),
        }
    }
}

/// A vertex of one of the model graphs, or a cone-off apex.
///
/// The derived order compares slopes by `(q, p)` and words in shortlex
/// order; it is the tie-break used by canonical geodesics.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Slope(Slope),
    Word(GroupWord),
    Apex(u32),
}

impl Vertex {
    pub fn slope(&self) -> Option<&Slope> {
        match self {
            Vertex::Slope(s) => Some(s),
            _ => None,
        }
    }

    pub fn word(&self) -> Option<&GroupWord> {
        match self {
            Vertex::Word(w) => Some(w),
            _ => None,
        }
    }
}

impl From<Slope> for Vertex {
    fn from(s: Slope) -> Self {
        Vertex::Slope(s)
    }
}

impl From<GroupWord> for Vertex {
    fn from(w: GroupWord) -> Self {
        Vertex::Word(w)
    }
}

fn free_alphabet_for(w: &GroupWord) -> Alphabet {
    let top = w.letters().iter().map(|l| l.gen.0 as usize + 1).max().unwrap_or(0);
    Alphabet::free(top)
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Slope(s) => write!(f, "{s}"),
            Vertex::Word(w) => write!(f, "{}", w.display(&free_alphabet_for(w))),
            Vertex::Apex(i) => write!(f, "@{i}"),
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A group element acting on model vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Mobius(IntMatrix2),
    Free(GroupWord),
}

impl Element {
    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        match (self, v) {
            (Element::Mobius(m), Vertex::Slope(s)) => Ok(Vertex::Slope(s.apply(m))),
            (Element::Free(g), Vertex::Word(w)) => Ok(Vertex::Word(g.concat(w))),
            _ => Err(Error::Domain(format!("element cannot act on vertex {v}"))),
        }
    }

    pub fn compose(&self, rhs: &Element) -> Result<Element> {
        match (self, rhs) {
            (Element::Mobius(a), Element::Mobius(b)) => Ok(Element::Mobius(a.mul(b))),
            (Element::Free(a), Element::Free(b)) => Ok(Element::Free(a.concat(b))),
            _ => Err(Error::Domain("elements from different models".into())),
        }
    }

    pub fn inverse(&self) -> Element {
        match self {
            Element::Mobius(m) => Element::Mobius(m.inverse()),
            Element::Free(w) => Element::Free(w.inverse()),
        }
    }

    pub fn pow(&self, e: i64) -> Element {
        match self {
            Element::Mobius(m) => Element::Mobius(m.pow(e)),
            Element::Free(w) => Element::Free(w.pow(e)),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Element::Mobius(m) => m.is_identity(),
            Element::Free(w) => w.is_identity(),
        }
    }
}

/// The group acting on a model: matrices on the Farey graph, or the free
/// group on its own Cayley tree.
#[derive(Clone, Debug)]
pub enum ActingGroup {
    Mobius(GeneratorSet),
    Free { rank: u16 },
}

impl ActingGroup {
    pub fn for_model(model: Model, gens: Option<GeneratorSet>) -> ActingGroup {
        match model {
            Model::Farey => ActingGroup::Mobius(gens.unwrap_or_else(GeneratorSet::standard)),
            Model::Tree { rank } => ActingGroup::Free { rank },
        }
    }

    pub fn model(&self) -> Model {
        match self {
            ActingGroup::Mobius(_) => Model::Farey,
            ActingGroup::Free { rank } => Model::Tree { rank: *rank },
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            ActingGroup::Mobius(g) => g.alphabet().clone(),
            ActingGroup::Free { rank } => Alphabet::free(*rank as usize),
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        self.alphabet().parse_word(s)
    }

    pub fn evaluate(&self, w: &GroupWord) -> Result<Element> {
        match self {
            ActingGroup::Mobius(g) => Ok(Element::Mobius(evaluate_word(w, g)?)),
            ActingGroup::Free { rank } => {
                if let Some(l) = w.letters().iter().find(|l| l.gen.0 >= *rank) {
                    return Err(Error::UnknownGenerator(format!("generator #{}", l.gen.0)));
                }
                Ok(Element::Free(w.clone()))
            }
        }
    }

    pub fn display_word(&self, w: &GroupWord) -> String {
        w.display(&self.alphabet()).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_round_trip() {
        let t = Model::tree(2).unwrap();
        for s in ["1", "a", "a b^-1 a", "b^-2"] {
            assert_eq!(t.parse_vertex(s).unwrap().to_string(), s);
        }
        assert_eq!(Model::Farey.parse_vertex("-2/4").unwrap().to_string(), "-1/2");
        assert!(t.parse_vertex("c").is_err());
        assert!(Model::tree(0).is_err());
    }

    #[test]
    fn free_action_is_left_multiplication() {
        let t = Model::tree(2).unwrap();
        let g = Element::Free(Alphabet::free(2).parse_word("a").unwrap());
        let v = t.parse_vertex("a^-1 b").unwrap();
        assert_eq!(g.apply(&v).unwrap(), t.parse_vertex("b").unwrap());
        assert!(g.apply(&Model::Farey.origin()).is_err());
    }

    #[test]
    fn mobius_evaluation() {
        let grp = ActingGroup::for_model(Model::Farey, None);
        let e = grp.evaluate(&grp.parse_word("R").unwrap()).unwrap();
        assert_eq!(e.apply(&Model::Farey.origin()).unwrap().to_string(), "1/1");
        let free = ActingGroup::Free { rank: 1 };
        let w = Alphabet::free(2).parse_word("b").unwrap();
        assert!(free.evaluate(&w).is_err());
    }
}
