use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix2;
use crate::error::{Error, Result};

/// Index of a generator inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenId(pub u16);

/// One syllable `g^e` of a word; `e` is never zero in a reduced word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: GenId,
    pub exp: i64,
}

impl Letter {
    pub fn new(gen: GenId, exp: i64) -> Self {
        Letter { gen, exp }
    }
}

/// A freely reduced word: adjacent syllables have distinct generators and
/// nonzero exponents. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn generator(gen: GenId, exp: i64) -> Self {
        reduce(&[Letter::new(gen, exp)])
    }

    /// Reduces an arbitrary letter list.
    pub fn from_letters(letters: &[Letter]) -> Self {
        reduce(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Word length: the sum of the absolute exponents.
    pub fn len(&self) -> u64 {
        self.letters.iter().map(|l| l.exp.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn syllables(&self) -> usize {
        self.letters.len()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter::new(l.gen, -l.exp))
                .collect(),
        }
    }

    pub fn concat(&self, rhs: &GroupWord) -> GroupWord {
        let mut v = self.letters.clone();
        v.extend_from_slice(&rhs.letters);
        reduce(&v)
    }

    pub fn pow(&self, e: i64) -> GroupWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.letters.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            v.extend_from_slice(&base.letters);
        }
        reduce(&v)
    }

    /// Unit-exponent letters, e.g. `a^2 b^-1` becomes `[a, a, b^-1]`.
    pub fn unit_letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for l in &self.letters {
            let s = l.exp.signum();
            for _ in 0..l.exp.unsigned_abs() {
                out.push(Letter::new(l.gen, s));
            }
        }
        out
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex on unit letters, with inverses ordered after generators.
impl Ord for GroupWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |l: &Letter| (l.gen, l.exp < 0);
        self.len().cmp(&other.len()).then_with(|| {
            let a = self.unit_letters();
            let b = other.unit_letters();
            a.iter().map(key).cmp(b.iter().map(key))
        })
    }
}

/// Free reduction of a letter list.
pub fn reduce(letters: &[Letter]) -> GroupWord {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if l.exp == 0 {
            continue;
        }
        match out.last_mut() {
            Some(top) if top.gen == l.gen => {
                top.exp += l.exp;
                if top.exp == 0 {
                    out.pop();
                }
            }
            _ => out.push(l),
        }
    }
    GroupWord { letters: out }
}

/// Cyclic reduction: a reduced word conjugate to `w` whose first and last
/// syllables use different generators.
pub fn cyclic_reduce(w: &GroupWord) -> GroupWord {
    let mut v = reduce(&w.letters).letters;
    while v.len() >= 2 && v[0].gen == v[v.len() - 1].gen {
        let last = v.pop().expect("len >= 2");
        v[0].exp += last.exp;
        if v[0].exp == 0 {
            v.remove(0);
        }
    }
    GroupWord { letters: v }
}

pub struct WordDisplay<'a> {
    word: &'a GroupWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("1");
        }
        for (i, l) in self.word.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(l.gen))?;
            if l.exp != 1 {
                write!(f, "^{}", l.exp)?;
            }
        }
        Ok(())
    }
}

/// Generator names, in id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Config(format!("bad generator name `{n}`")));
            }
            if n.chars().all(|c| c.is_ascii_digit()) {
                return Err(Error::Config(format!("generator name `{n}` is numeric")));
            }
            if names[..i].contains(n) {
                return Err(Error::Config(format!("duplicate generator `{n}`")));
            }
        }
        Ok(Alphabet { names })
    }

    /// `a, b, c, ...` for a free group of the given rank.
    pub fn free(rank: usize) -> Self {
        Alphabet {
            names: (0..rank)
                .map(|i| {
                    if i < 26 {
                        ((b'a' + i as u8) as char).to_string()
                    } else {
                        format!("g{i}")
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn id(&self, name: &str) -> Result<GenId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| GenId(i as u16))
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.names.len() as u16).map(GenId)
    }

    /// Parses words such as `R^3 L^-2 R`; `1` or an empty string is the identity.
    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(GroupWord::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*') {
            if tok.is_empty() {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            letters.push(Letter::new(self.id(name)?, exp));
        }
        Ok(reduce(&letters))
    }
}

/// Concrete matrices for each generator of an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    alphabet: Alphabet,
    matrices: Vec<IntMatrix2>,
}

impl GeneratorSet {
    pub fn new(entries: Vec<(String, IntMatrix2)>) -> Result<Self> {
        let (names, matrices): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        Ok(GeneratorSet {
            alphabet: Alphabet::new(names)?,
            matrices,
        })
    }

    /// The two standard twist matrices `R = [[1,1],[0,1]]` and `L = [[1,0],[1,1]]`.
    pub fn standard() -> Self {
        GeneratorSet::new(vec![
            ("R".into(), IntMatrix2::new(1, 1, 0, 1).expect("det 1")),
            ("L".into(), IntMatrix2::new(1, 0, 1, 1).expect("det 1")),
        ])
        .expect("valid names")
    }

    /// Parses `name = a b c d` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, rest) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `name = a b c d`", lineno + 1)))?;
            let nums: Vec<i64> = rest
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if nums.len() != 4 {
                return Err(Error::Parse(format!(
                    "line {}: expected four integers, found {}",
                    lineno + 1,
                    nums.len()
                )));
            }
            let m = IntMatrix2::new(nums[0], nums[1], nums[2], nums[3])
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            entries.push((name.trim().to_string(), m));
        }
        if entries.is_empty() {
            return Err(Error::Config("generator file defines no generators".into()));
        }
        GeneratorSet::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        GeneratorSet::parse(&std::fs::read_to_string(path)?)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn matrix(&self, id: GenId) -> Option<&IntMatrix2> {
        self.matrices.get(id.0 as usize)
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        self.alphabet.parse_word(s)
    }
}

/// Product of the generator matrices, in canonical form.
pub fn evaluate_word(w: &GroupWord, gens: &GeneratorSet) -> Result<IntMatrix2> {
    let mut acc = IntMatrix2::identity();
    for l in w.letters() {
        let m = gens
            .matrix(l.gen)
            .ok_or_else(|| Error::UnknownGenerator(format!("#{}", l.gen.0)))?;
        acc = acc.mul(&m.pow(l.exp));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> GeneratorSet {
        GeneratorSet::standard()
    }

    fn w(s: &str) -> GroupWord {
        gens().parse_word(s).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let g = gens();
        assert_eq!(evaluate_word(&w(""), &g).unwrap(), IntMatrix2::identity());
        assert_eq!(evaluate_word(&w("R"), &g).unwrap(), IntMatrix2::new(1, 1, 0, 1).unwrap());
        assert_eq!(evaluate_word(&w("R L"), &g).unwrap(), IntMatrix2::new(2, 1, 1, 1).unwrap());
    }

    #[test]
    fn unknown_generator_is_config_error() {
        let g = gens();
        assert!(matches!(g.parse_word("Q^2"), Err(Error::UnknownGenerator(_))));
        let foreign = GroupWord::generator(GenId(7), 1);
        assert!(matches!(evaluate_word(&foreign, &g), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn reduce_examples() {
        let r = GenId(0);
        let l = GenId(1);
        assert!(reduce(&[Letter::new(r, 1), Letter::new(r, -1)]).is_identity());
        let rl = reduce(&[Letter::new(r, 2), Letter::new(l, 1)]);
        assert_eq!(rl.letters(), &[Letter::new(r, 2), Letter::new(l, 1)]);
        assert_eq!(cyclic_reduce(&w("L^-1 R^3 L")), w("R^3"));
        assert_eq!(cyclic_reduce(&w("R L R")), w("R^2 L"));
        assert!(cyclic_reduce(&w("R L L^-1 R^-1")).is_identity());
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let g = gens();
        let word = w("R^3 L^-2 R");
        assert_eq!(word.display(g.alphabet()).to_string(), "R^3 L^-2 R");
        assert_eq!(w("R R R^-1"), w("R"));
        assert_eq!(w("1").display(g.alphabet()).to_string(), "1");
    }

    #[test]
    fn generator_file_parsing() {
        let g = GeneratorSet::parse("# twists\nR = 1 1 0 1\nL = 1 0 1 1\n").unwrap();
        assert_eq!(g, GeneratorSet::standard());
        assert!(GeneratorSet::parse("R = 1 1 0").is_err());
        assert!(GeneratorSet::parse("R = 2 0 0 1").is_err());
    }

    #[test]
    fn free_alphabet_names() {
        let a = Alphabet::free(3);
        assert_eq!(a.name(GenId(2)), "c");
        assert_eq!(a.parse_word("a b^-1").unwrap().len(), 2);
    }
}
