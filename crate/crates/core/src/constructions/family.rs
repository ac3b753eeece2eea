use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::schottky::SchottkyPair;
use crate::error::{Error, Result};
use crate::moebius::{classify, cyclic_reduce, evaluate_word, GeneratorSet, GroupWord, MatrixClass};

/// Exponent quadruples `(n_i, m_i, k_i, l_i)` for `f_i = φ^n ψ^m φ^k ψ^-l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySchedule(Vec<[u64; 4]>);

impl FamilySchedule {
    /// Requires the exponents to increase strictly in the order
    /// `n_1, m_1, k_1, l_1, n_2, ...`.
    pub fn new(rows: Vec<[u64; 4]>) -> Result<Self> {
        let flat: Vec<u64> = rows.iter().flatten().copied().collect();
        if flat.first() == Some(&0) {
            return Err(Error::Config("family exponents must be positive".into()));
        }
        if flat.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("family exponents must increase strictly".into()));
        }
        Ok(FamilySchedule(rows))
    }

    pub fn rows(&self) -> &[[u64; 4]] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_exponent(&self) -> Option<u64> {
        self.0.first().map(|r| r[0])
    }
}

/// `n,m,k,l; n,m,k,l; ...`
impl FromStr for FamilySchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return FamilySchedule::new(Vec::new());
        }
        let rows = s
            .split(';')
            .map(|row| {
                let v: Vec<u64> = row
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{}`", t.trim()))))
                    .collect::<Result<_>>()?;
                <[u64; 4]>::try_from(v).map_err(|_| Error::Parse(format!("`{}` needs four exponents", row.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        FamilySchedule::new(rows)
    }
}

impl fmt::Display for FamilySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.0.iter().map(|r| format!("{},{},{},{}", r[0], r[1], r[2], r[3])).collect();
        f.write_str(&rows.join("; "))
    }
}

/// `f_i = φ^{n_i} ψ^{m_i} φ^{k_i} ψ^{-l_i}` for each row of the schedule.
pub fn build_family(pair: &SchottkyPair, sched: &FamilySchedule, gens: &GeneratorSet) -> Result<Vec<GroupWord>> {
    if let Some(min) = sched.min_exponent() {
        if min < pair.power as u64 {
            return Err(Error::Construction(format!(
                "schedule starts at {min}, below the certified power {}",
                pair.power
            )));
        }
    }
    let mut out = Vec::with_capacity(sched.len());
    for (i, &[n, m, k, l]) in sched.rows().iter().enumerate() {
        let f = pair
            .phi
            .pow(n as i64)
            .concat(&pair.psi.pow(m as i64))
            .concat(&pair.phi.pow(k as i64))
            .concat(&pair.psi.pow(-(l as i64)));
        let class = classify(&evaluate_word(&f, gens)?);
        if class != MatrixClass::Hyperbolic {
            return Err(Error::Construction(format!("family member {} is {class}; schedule too small", i + 1)));
        }
        out.push(f);
    }
    Ok(out)
}

/// Cyclically reduced length of each word.
pub fn cyclic_lengths(family: &[GroupWord]) -> Vec<u64> {
    family.iter().map(|f| cyclic_reduce(f).len()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (SchottkyPair, GeneratorSet) {
        let gens = GeneratorSet::standard();
        let w = |s: &str| gens.parse_word(s).unwrap();
        (SchottkyPair::certify(&w("R L"), &w("L R"), &gens, 64).unwrap(), gens)
    }

    #[test]
    fn schedule_parsing_and_order() {
        let s: FamilySchedule = "2,3,4,5; 6,7,8,9".parse().unwrap();
        assert_eq!(s.rows(), &[[2, 3, 4, 5], [6, 7, 8, 9]]);
        assert_eq!(s.to_string(), "2,3,4,5; 6,7,8,9");
        assert!("2,3,4,5; 5,7,8,9".parse::<FamilySchedule>().is_err());
        assert!("2,3,4".parse::<FamilySchedule>().is_err());
        assert!("".parse::<FamilySchedule>().unwrap().is_empty());
    }

    #[test]
    fn flagship_family_is_hyperbolic() {
        let (p, gens) = pair();
        let low: FamilySchedule = "2,3,4,5".parse().unwrap();
        assert!(matches!(build_family(&p, &low, &gens), Err(Error::Construction(_))));
        let s: FamilySchedule = "4,5,6,7; 8,9,10,11; 12,13,14,15".parse().unwrap();
        let fam = build_family(&p, &s, &gens).unwrap();
        assert_eq!(fam.len(), 3);
        // trace of the product, computed from the matrices independently
        let m = |w: &GroupWord| evaluate_word(w, &gens).unwrap();
        let [phi, psi] = [m(&p.phi), m(&p.psi)];
        let f1 = phi.pow(4).mul(&psi.pow(5)).mul(&phi.pow(6)).mul(&psi.pow(-7));
        assert_eq!(m(&fam[0]), f1);
        assert!(f1.trace() * f1.trace() > 4.into());
        let lens = cyclic_lengths(&fam);
        assert!(lens.windows(2).all(|w| w[0] < w[1]));
        assert_ne!(fam[0], fam[1]);
        assert!(build_family(&p, &FamilySchedule::new(Vec::new()).unwrap(), &gens).unwrap().is_empty());
    }
}
