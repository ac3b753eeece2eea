use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::{
    classify, evaluate_word, ping_pong_certify, GeneratorSet, GroupWord, IntMatrix2, MatrixClass,
    PingPongCertificate,
};

/// Two words `φ, ψ` whose `k`-th powers generate a free group of rank two.
#[derive(Clone, Debug, Serialize)]
pub struct SchottkyPair {
    pub phi: GroupWord,
    pub psi: GroupWord,
    pub power: u32,
    pub certificate: PingPongCertificate,
}

impl SchottkyPair {
    /// Tries `k = 1, 2, 4, ...` up to `max_power` and keeps the first
    /// certified power.
    pub fn certify(phi: &GroupWord, psi: &GroupWord, gens: &GeneratorSet, max_power: u32) -> Result<Self> {
        let mut k = 1;
        while k <= max_power {
            let cert = ping_pong_certify(phi, psi, k, gens)?;
            if cert.valid {
                for w in [phi, psi] {
                    let class = classify(&evaluate_word(&w.pow(k as i64), gens)?);
                    if class != MatrixClass::Hyperbolic {
                        return Err(Error::Construction(format!("power {k} of a pair word is {class}")));
                    }
                }
                return Ok(SchottkyPair { phi: phi.clone(), psi: psi.clone(), power: k, certificate: cert });
            }
            k *= 2;
        }
        Err(Error::Inconclusive(max_power))
    }

    /// `φ^k, ψ^k` as matrices.
    pub fn matrices(&self, gens: &GeneratorSet) -> Result<[IntMatrix2; 2]> {
        let k = self.power as i64;
        Ok([evaluate_word(&self.phi.pow(k), gens)?, evaluate_word(&self.psi.pow(k), gens)?])
    }

    /// Evaluates `count` random nonempty reduced words of length at most
    /// `max_len` in `φ^k, ψ^k` and returns the first one that is trivial.
    pub fn free_witness(
        &self,
        gens: &GeneratorSet,
        count: usize,
        max_len: usize,
        seed: u64,
    ) -> Result<Option<Vec<(usize, i64)>>> {
        let [a, b] = self.matrices(gens)?;
        let letters = [[a.clone(), a.inverse()], [b.clone(), b.inverse()]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let len = rng.gen_range(1..=max_len.max(1));
            let mut w: Vec<(usize, i64)> = Vec::with_capacity(len);
            while w.len() < len {
                let l = (rng.gen_range(0..2), if rng.gen_bool(0.5) { 1 } else { -1 });
                if w.last().is_some_and(|&(g, e)| g == l.0 && e == -l.1) {
                    continue;
                }
                w.push(l);
            }
            let m = w
                .iter()
                .fold(IntMatrix2::identity(), |m, &(g, e)| m.mul(&letters[g][usize::from(e < 0)]));
            if m.is_identity() {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        GeneratorSet::standard().parse_word(s).unwrap()
    }

    #[test]
    fn sanov_and_flagship_pairs() {
        let gens = GeneratorSet::standard();
        // R^2, L^2 play ping-pong but are parabolic
        assert!(matches!(SchottkyPair::certify(&w("R"), &w("L"), &gens, 64), Err(Error::Construction(_))));
        let pair = SchottkyPair::certify(&w("R L"), &w("L R"), &gens, 64).unwrap();
        assert_eq!(pair.power, 4);
        assert!(pair.certificate.valid);
        assert_eq!(pair.free_witness(&gens, 200, 10, 3).unwrap(), None);
    }

    #[test]
    fn parabolic_power_one_is_not_certified() {
        let gens = GeneratorSet::standard();
        assert!(matches!(SchottkyPair::certify(&w("R"), &w("L"), &gens, 1), Err(Error::Inconclusive(1))));
    }
}
