#![allow(dead_code)]

use gfl_core::lattice::enumerate_configurations;
use gfl_core::{table_field, Alphabet, Configuration, Rational, Scalar, Site, TableField, Volume};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A strictly positive joint law on `n` binary sites `0..n`, kept as a plain
/// map from bit vectors to weights so the oracles below never touch the
/// library's table indexing.
pub struct RawTable {
    pub n: usize,
    pub weights: Vec<(Vec<u8>, Rational)>,
}

pub fn random_raw(n: usize, seed: u64) -> RawTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<i64> = (0..1usize << n).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    let weights = raw
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let bits = (0..n).map(|k| ((i >> k) & 1) as u8).collect();
            (bits, Rational::from_ratio(w, total))
        })
        .collect();
    RawTable { n, weights }
}

impl RawTable {
    pub fn window(&self) -> Volume {
        Volume::interval(0, self.n as i32 - 1)
    }

    pub fn weight(&self, bits: &[u8]) -> Rational {
        self.weights.iter().find(|(b, _)| b == bits).unwrap().1.clone()
    }

    pub fn field(&self) -> TableField<Rational> {
        let w = self.window();
        let probs = enumerate_configurations(&w, &Alphabet::binary())
            .unwrap()
            .iter()
            .map(|c| self.weight(&bits_of(c, self.n)))
            .collect();
        table_field(w, Alphabet::binary(), probs).unwrap()
    }

    /// `P(w_V = x | w_Λ = z)` by summing the raw weights.
    pub fn conditional(&self, x: &[(usize, u8)], z: &[(usize, u8)]) -> Rational {
        let matches = |b: &[u8], fixed: &[(usize, u8)]| fixed.iter().all(|&(k, s)| b[k] == s);
        let mut num = Rational::zero();
        let mut den = Rational::zero();
        for (b, w) in &self.weights {
            if matches(b, z) {
                den = den.add_ref(w);
                if matches(b, x) {
                    num = num.add_ref(w);
                }
            }
        }
        num.div_ref(&den)
    }
}

pub fn bits_of(c: &Configuration, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for (s, sym) in c.iter() {
        out[s.coords()[0] as usize] = sym.0;
    }
    out
}

pub fn pairs_of(c: &Configuration) -> Vec<(usize, u8)> {
    c.iter().map(|(s, sym)| (s.coords()[0] as usize, sym.0)).collect()
}

pub fn volume_of(mask: usize, n: usize) -> Volume {
    Volume::new((0..n).filter(|k| mask >> k & 1 == 1).map(|k| Site::from(k as i32)))
}

/// Every configuration on every subset of `allowed` (as a bit mask).
pub fn conditions_within(allowed: usize, n: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    for mask in 0..1usize << n {
        if mask & !allowed != 0 {
            continue;
        }
        let lam = volume_of(mask, n);
        out.extend(enumerate_configurations(&lam, &Alphabet::binary()).unwrap());
    }
    out
}
