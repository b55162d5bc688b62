//! Counter-based pseudo-random generator.
//!
//! A SplitMix64-style output function applied to a (key, counter) pair: the
//! stream is a pure function of the 64-bit seed, values are passed around by
//! value, and derived streams for sweep cells are obtained by hashing tags
//! into the key. No global state anywhere.

/// Counter-based generator; `Copy` so it is passed by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rng {
    key: u64,
    ctr: u64,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            key: mix(seed ^ 0x9e37_79b9_7f4a_7c15),
            ctr: 0,
        }
    }

    /// Independent stream derived by hashing tags into the key
    /// (used for per-cell seeds: hash(base_seed, γ-index, α-index, replicate)).
    pub fn derive(&self, tags: &[u64]) -> Rng {
        let mut key = self.key;
        for (i, &t) in tags.iter().enumerate() {
            key = mix(key ^ t.wrapping_add((i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        }
        Rng { key, ctr: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix(self.key.wrapping_add(self.ctr.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        self.ctr = self.ctr.wrapping_add(1);
        out
    }

    /// Uniform on (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        let x = self.next_u64() >> 11;
        ((x as f64) + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the inverse CDF, one uniform per draw.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        crate::numerics::special::normal_quantile(self.uniform())
    }
}
