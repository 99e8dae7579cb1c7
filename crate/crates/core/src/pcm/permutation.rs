use sha2::{Digest, Sha256};

/// Deterministic byte stream: block `t` is
/// `SHA256(seed as i64 big-endian | t as u64 big-endian)`, read as
/// consecutive big-endian 64-bit words.
pub struct SeedStream {
    seed: [u8; 8],
    counter: u64,
    block: [u8; 32],
    offset: usize,
}

impl SeedStream {
    pub fn new(seed: i64) -> Self {
        SeedStream {
            seed: seed.to_be_bytes(),
            counter: 0,
            block: [0u8; 32],
            offset: 32,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        if self.offset == 32 {
            let mut hasher = Sha256::new();
            hasher.update(self.seed);
            hasher.update(self.counter.to_be_bytes());
            self.block = hasher.finalize().into();
            self.counter += 1;
            self.offset = 0;
        }
        let word = u64::from_be_bytes(self.block[self.offset..self.offset + 8].try_into().unwrap());
        self.offset += 8;
        word
    }

    /// Uniform draw from `0..bound` by rejection: words at or above the
    /// largest multiple of `bound` are discarded.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let limit = u64::MAX - (u64::MAX % bound);
        loop {
            let w = self.next_u64();
            if w < limit {
                return w % bound;
            }
        }
    }
}

/// Fisher-Yates shuffle of `0..n` driven by [`SeedStream`]: for `i` from
/// `n - 1` down to `1`, swap position `i` with a uniform position in `0..=i`.
pub fn seeded_permutation(seed: i64, n: usize) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..n as u32).collect();
    let mut stream = SeedStream::new(seed);
    for i in (1..n).rev() {
        let j = stream.below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_word_is_prefix_of_counter_zero_block() {
        let mut hasher = Sha256::new();
        hasher.update(5i64.to_be_bytes());
        hasher.update(0u64.to_be_bytes());
        let block: [u8; 32] = hasher.finalize().into();
        let mut s = SeedStream::new(5);
        for k in 0..4 {
            assert_eq!(s.next_u64().to_be_bytes(), block[8 * k..8 * k + 8]);
        }
        let mut hasher = Sha256::new();
        hasher.update(5i64.to_be_bytes());
        hasher.update(1u64.to_be_bytes());
        let next: [u8; 32] = hasher.finalize().into();
        assert_eq!(s.next_u64().to_be_bytes(), next[..8]);
    }

    #[test]
    fn negative_seed_is_twos_complement() {
        let mut hasher = Sha256::new();
        hasher.update([0xff; 8]);
        hasher.update(0u64.to_be_bytes());
        let block: [u8; 32] = hasher.finalize().into();
        assert_eq!(SeedStream::new(-1).next_u64().to_be_bytes(), block[..8]);
    }

    #[test]
    fn single_element_is_identity() {
        assert_eq!(seeded_permutation(0, 1), vec![0]);
        assert!(seeded_permutation(0, 0).is_empty());
    }

    #[test]
    fn deterministic() {
        assert_eq!(seeded_permutation(1234, 120), seeded_permutation(1234, 120));
        assert_ne!(seeded_permutation(1234, 120), seeded_permutation(1235, 120));
    }

    #[test]
    fn roughly_uniform_first_position() {
        // position 0 of a 4-permutation over many seeds
        let mut counts = [0usize; 4];
        for seed in 0..4000 {
            counts[seeded_permutation(seed, 4)[0] as usize] += 1;
        }
        for c in counts {
            assert!((800..1200).contains(&c), "{counts:?}");
        }
    }

    proptest! {
        #[test]
        fn is_bijection(seed in any::<i64>(), n in 1usize..300) {
            let mut p = seeded_permutation(seed, n);
            p.sort_unstable();
            prop_assert_eq!(p, (0..n as u32).collect::<Vec<_>>());
        }
    }
}
