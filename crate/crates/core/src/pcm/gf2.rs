//! Dense GF(2) linear algebra over packed 64-bit words: null-space basis,
//! rank, and brute-force minimum distance.

use super::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Largest code dimension `k'` that [`min_distance_bruteforce`] enumerates.
pub const MAX_ENUMERATION_DIMENSION: usize = 20;

#[derive(Debug, Clone)]
struct BitRows {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitRows {
    fn from_dense(rows: impl Iterator<Item = Vec<u8>>, ncols: usize) -> Self {
        let words = ncols.div_ceil(64);
        let rows = rows
            .map(|r| {
                let mut packed = vec![0u64; words];
                for (j, &b) in r.iter().enumerate() {
                    if b & 1 == 1 {
                        packed[j / 64] |= 1 << (j % 64);
                    }
                }
                packed
            })
            .collect();
        BitRows { words, rows }
    }

    fn bit(&self, r: usize, c: usize) -> bool {
        (self.rows[r][c / 64] >> (c % 64)) & 1 == 1
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// nonzero row, in order.
    fn rref(&mut self, ncols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..self.rows.len()).find(|&r| self.bit(r, col)) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot_row = self.rows[rank].clone();
            for r in 0..self.rows.len() {
                if r != rank && self.bit(r, col) {
                    for w in 0..self.words {
                        self.rows[r][w] ^= pivot_row[w];
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows.len() {
                break;
            }
        }
        pivots
    }
}

/// Rank over GF(2) of a list of equal-length 0/1 vectors.
pub fn gf2_rank(vectors: &[Vec<u8>]) -> usize {
    let ncols = vectors.first().map_or(0, Vec::len);
    let mut m = BitRows::from_dense(vectors.iter().cloned(), ncols);
    m.rref(ncols).len()
}

/// Basis of the null space of H, stored as `k'` codewords of length `n`
/// (the columns of an `n x k'` generator matrix).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub n: usize,
    pub basis: Vec<Vec<u8>>,
    pub rank: usize,
    /// `m - rank(H)`.
    pub rank_deficiency: usize,
}

impl GeneratorMatrix {
    /// Code dimension `k' = n - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Entry `(row, col)` of the `n x k'` matrix.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.basis[col][row]
    }

    /// Codeword for the message bits `msg` (bit `i` selects basis vector `i`).
    pub fn encode(&self, msg: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.n];
        for (i, _) in msg.iter().enumerate().filter(|(_, &b)| b & 1 == 1) {
            for (o, &g) in out.iter_mut().zip(&self.basis[i]) {
                *o ^= g;
            }
        }
        out
    }
}

/// Null-space basis of H by Gauss-Jordan elimination. Each free column `f`
/// yields one basis vector with `x_f = 1`, other free columns zero, and pivot
/// coordinates read off the reduced rows.
pub fn derive_generator(h: &ParityCheckMatrix) -> Result<GeneratorMatrix> {
    let n = h.n();
    if n == 0 || h.m() == 0 {
        return Err(Error::Parameter("empty parity-check matrix".into()));
    }
    let mut reduced = BitRows::from_dense(h.to_dense().into_iter(), n);
    let pivots = reduced.rref(n);
    let rank = pivots.len();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let basis: Vec<Vec<u8>> = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u8; n];
            v[free] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                if reduced.bit(r, free) {
                    v[p] = 1;
                }
            }
            v
        })
        .collect();
    if basis.is_empty() {
        return Err(Error::DegenerateCode);
    }
    Ok(GeneratorMatrix {
        n,
        basis,
        rank,
        rank_deficiency: h.m() - rank,
    })
}

/// Minimum nonzero codeword weight, enumerating all `2^k' - 1` nonzero
/// codewords in Gray-code order.
pub fn min_distance_bruteforce(h: &ParityCheckMatrix) -> Result<usize> {
    let g = derive_generator(h)?;
    let k = g.dimension();
    if k > MAX_ENUMERATION_DIMENSION {
        return Err(Error::Capacity {
            dimension: k,
            limit: MAX_ENUMERATION_DIMENSION,
        });
    }
    let packed = BitRows::from_dense(g.basis.iter().cloned(), g.n);
    let mut word = vec![0u64; packed.words];
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << k) {
        // i-th Gray code differs from the previous one in bit trailing_zeros(i)
        let flip = i.trailing_zeros() as usize;
        for (w, b) in word.iter_mut().zip(&packed.rows[flip]) {
            *w ^= b;
        }
        let weight: usize = word.iter().map(|w| w.count_ones() as usize).sum();
        best = best.min(weight);
    }
    Ok(best)
}

/// Guaranteed correctable errors for minimum distance `d`: `floor((d - 1) / 2)`.
pub fn correctable_errors(d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::Domain("minimum distance must be >= 1".into()));
    }
    Ok((d - 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::headerchain::Hash256;
    use crate::pcm::build_pcm;

    fn hamming74() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap()
    }

    fn repetition3() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    /// Independent oracle: all 2^n words, keep those with zero syndrome.
    fn codewords_by_enumeration(h: &ParityCheckMatrix) -> Vec<Vec<u8>> {
        let n = h.n();
        (0u32..1 << n)
            .map(|x| (0..n).map(|j| ((x >> j) & 1) as u8).collect::<Vec<u8>>())
            .filter(|w| h.syndrome(w).unwrap().iter().all(|&s| s == 0))
            .collect()
    }

    #[test]
    fn repetition_generator() {
        let g = derive_generator(&repetition3()).unwrap();
        assert_eq!(g.dimension(), 1);
        assert_eq!(g.basis, vec![vec![1, 1, 1]]);
        assert_eq!(g.rank, 2);
        assert_eq!(g.rank_deficiency, 0);
    }

    #[test]
    fn one_by_one_is_degenerate() {
        let h = ParityCheckMatrix::from_dense(&[vec![1]]).unwrap();
        assert!(matches!(derive_generator(&h), Err(Error::DegenerateCode)));
    }

    #[test]
    fn hamming_and_repetition_distance() {
        assert_eq!(min_distance_bruteforce(&hamming74()).unwrap(), 3);
        assert_eq!(min_distance_bruteforce(&repetition3()).unwrap(), 3);
    }

    #[test]
    fn duplicate_columns_give_distance_two() {
        // columns 0 and 1 identical, so e_0 + e_1 is a weight-2 codeword
        let h = ParityCheckMatrix::from_dense(&[vec![1, 1, 0, 1], vec![0, 0, 1, 1]]).unwrap();
        assert!(min_distance_bruteforce(&h).unwrap() <= 2);
    }

    #[test]
    fn distance_matches_enumeration_oracle() {
        for seed in 0..6u8 {
            let h = build_pcm(&Hash256([seed; 32]), 16, 3, 4).unwrap();
            let words = codewords_by_enumeration(&h);
            let oracle = words
                .iter()
                .map(|w| w.iter().filter(|&&b| b == 1).count())
                .filter(|&w| w > 0)
                .min()
                .unwrap();
            assert_eq!(min_distance_bruteforce(&h).unwrap(), oracle);
            let g = derive_generator(&h).unwrap();
            assert_eq!(1usize << g.dimension(), words.len());
        }
    }

    #[test]
    fn gallager_codes_are_rank_deficient() {
        let h = build_pcm(&Hash256([3; 32]), 24, 3, 6).unwrap();
        let g = derive_generator(&h).unwrap();
        // each of the w_c blocks sums to the all-ones row
        assert!(g.rank_deficiency >= 2);
        assert_eq!(g.rank + g.dimension(), 24);
        for v in &g.basis {
            assert!(h.syndrome(v).unwrap().iter().all(|&s| s == 0));
        }
        assert_eq!(gf2_rank(&g.basis), g.dimension());
    }

    #[test]
    fn capacity_limit() {
        let h = build_pcm(&Hash256([3; 32]), 96, 3, 6).unwrap();
        assert!(matches!(
            min_distance_bruteforce(&h),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn correctable_error_counts() {
        assert_eq!(correctable_errors(3).unwrap(), 1);
        assert_eq!(correctable_errors(4).unwrap(), 1);
        assert_eq!(correctable_errors(7).unwrap(), 3);
        assert_eq!(correctable_errors(1).unwrap(), 0);
        assert!(correctable_errors(0).is_err());
    }
}
