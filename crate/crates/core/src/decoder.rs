//! Integer min-sum message passing.
//!
//! Everything on the verification path is integer arithmetic so that every
//! platform reaches the same decision on the same input. Channel values are
//! `(1 - 2 r_j) * L0` with `L0 = round(llr_scale * ln((1 - eps) / eps))`,
//! messages saturate at +/-127, and a total of exactly zero decides bit 0.

use crate::error::{Error, Result};
use crate::hvg::HashVector;
use crate::pcm::ParityCheckMatrix;

/// Message saturation bound.
pub const MSG_MAX: i32 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderParams {
    pub max_iter: u32,
    pub epsilon_num: u32,
    pub epsilon_den: u32,
    pub llr_scale: u32,
}

impl Default for DecoderParams {
    fn default() -> Self {
        DecoderParams {
            max_iter: 20,
            epsilon_num: 1,
            epsilon_den: 4,
            llr_scale: 8,
        }
    }
}

impl DecoderParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 || self.llr_scale == 0 {
            return Err(Error::Parameter("max_iter and llr_scale must be positive".into()));
        }
        if self.epsilon_num == 0 || 2 * u64::from(self.epsilon_num) >= u64::from(self.epsilon_den) {
            return Err(Error::Parameter(format!(
                "epsilon {}/{} outside (0, 1/2)",
                self.epsilon_num, self.epsilon_den
            )));
        }
        Ok(())
    }

    /// Quantized channel magnitude `L0`, clamped to the message range.
    ///
    /// This is the only floating-point step; it runs once per parameter set
    /// and its result is a small integer well away from a rounding boundary
    /// for the default constants (`8 ln 3 = 8.79`).
    pub fn channel_llr(&self) -> i32 {
        let eps = f64::from(self.epsilon_num) / f64::from(self.epsilon_den);
        let l0 = (f64::from(self.llr_scale) * ((1.0 - eps) / eps).ln()).round();
        (l0 as i32).clamp(1, MSG_MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderOutput {
    pub word: Vec<u8>,
    /// Syndrome of `word` is zero.
    pub converged: bool,
    pub iterations_used: u32,
}

/// True iff `H c = 0` over GF(2).
pub fn is_codeword(h: &ParityCheckMatrix, c: &[u8]) -> Result<bool> {
    Ok(h.syndrome(c)?.iter().all(|&s| s == 0))
}

fn zero_syndrome(h: &ParityCheckMatrix, c: &[u8]) -> bool {
    h.rows()
        .iter()
        .all(|row| row.iter().fold(0u8, |acc, &j| acc ^ c[j as usize]) == 0)
}

/// Reusable decoder state for one matrix; avoids reallocating message
/// buffers on every hash cycle.
pub struct MinSumDecoder<'a> {
    h: &'a ParityCheckMatrix,
    params: DecoderParams,
    l0: i32,
    channel: Vec<i32>,
    v2c: Vec<i32>,
    c2v: Vec<i32>,
}

impl<'a> MinSumDecoder<'a> {
    pub fn new(h: &'a ParityCheckMatrix, params: DecoderParams) -> Self {
        let edges = h.num_edges();
        MinSumDecoder {
            h,
            params,
            l0: params.channel_llr(),
            channel: vec![0; h.n()],
            v2c: vec![0; edges],
            c2v: vec![0; edges],
        }
    }

    pub fn decode(&mut self, r: &[u8]) -> Result<DecoderOutput> {
        let h = self.h;
        let n = h.n();
        if r.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: r.len(),
            });
        }
        let mut word: Vec<u8> = r.iter().map(|&b| b & 1).collect();
        if zero_syndrome(h, &word) {
            return Ok(DecoderOutput {
                word,
                converged: true,
                iterations_used: 0,
            });
        }

        for (l, &b) in self.channel.iter_mut().zip(&word) {
            *l = if b == 0 { self.l0 } else { -self.l0 };
        }
        for e in 0..h.num_edges() {
            self.v2c[e] = self.channel[h.edge_col(e)];
        }

        for iter in 1..=self.params.max_iter {
            // check nodes, ascending row order
            for i in 0..h.m() {
                let edges = h.row_edges(i);
                let mut min1 = i32::MAX;
                let mut min2 = i32::MAX;
                let mut argmin = usize::MAX;
                let mut negative = false;
                for e in edges.clone() {
                    let v = self.v2c[e];
                    negative ^= v < 0;
                    let mag = v.abs();
                    if mag < min1 {
                        min2 = min1;
                        min1 = mag;
                        argmin = e;
                    } else if mag < min2 {
                        min2 = mag;
                    }
                }
                for e in edges {
                    let mag = if e == argmin { min2 } else { min1 };
                    // a degree-1 check has no other inputs and sends nothing
                    let mag = if mag == i32::MAX { 0 } else { mag };
                    let out_negative = negative ^ (self.v2c[e] < 0);
                    self.c2v[e] = if out_negative { -mag } else { mag };
                }
            }
            // variable nodes, ascending column order
            for j in 0..n {
                let incident = h.col_edges(j);
                let total: i32 = self.channel[j]
                    + incident.iter().map(|&e| self.c2v[e as usize]).sum::<i32>();
                word[j] = u8::from(total < 0);
                for &e in incident {
                    let e = e as usize;
                    self.v2c[e] = (total - self.c2v[e]).clamp(-MSG_MAX, MSG_MAX);
                }
            }
            if zero_syndrome(h, &word) {
                return Ok(DecoderOutput {
                    word,
                    converged: true,
                    iterations_used: iter,
                });
            }
        }
        Ok(DecoderOutput {
            word,
            converged: false,
            iterations_used: self.params.max_iter,
        })
    }
}

/// One-shot decode of a hash vector.
pub fn decode(h: &ParityCheckMatrix, r: &HashVector, params: DecoderParams) -> Result<DecoderOutput> {
    decode_bits(h, &r.bits, params)
}

/// One-shot decode of a raw 0/1 vector.
pub fn decode_bits(h: &ParityCheckMatrix, r: &[u8], params: DecoderParams) -> Result<DecoderOutput> {
    MinSumDecoder::new(h, params).decode(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::headerchain::Hash256;
    use crate::pcm::{build_pcm, derive_generator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn repetition3() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    /// Reference min-sum over the dense matrix: every message recomputed from
    /// scratch with an explicit leave-one-out minimum.
    fn reference_decode(h: &ParityCheckMatrix, r: &[u8], params: DecoderParams) -> DecoderOutput {
        let dense = h.to_dense();
        let (m, n) = (dense.len(), r.len());
        let l0 = params.channel_llr();
        let ch: Vec<i32> = r.iter().map(|&b| if b == 0 { l0 } else { -l0 }).collect();
        let syndrome_ok = |w: &[u8]| {
            dense
                .iter()
                .all(|row| row.iter().zip(w).filter(|(&a, &b)| a == 1 && b == 1).count() % 2 == 0)
        };
        if syndrome_ok(r) {
            return DecoderOutput { word: r.to_vec(), converged: true, iterations_used: 0 };
        }
        let mut q = vec![vec![0i32; n]; m];
        for i in 0..m {
            for j in 0..n {
                if dense[i][j] == 1 {
                    q[i][j] = ch[j];
                }
            }
        }
        let mut word = r.to_vec();
        for iter in 1..=params.max_iter {
            let mut rmsg = vec![vec![0i32; n]; m];
            for i in 0..m {
                for j in 0..n {
                    if dense[i][j] == 0 {
                        continue;
                    }
                    let others: Vec<i32> =
                        (0..n).filter(|&k| k != j && dense[i][k] == 1).map(|k| q[i][k]).collect();
                    if others.is_empty() {
                        continue;
                    }
                    let mag = others.iter().map(|v| v.abs()).min().unwrap();
                    let neg = others.iter().filter(|&&v| v < 0).count() % 2 == 1;
                    rmsg[i][j] = if neg { -mag } else { mag };
                }
            }
            for j in 0..n {
                let total: i32 = ch[j] + (0..m).filter(|&i| dense[i][j] == 1).map(|i| rmsg[i][j]).sum::<i32>();
                word[j] = u8::from(total < 0);
                for i in 0..m {
                    if dense[i][j] == 1 {
                        q[i][j] = (total - rmsg[i][j]).clamp(-127, 127);
                    }
                }
            }
            if syndrome_ok(&word) {
                return DecoderOutput { word, converged: true, iterations_used: iter };
            }
        }
        DecoderOutput { word, converged: false, iterations_used: params.max_iter }
    }

    #[test]
    fn default_channel_magnitude() {
        assert_eq!(DecoderParams::default().channel_llr(), 9);
    }

    #[test]
    fn codeword_input_returns_immediately() {
        let h = repetition3();
        let out = decode_bits(&h, &[1, 1, 1], DecoderParams::default()).unwrap();
        assert_eq!(out, DecoderOutput { word: vec![1, 1, 1], converged: true, iterations_used: 0 });
        let out = decode_bits(&h, &[0, 0, 0], DecoderParams::default()).unwrap();
        assert!(out.converged && out.iterations_used == 0);
    }

    #[test]
    fn repetition_code_corrects_single_error() {
        // hand trace: iteration 1 leaves a zero total on bit 2 (decided 0),
        // iteration 2 pulls it to -9 and the word becomes 111
        let out = decode_bits(&repetition3(), &[1, 1, 0], DecoderParams::default()).unwrap();
        assert_eq!(out.word, vec![1, 1, 1]);
        assert!(out.converged);
        assert_eq!(out.iterations_used, 2);
    }

    #[test]
    fn length_mismatch() {
        let err = decode_bits(&repetition3(), &[1, 1], DecoderParams::default()).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 3, actual: 2 }));
        assert!(is_codeword(&repetition3(), &[1]).is_err());
    }

    #[test]
    fn is_codeword_cases() {
        let h = build_pcm(&Hash256([4; 32]), 24, 3, 6).unwrap();
        assert!(is_codeword(&h, &[0u8; 24]).unwrap());
        for c in derive_generator(&h).unwrap().basis {
            assert!(is_codeword(&h, &c).unwrap());
        }
        let mut unit = vec![0u8; 24];
        unit[11] = 1;
        assert!(!is_codeword(&h, &unit).unwrap());
    }

    #[test]
    fn matches_reference_decoder() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (n, wc, wr) in [(24, 3, 6), (20, 3, 4), (30, 3, 5)] {
            let h = build_pcm(&Hash256([n as u8; 32]), n, wc, wr).unwrap();
            let params = DecoderParams::default();
            let mut dec = MinSumDecoder::new(&h, params);
            for _ in 0..300 {
                let r: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
                let fast = dec.decode(&r).unwrap();
                assert_eq!(fast, reference_decode(&h, &r, params));
                assert_eq!(fast.converged, is_codeword(&h, &fast.word).unwrap());
            }
        }
    }

    #[test]
    fn idempotent_on_converged_output() {
        let h = build_pcm(&Hash256([8; 32]), 24, 3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut dec = MinSumDecoder::new(&h, DecoderParams::default());
        for _ in 0..2000 {
            let r: Vec<u8> = (0..24).map(|_| rng.gen_range(0..2)).collect();
            let out = dec.decode(&r).unwrap();
            if out.converged {
                let again = dec.decode(&out.word).unwrap();
                assert_eq!(again.word, out.word);
                assert_eq!(again.iterations_used, 0);
            }
        }
    }
}
