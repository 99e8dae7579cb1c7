//! Decoding-success probability of the real decoder, estimated by sampling
//! or counted exhaustively on small codes.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decoder::{DecoderParams, MinSumDecoder};
use crate::error::{Error, Result};
use crate::pcm::ParityCheckMatrix;

/// Trials per independent substream.
const CHUNK: u64 = 4096;

/// Largest code length enumerated by [`exact_success_fraction`].
pub const MAX_EXHAUSTIVE_LENGTH: usize = 26;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// 95% Wilson score interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        PEstimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
        }
    }

    /// Half-width of the 95% interval.
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn random_word(rng: &mut ChaCha8Rng, buf: &mut [u8]) {
    for chunk in buf.chunks_mut(64) {
        let w = rng.next_u64();
        for (i, b) in chunk.iter_mut().enumerate() {
            *b = ((w >> i) & 1) as u8;
        }
    }
}

/// Fraction of uniformly random inputs on which the decoder converges.
///
/// Trials are split into chunks of 4096; chunk `c` draws from ChaCha8
/// stream `c` under `seed`, so the estimate does not depend on thread count.
pub fn estimate_p(h: &ParityCheckMatrix, params: DecoderParams, trials: u64, seed: u64) -> Result<PEstimate> {
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    params.validate()?;
    let chunks = trials.div_ceil(CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(trials - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut dec = MinSumDecoder::new(h, params);
            let mut r = vec![0u8; h.n()];
            let mut ok = 0u64;
            for _ in 0..count {
                random_word(&mut rng, &mut r);
                if dec.decode(&r).expect("length matches").converged {
                    ok += 1;
                }
            }
            ok
        })
        .sum();
    Ok(PEstimate::from_counts(successes, trials))
}

/// Decodes all `2^n` inputs; returns `(successes, 2^n)`.
pub fn exact_success_fraction(h: &ParityCheckMatrix, params: DecoderParams) -> Result<(u64, u64)> {
    let n = h.n();
    if n > MAX_EXHAUSTIVE_LENGTH {
        return Err(Error::Capacity {
            dimension: n,
            limit: MAX_EXHAUSTIVE_LENGTH,
        });
    }
    params.validate()?;
    let total = 1u64 << n;
    let successes = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut dec = MinSumDecoder::new(h, params);
            let mut r = vec![0u8; n];
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .filter(|&x| {
                    for (j, b) in r.iter_mut().enumerate() {
                        *b = ((x >> j) & 1) as u8;
                    }
                    dec.decode(&r).expect("length matches").converged
                })
                .count() as u64
        })
        .sum();
    Ok((successes, total))
}

/// [`exact_success_fraction`] packaged as an estimate with exact counts.
pub fn estimate_p_exhaustive(h: &ParityCheckMatrix, params: DecoderParams) -> Result<PEstimate> {
    let (ok, total) = exact_success_fraction(h, params)?;
    Ok(PEstimate::from_counts(ok, total))
}
