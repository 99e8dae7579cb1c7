//! The decoder puzzle: find a nonce whose hash vector decodes to a codeword
//! of the block's parity-check matrix.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decoder::{DecoderOutput, DecoderParams, MinSumDecoder};
use crate::error::{Error, Result};
use crate::headerchain::{BlockHeader, ChainConfig};
use crate::hvg::build_hash_vector;
use crate::pcm::{build_pcm, ParityCheckMatrix};

/// Size of the nonce space.
pub const NONCE_SPACE: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuzzleSolution {
    pub nonce: u32,
    pub word: Vec<u8>,
    /// Hash cycles spent, including the successful one.
    pub cycles_spent: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(PuzzleSolution),
    Exhausted { cycles_spent: u64 },
}

impl SolveOutcome {
    pub fn solution(self) -> Option<PuzzleSolution> {
        match self {
            SolveOutcome::Solved(s) => Some(s),
            SolveOutcome::Exhausted { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonceOrder {
    /// `start, start + 1, ...`, wrapping once around the nonce space.
    Sequential { start: u32 },
    /// Uniform draws (with replacement) from a seeded ChaCha8 stream.
    Random { seed: u64 },
}

impl Default for NonceOrder {
    fn default() -> Self {
        NonceOrder::Sequential { start: 0 }
    }
}

/// Source of candidate nonces.
pub enum NonceStream {
    Sequential(u32),
    Random(Box<ChaCha8Rng>),
}

impl NonceStream {
    pub fn new(order: NonceOrder) -> Self {
        match order {
            NonceOrder::Sequential { start } => NonceStream::Sequential(start),
            NonceOrder::Random { seed } => Self::random(seed, 0),
        }
    }

    /// Random stream `stream` under `seed`; distinct stream ids never overlap.
    pub fn random(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NonceStream::Random(Box::new(rng))
    }

    pub fn next_nonce(&mut self) -> u32 {
        match self {
            NonceStream::Sequential(next) => {
                let n = *next;
                *next = next.wrapping_add(1);
                n
            }
            NonceStream::Random(rng) => rng.next_u32(),
        }
    }
}

/// One hash cycle bound to a fixed template and matrix.
pub struct HashCycle<'a> {
    template: BlockHeader,
    n: usize,
    decoder: MinSumDecoder<'a>,
}

impl<'a> HashCycle<'a> {
    pub fn new(template: &BlockHeader, h: &'a ParityCheckMatrix, params: DecoderParams) -> Result<Self> {
        let n = template.code_length as usize;
        if n != h.n() {
            return Err(Error::Parameter(format!(
                "template code length {n} does not match matrix with {} columns",
                h.n()
            )));
        }
        if let Some(p) = h.params() {
            if p != template.code_params() {
                return Err(Error::Parameter(format!(
                    "template parameters {:?} do not match matrix parameters {p:?}",
                    template.code_params()
                )));
            }
        }
        Ok(HashCycle {
            template: template.clone(),
            n,
            decoder: MinSumDecoder::new(h, params),
        })
    }

    /// Hash vector plus decode for `nonce`.
    pub fn run(&mut self, nonce: u32) -> DecoderOutput {
        self.template.nonce = nonce;
        let r = build_hash_vector(&self.template, self.n);
        self.decoder
            .decode(&r.bits)
            .expect("hash vector length equals code length")
    }
}

/// The composite map nonce -> decoder output for a fixed template and H.
pub fn eccpgf(
    template: &BlockHeader,
    nonce: u32,
    h: &ParityCheckMatrix,
    params: DecoderParams,
) -> Result<Vec<u8>> {
    Ok(HashCycle::new(template, h, params)?.run(nonce).word)
}

/// Tries nonces in `order` until one decodes to a codeword, spending at
/// most `budget` hash cycles (and never more than the nonce space).
pub fn solve(
    template: &BlockHeader,
    h: &ParityCheckMatrix,
    params: DecoderParams,
    order: NonceOrder,
    budget: u64,
) -> Result<SolveOutcome> {
    let mut cycle = HashCycle::new(template, h, params)?;
    let mut nonces = NonceStream::new(order);
    let limit = budget.min(NONCE_SPACE);
    for spent in 1..=limit {
        let nonce = nonces.next_nonce();
        let out = cycle.run(nonce);
        if out.converged {
            return Ok(SolveOutcome::Solved(PuzzleSolution {
                nonce,
                word: out.word,
                cycles_spent: spent,
            }));
        }
    }
    Ok(SolveOutcome::Exhausted { cycles_spent: limit })
}

/// Sequential solve spread over `workers` threads.
///
/// Nonces are scanned in batches of `workers * BATCH`; within a batch each
/// worker owns a disjoint stride and the smallest successful nonce wins, so
/// the result (including `cycles_spent`) equals the single-threaded
/// sequential solve from nonce 0.
pub fn solve_parallel(
    template: &BlockHeader,
    h: &ParityCheckMatrix,
    params: DecoderParams,
    workers: usize,
    budget: u64,
) -> Result<SolveOutcome> {
    const BATCH: u64 = 256;
    let workers = workers.max(1);
    if workers == 1 {
        return solve(template, h, params, NonceOrder::default(), budget);
    }
    HashCycle::new(template, h, params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let limit = budget.min(NONCE_SPACE);
    let batch = workers as u64 * BATCH;
    let mut base = 0u64;
    while base < limit {
        let end = (base + batch).min(limit);
        let found = pool.install(|| {
            (0..workers as u64)
                .into_par_iter()
                .filter_map(|w| {
                    let mut cycle = HashCycle::new(template, h, params).ok()?;
                    (base + w..end)
                        .step_by(workers)
                        .find_map(|nonce| {
                            let out = cycle.run(nonce as u32);
                            out.converged.then_some((nonce, out.word))
                        })
                })
                .min_by_key(|(nonce, _)| *nonce)
        });
        if let Some((nonce, word)) = found {
            return Ok(SolveOutcome::Solved(PuzzleSolution {
                nonce: nonce as u32,
                word,
                cycles_spent: nonce + 1,
            }));
        }
        base = end;
    }
    Ok(SolveOutcome::Exhausted { cycles_spent: limit })
}

/// Fresh template for a new nonce sweep: timestamp moves to
/// `max(now, old + 1)` and the nonce resets to zero.
pub fn refresh_template(template: &BlockHeader, now: u64) -> BlockHeader {
    BlockHeader {
        timestamp: now.max(template.timestamp.saturating_add(1)),
        nonce: 0,
        ..template.clone()
    }
}

/// Current Unix time in seconds.
pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Valid(DecoderOutput),
    /// The decoder output is not a codeword.
    PuzzleFailed(DecoderOutput),
    /// Header invariants or difficulty schedule violated; no decode was run.
    ParameterMismatch(String),
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid(_))
    }
}

/// Rebuilds H from the header's parent hash and the hash vector from the
/// full header, then runs a single decode.
pub fn verify_detailed(header: &BlockHeader, cfg: &ChainConfig) -> Verification {
    if let Err(e) = header.validate() {
        return Verification::ParameterMismatch(e.to_string());
    }
    if !cfg.admits(header) {
        return Verification::ParameterMismatch(format!(
            "code (n={}, w_c={}, w_r={}) is not an admissible level",
            header.code_length, header.col_degree, header.row_degree
        ));
    }
    let p = header.code_params();
    let h = match build_pcm(&header.prev_hash, p.n, p.w_c, p.w_r) {
        Ok(h) => h,
        Err(e) => return Verification::ParameterMismatch(e.to_string()),
    };
    let out = HashCycle::new(header, &h, cfg.decoder_params())
        .expect("matrix built from header parameters")
        .run(header.nonce);
    if out.converged {
        Verification::Valid(out)
    } else {
        Verification::PuzzleFailed(out)
    }
}

pub fn verify(header: &BlockHeader, cfg: &ChainConfig) -> bool {
    verify_detailed(header, cfg).is_valid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::{decode, is_codeword};
    use crate::headerchain::{header_hash, Hash256};

    fn template(n: u32) -> BlockHeader {
        BlockHeader {
            version: 1,
            prev_hash: Hash256([0x21; 32]),
            merkle_root: Hash256([0x42; 32]),
            timestamp: 1_700_000_000,
            code_length: n,
            col_degree: 3,
            row_degree: 6,
            nonce: 0,
        }
    }

    fn matrix(t: &BlockHeader) -> ParityCheckMatrix {
        build_pcm(&t.prev_hash, t.code_length as usize, 3, 6).unwrap()
    }

    #[test]
    fn eccpgf_is_decode_of_hash_vector() {
        let t = template(24);
        let h = matrix(&t);
        let p = DecoderParams::default();
        let a = eccpgf(&t, 5, &h, p).unwrap();
        assert_eq!(a, eccpgf(&t, 5, &h, p).unwrap());
        let r = build_hash_vector(&t.with_nonce(5), 24);
        assert_eq!(a, decode(&h, &r, p).unwrap().word);
    }

    #[test]
    fn different_nonces_give_different_vectors() {
        let mut t = template(256);
        t.row_degree = 4;
        let h = build_pcm(&t.prev_hash, 256, 3, 4).unwrap();
        let p = DecoderParams::default();
        assert_ne!(
            build_hash_vector(&t.with_nonce(1), 256),
            build_hash_vector(&t.with_nonce(2), 256)
        );
        assert_ne!(eccpgf(&t, 1, &h, p).unwrap(), eccpgf(&t, 2, &h, p).unwrap());
    }

    #[test]
    fn mismatched_template_is_rejected() {
        let h = matrix(&template(24));
        assert!(eccpgf(&template(48), 0, &h, DecoderParams::default()).is_err());
    }

    #[test]
    fn zero_budget_is_exhausted() {
        let t = template(24);
        let out = solve(&t, &matrix(&t), DecoderParams::default(), NonceOrder::default(), 0).unwrap();
        assert_eq!(out, SolveOutcome::Exhausted { cycles_spent: 0 });
    }

    #[test]
    fn solve_then_verify() {
        let cfg = ChainConfig::default();
        let t = template(24);
        let h = matrix(&t);
        for order in [NonceOrder::Sequential { start: 0 }, NonceOrder::Random { seed: 9 }] {
            let sol = solve(&t, &h, cfg.decoder_params(), order, 1_000_000)
                .unwrap()
                .solution()
                .expect("n = 24 puzzle solves well within budget");
            assert!(is_codeword(&h, &sol.word).unwrap());
            let header = t.with_nonce(sol.nonce);
            match verify_detailed(&header, &cfg) {
                Verification::Valid(out) => assert_eq!(out.word, sol.word),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn sequential_cycles_count_from_start() {
        let t = template(24);
        let h = matrix(&t);
        let p = DecoderParams::default();
        let sol = solve(&t, &h, p, NonceOrder::Sequential { start: 0 }, u64::MAX)
            .unwrap()
            .solution()
            .unwrap();
        assert_eq!(sol.cycles_spent, u64::from(sol.nonce) + 1);
        let mut cycle = HashCycle::new(&t, &h, p).unwrap();
        assert!((0..sol.nonce).all(|nonce| !cycle.run(nonce).converged));
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = DecoderParams::default();
        for k in 0..5u8 {
            let mut t = template(24);
            t.merkle_root = Hash256([k; 32]);
            let h = matrix(&t);
            let seq = solve(&t, &h, p, NonceOrder::default(), 1 << 20).unwrap();
            for workers in [2, 3, 8] {
                assert_eq!(solve_parallel(&t, &h, p, workers, 1 << 20).unwrap(), seq);
            }
        }
    }

    #[test]
    fn parallel_respects_budget() {
        let t = template(24);
        let h = matrix(&t);
        let seq = solve(&t, &h, DecoderParams::default(), NonceOrder::default(), u64::MAX)
            .unwrap()
            .solution()
            .unwrap();
        let budget = seq.cycles_spent - 1;
        assert_eq!(
            solve_parallel(&t, &h, DecoderParams::default(), 4, budget).unwrap(),
            SolveOutcome::Exhausted { cycles_spent: budget }
        );
    }

    #[test]
    fn refresh_advances_timestamp() {
        let t = template(24).with_nonce(77);
        let stale = refresh_template(&t, 5);
        assert_eq!(stale.timestamp, t.timestamp + 1);
        assert_eq!(stale.nonce, 0);
        let fresh = refresh_template(&t, t.timestamp + 100);
        assert_eq!(fresh.timestamp, t.timestamp + 100);
        assert_ne!(stale.to_bytes(), t.with_nonce(0).to_bytes());
        assert_ne!(header_hash(&stale), header_hash(&t.with_nonce(0)));
    }

    #[test]
    fn verify_rejects_parameter_mismatch() {
        let cfg = ChainConfig::default();
        let mut t = template(24);
        t.col_degree = 4;
        t.code_length = 24;
        assert!(matches!(
            verify_detailed(&t, &cfg),
            Verification::ParameterMismatch(_)
        ));
        let mut t = template(30);
        t.row_degree = 5;
        assert!(matches!(
            verify_detailed(&t, &cfg),
            Verification::ParameterMismatch(_)
        ));
    }

    #[test]
    fn tampered_solutions_fail_mostly() {
        let cfg = ChainConfig::default();
        let p = cfg.decoder_params();
        let mut nonce_fail = 0;
        let mut prev_fail = 0;
        let trials = 40;
        for k in 0..trials {
            let mut t = template(24);
            t.timestamp += k;
            let h = matrix(&t);
            let sol = solve(&t, &h, p, NonceOrder::default(), u64::MAX).unwrap().solution().unwrap();
            let header = t.with_nonce(sol.nonce);
            assert!(verify(&header, &cfg));
            if !verify(&header.with_nonce(sol.nonce.wrapping_add(1)), &cfg) {
                nonce_fail += 1;
            }
            let mut other = header.clone();
            other.prev_hash.0[(k % 32) as usize] ^= 0x01;
            if !verify(&other, &cfg) {
                prev_fail += 1;
            }
        }
        assert!(nonce_fail >= trials * 3 / 4, "{nonce_fail}");
        assert!(prev_fail >= trials * 3 / 4, "{prev_fail}");
    }
}
