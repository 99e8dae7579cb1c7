//! Mining games and chain-growth simulation.
//!
//! Miners are simulated in lockstep logical rounds rather than threads: in
//! each round every miner draws one nonce from its own stream and runs one
//! hash cycle, and only then is success checked. Ties go to the lowest miner
//! index. One round stands for one second of simulated time, which is what
//! the difficulty schedule compares against `target_block_seconds`.

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::analysis::{estimate_p, fshc_stats, geometric_gof, sample_mean_variance, GofResult, PEstimate};
use crate::decoder::DecoderParams;
use crate::error::{Error, Result};
use crate::headerchain::{header_hash, seed_from_prev_hash, Block, BlockHeader, ChainConfig, Hash256};
use crate::pcm::{build_pcm, ParityCheckMatrix};
use crate::puzzle::{refresh_template, HashCycle, NonceStream};

/// Timestamp of the first block template.
pub const GENESIS_TIMESTAMP: u64 = 1_600_000_000;

pub const BLOCK_VERSION: u32 = 1;

/// Default cap on rounds per game before it is reported as an overflow.
pub const DEFAULT_MAX_ROUNDS: u64 = 1 << 28;

/// Deterministic 64-bit seed derived from a parent seed and a tag path.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"eccpow-sim");
    hasher.update(seed.to_be_bytes());
    hasher.update(tag.as_bytes());
    hasher.update(index.to_be_bytes());
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameResult {
    Success {
        /// First-success hash cycle: the 1-based round index.
        rounds: u64,
        winner: usize,
        nonce: u32,
        word: Vec<u8>,
    },
    Overflow { rounds: u64 },
}

impl GameResult {
    pub fn rounds(&self) -> u64 {
        match self {
            GameResult::Success { rounds, .. } | GameResult::Overflow { rounds } => *rounds,
        }
    }
}

/// Races `miners` equal miners on one `(H, template)` instance. Miner `i`
/// draws nonces from ChaCha8 stream `i` under `rng_seed`, so a one-miner game
/// sees exactly the nonces of `solve` with `NonceOrder::Random { seed: rng_seed }`.
pub fn run_mining_game(
    h: &ParityCheckMatrix,
    template: &BlockHeader,
    miners: usize,
    params: DecoderParams,
    rng_seed: u64,
    max_rounds: u64,
) -> Result<GameResult> {
    if miners == 0 {
        return Err(Error::Domain("a mining game needs at least one miner".into()));
    }
    let mut cycle = HashCycle::new(template, h, params)?;
    let mut streams: Vec<NonceStream> = (0..miners as u64)
        .map(|i| NonceStream::random(rng_seed, i))
        .collect();
    for round in 1..=max_rounds {
        let mut first: Option<(usize, u32, Vec<u8>)> = None;
        for (i, stream) in streams.iter_mut().enumerate() {
            let nonce = stream.next_nonce();
            let out = cycle.run(nonce);
            if out.converged && first.is_none() {
                first = Some((i, nonce, out.word));
            }
        }
        if let Some((winner, nonce, word)) = first {
            return Ok(GameResult::Success {
                rounds: round,
                winner,
                nonce,
                word,
            });
        }
    }
    Ok(GameResult::Overflow { rounds: max_rounds })
}

/// Shared puzzle instance of an experiment: the easiest configured level,
/// with parent hash and Merkle root derived from `seed`.
pub fn experiment_instance(cfg: &ChainConfig, seed: u64) -> Result<(BlockHeader, ParityCheckMatrix)> {
    cfg.validate()?;
    let n = cfg.difficulty_levels[0];
    let prev_hash = Hash256::sha256(&[b"eccpow-experiment-prev".as_slice(), &seed.to_be_bytes()].concat());
    let template = BlockHeader {
        version: BLOCK_VERSION,
        prev_hash,
        merkle_root: Hash256::sha256(&[b"eccpow-experiment-merkle".as_slice(), &seed.to_be_bytes()].concat()),
        timestamp: GENESIS_TIMESTAMP,
        code_length: n,
        col_degree: cfg.w_c,
        row_degree: cfg.w_r,
        nonce: 0,
    };
    let h = build_pcm(&prev_hash, n as usize, cfg.w_c as usize, cfg.w_r as usize)?;
    Ok((template, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentOptions {
    /// Random inputs used to estimate the success probability.
    pub p_trials: u64,
    pub max_rounds: u64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            p_trials: 100_000,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningGameReport {
    pub n: u32,
    pub w_c: u16,
    pub w_r: u16,
    pub miners: usize,
    pub params: DecoderParams,
    pub samples: Vec<u64>,
    pub overflows: usize,
    pub p_hat: PEstimate,
    pub mean: f64,
    pub variance: f64,
    /// `1 / (1 - (1 - p_hat)^M)`.
    pub predicted_mean: f64,
    pub gof: Option<GofResult>,
}

impl MiningGameReport {
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.samples.len() as f64).sqrt()
    }

    /// Flat `key=value` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
        kv("n", self.n.to_string());
        kv("wc", self.w_c.to_string());
        kv("wr", self.w_r.to_string());
        kv("M", self.miners.to_string());
        kv("max_iter", self.params.max_iter.to_string());
        kv("epsilon", format!("{}/{}", self.params.epsilon_num, self.params.epsilon_den));
        kv("llr_scale", self.params.llr_scale.to_string());
        kv("games", self.samples.len().to_string());
        kv("overflows", self.overflows.to_string());
        kv("p_hat", format!("{:.6e}", self.p_hat.p_hat));
        kv("p_hat_ci_low", format!("{:.6e}", self.p_hat.ci_low));
        kv("p_hat_ci_high", format!("{:.6e}", self.p_hat.ci_high));
        kv("p_trials", self.p_hat.trials.to_string());
        kv("mean", format!("{:.6}", self.mean));
        kv("variance", format!("{:.6}", self.variance));
        kv("std_error", format!("{:.6}", self.standard_error()));
        kv("predicted_mean", format!("{:.6}", self.predicted_mean));
        kv(
            "mean_rel_error",
            format!("{:.6}", (self.mean - self.predicted_mean) / self.predicted_mean),
        );
        match &self.gof {
            Some(g) => {
                kv("gof_statistic", format!("{:.6}", g.statistic));
                kv("gof_dof", g.degrees_of_freedom.to_string());
                kv("gof_p_value", format!("{:.6}", g.p_value));
            }
            None => kv("gof_p_value", "NA".into()),
        }
        out
    }
}

pub const SAMPLES_CSV_HEADER: &str = "game_id,M,fshc";

/// `game_id,M,fshc` rows for every report.
pub fn samples_csv(reports: &[MiningGameReport]) -> String {
    let mut out = format!("{SAMPLES_CSV_HEADER}\n");
    for r in reports {
        for (g, s) in r.samples.iter().enumerate() {
            writeln!(out, "{g},{},{s}", r.miners).unwrap();
        }
    }
    out
}

/// Plays `games` independent games for each miner count on one shared
/// instance. Game `g` with `M` miners is seeded by `derive_seed(seed, "game-M", g)`.
pub fn run_experiment(
    cfg: &ChainConfig,
    games: usize,
    miner_counts: &[usize],
    seed: u64,
    opts: ExperimentOptions,
) -> Result<Vec<MiningGameReport>> {
    if games < 100 {
        return Err(Error::InsufficientSamples {
            required: 100,
            actual: games,
        });
    }
    let (template, h) = experiment_instance(cfg, seed)?;
    let params = cfg.decoder_params();
    let p_hat = estimate_p(&h, params, opts.p_trials, derive_seed(seed, "p-hat", 0))?;
    let mut reports = Vec::new();
    for &miners in miner_counts {
        let tag = format!("game-{miners}");
        let results: Vec<GameResult> = (0..games as u64)
            .into_par_iter()
            .map(|g| {
                run_mining_game(&h, &template, miners, params, derive_seed(seed, &tag, g), opts.max_rounds)
            })
            .collect::<Result<_>>()?;
        let overflows = results
            .iter()
            .filter(|r| matches!(r, GameResult::Overflow { .. }))
            .count();
        let samples: Vec<u64> = results.iter().map(GameResult::rounds).collect();
        let (mean, variance) = sample_mean_variance(&samples);
        let predicted_mean = match fshc_stats(p_hat.p_hat, miners as u64) {
            Ok(s) => s.mean,
            Err(_) => f64::INFINITY,
        };
        reports.push(MiningGameReport {
            n: template.code_length,
            w_c: template.col_degree,
            w_r: template.row_degree,
            miners,
            params,
            gof: geometric_gof(&samples).ok(),
            samples,
            overflows,
            p_hat,
            mean,
            variance,
            predicted_mean,
        });
    }
    Ok(reports)
}

/// Code length for the block after `chain`, whose template timestamp is
/// `next_timestamp`.
///
/// Every `retarget_window` blocks the mean block time of the last window is
/// compared with the target: below half the target moves one level up the
/// ladder (longer code, harder puzzle), above twice the target one level down.
pub fn next_code_length(cfg: &ChainConfig, chain: &[Block], next_timestamp: u64) -> u32 {
    let levels = &cfg.difficulty_levels;
    let Some(last) = chain.last() else {
        return levels[0];
    };
    let mut idx = levels
        .iter()
        .position(|&n| n == last.header.code_length)
        .unwrap_or(0);
    let height = chain.len() as u64;
    let window = cfg.retarget_window;
    if height >= window && height.is_multiple_of(window) {
        let start = chain[(height - window) as usize].header.timestamp;
        let mean = next_timestamp.saturating_sub(start) as f64 / window as f64;
        let target = cfg.target_block_seconds as f64;
        if mean < 0.5 * target {
            idx = (idx + 1).min(levels.len() - 1);
        } else if mean > 2.0 * target {
            idx = idx.saturating_sub(1);
        }
    }
    levels[idx]
}

/// Template for the block after `chain`.
pub fn block_template(
    cfg: &ChainConfig,
    chain: &[Block],
    next_timestamp: u64,
    merkle_root: Hash256,
) -> BlockHeader {
    let prev_hash = chain.last().map_or(Hash256::ZERO, |b| header_hash(&b.header));
    BlockHeader {
        version: BLOCK_VERSION,
        prev_hash,
        merkle_root,
        timestamp: next_timestamp,
        code_length: next_code_length(cfg, chain, next_timestamp),
        col_degree: cfg.w_c,
        row_degree: cfg.w_r,
        nonce: 0,
    }
}

/// Opaque Merkle-root stand-in for simulated blocks.
pub fn synthetic_merkle_root(seed: u64, height: u64) -> Hash256 {
    Hash256::sha256(&[b"eccpow-merkle".as_slice(), &seed.to_be_bytes(), &height.to_be_bytes()].concat())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStat {
    pub height: u64,
    pub n: u32,
    pub seed: i64,
    /// Rounds (simulated seconds) the block took, summed over template refreshes.
    pub rounds: u64,
    pub winner: usize,
    pub refreshes: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSimulation {
    pub blocks: Vec<Block>,
    pub stats: Vec<BlockStat>,
    /// Consecutive block pairs whose PCM seeds coincide.
    pub seed_collisions: usize,
    /// Consecutive pairs with distinct seeds but identical matrices.
    pub matrix_repeats: usize,
}

impl ChainSimulation {
    /// Flat `key=value` summary followed by one line per block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "blocks={}", self.blocks.len()).unwrap();
        writeln!(out, "seed_collisions={}", self.seed_collisions).unwrap();
        writeln!(out, "matrix_repeats={}", self.matrix_repeats).unwrap();
        let total: u64 = self.stats.iter().map(|s| s.rounds).sum();
        writeln!(
            out,
            "mean_block_rounds={:.3}",
            total as f64 / self.stats.len().max(1) as f64
        )
        .unwrap();
        for s in &self.stats {
            writeln!(
                out,
                "block={} n={} seed={} rounds={} winner={} refreshes={}",
                s.height, s.n, s.seed, s.rounds, s.winner, s.refreshes
            )
            .unwrap();
        }
        out
    }
}

/// Mines `num_blocks` blocks from genesis with `miners` simulated miners.
///
/// Block `h` is a mining game seeded by `derive_seed(seed, "block", h)`; its
/// template timestamp is the parent's timestamp plus the parent's rounds.
pub fn simulate_chain(cfg: &ChainConfig, num_blocks: usize, miners: usize, seed: u64) -> Result<ChainSimulation> {
    simulate_chain_with_cap(cfg, num_blocks, miners, seed, DEFAULT_MAX_ROUNDS)
}

pub fn simulate_chain_with_cap(
    cfg: &ChainConfig,
    num_blocks: usize,
    miners: usize,
    seed: u64,
    max_rounds: u64,
) -> Result<ChainSimulation> {
    cfg.validate()?;
    if num_blocks == 0 {
        return Err(Error::Domain("num_blocks must be >= 1".into()));
    }
    let params = cfg.decoder_params();
    let mut blocks: Vec<Block> = Vec::with_capacity(num_blocks);
    let mut stats: Vec<BlockStat> = Vec::with_capacity(num_blocks);
    let mut prev_matrix: Option<ParityCheckMatrix> = None;
    let mut seed_collisions = 0;
    let mut matrix_repeats = 0;

    for height in 0..num_blocks as u64 {
        let next_ts = match (blocks.last(), stats.last()) {
            (Some(b), Some(s)) => b.header.timestamp + s.rounds,
            _ => GENESIS_TIMESTAMP,
        };
        let mut template = block_template(cfg, &blocks, next_ts, synthetic_merkle_root(seed, height));
        let p = template.code_params();
        let h = build_pcm(&template.prev_hash, p.n, p.w_c, p.w_r)?;
        let pcm_seed = seed_from_prev_hash(&template.prev_hash);

        if let Some(prev) = &prev_matrix {
            if prev.source_seed() == Some(pcm_seed) {
                seed_collisions += 1;
                log::info!("block {height}: PCM seed {pcm_seed} repeats the parent's seed");
            } else if prev == &h {
                matrix_repeats += 1;
            }
        }

        let mut rounds_total = 0;
        let mut refreshes = 0;
        let (winner, nonce, word) = loop {
            let game_seed = derive_seed(seed, &format!("block-{refreshes}"), height);
            match run_mining_game(&h, &template, miners, params, game_seed, max_rounds)? {
                GameResult::Success { rounds, winner, nonce, word } => {
                    rounds_total += rounds;
                    break (winner, nonce, word);
                }
                GameResult::Overflow { rounds } => {
                    rounds_total += rounds;
                    refreshes += 1;
                    template = refresh_template(&template, template.timestamp + 1);
                }
            }
        };
        blocks.push(Block {
            header: template.with_nonce(nonce),
            height,
            solution_word: word,
        });
        stats.push(BlockStat {
            height,
            n: template.code_length,
            seed: pcm_seed,
            rounds: rounds_total,
            winner,
            refreshes,
        });
        prev_matrix = Some(h);
    }
    Ok(ChainSimulation {
        blocks,
        stats,
        seed_collisions,
        matrix_repeats,
    })
}
