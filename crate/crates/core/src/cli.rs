//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification or validation failure, 2 usage or
//! configuration error. Data goes to `out` (or `--out`), diagnostics to `err`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use crate::analysis::{
    bounds_csv, bounds_rows, delta1_for, entropy_grid, entropy_grid_csv, table7_report, table7_rows,
};
use crate::error::{Error, Result};
use crate::headerchain::{
    append_block, header_hash, read_chain, validate_chain, Block, CodeParams, ChainConfig, Hash256,
};
use crate::pcm::build_pcm_from_seed;
use crate::puzzle::{refresh_template, solve_parallel, verify_detailed, SolveOutcome, Verification, NONCE_SPACE};
use crate::sim::{block_template, run_experiment, samples_csv, synthetic_merkle_root, ExperimentOptions, GENESIS_TIMESTAMP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "eccpow", version, about = "LDPC-decoder proof-of-work toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extend a chain file with freshly mined blocks
    Mine(MineArgs),
    /// Check every block's puzzle solution
    Verify(ChainArgs),
    /// Print the parity-check matrix derived from a parent hash
    Pcm(PcmArgs),
    /// Run mining games and write the first-success samples
    Simulate(SimulateArgs),
    /// Probability bounds and entropy checks
    Analyze(AnalyzeArgs),
    /// Chain maintenance
    #[command(subcommand)]
    Chain(ChainCommand),
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    chain: PathBuf,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[command(flatten)]
    files: ChainArgs,
    #[arg(long, default_value_t = 1)]
    blocks: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Seed for the synthetic Merkle roots
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PcmFormat {
    Indices,
    Dense,
}

#[derive(Args, Debug)]
struct PcmArgs {
    #[arg(long)]
    prev_hash: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    wc: usize,
    #[arg(long)]
    wr: usize,
    #[arg(long, value_enum, default_value = "indices")]
    format: PcmFormat,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    games: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    miners: Vec<usize>,
    #[arg(long)]
    seed: u64,
    /// CSV destination for the per-game samples
    #[arg(long)]
    out: PathBuf,
    /// Random inputs used to estimate the success probability
    #[arg(long, default_value_t = 100_000)]
    p_trials: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AnalyzeKind {
    Bounds,
    Table7,
    Entropy,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(value_enum)]
    kind: AnalyzeKind,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative distance ratio, e.g. 0.3238 (required when the config's degrees have no built-in value)
    #[arg(long)]
    delta1: Option<String>,
    /// Miner counts for `bounds`
    #[arg(long, value_delimiter = ',', default_value = "1,5,20")]
    miners: Vec<u64>,
    /// Largest n for `entropy`
    #[arg(long, default_value_t = 64)]
    max_n: u64,
}

#[derive(Subcommand, Debug)]
enum ChainCommand {
    /// Check linkage, header invariants and puzzles of a chain file
    Validate(ChainArgs),
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Mine(a) => cmd_mine(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Pcm(a) => cmd_pcm(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Chain(ChainCommand::Validate(a)) => cmd_chain_validate(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn load_config(path: &Path) -> Result<ChainConfig> {
    ChainConfig::load(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, dest: Option<&Path>, text: &str) -> Result<()> {
    match dest {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Template timestamp of the block after `chain`: the parent's timestamp
/// plus the cycles a sequential sweep from nonce 0 spent on it.
fn next_mined_timestamp(chain: &[Block]) -> u64 {
    chain
        .last()
        .map_or(GENESIS_TIMESTAMP, |b| b.header.timestamp + u64::from(b.header.nonce) + 1)
}

fn cmd_mine(a: &MineArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.files.config)?;
    let mut chain = read_chain(&a.files.chain)?;
    let params = cfg.decoder_params();
    for _ in 0..a.blocks {
        let height = chain.len() as u64;
        let ts = next_mined_timestamp(&chain);
        let mut template = block_template(&cfg, &chain, ts, synthetic_merkle_root(a.seed, height));
        let h = build_pcm_from_seed(
            crate::headerchain::seed_from_prev_hash(&template.prev_hash),
            template.code_params(),
        )?;
        let solution = loop {
            match solve_parallel(&template, &h, params, a.workers, NONCE_SPACE)? {
                SolveOutcome::Solved(s) => break s,
                SolveOutcome::Exhausted { .. } => {
                    writeln!(err, "block {height}: nonce space exhausted, refreshing timestamp")?;
                    template = refresh_template(&template, template.timestamp + 1);
                }
            }
        };
        let block = Block {
            header: template.with_nonce(solution.nonce),
            height,
            solution_word: solution.word,
        };
        append_block(&a.files.chain, &block)?;
        writeln!(
            out,
            "height={height} n={} nonce={} cycles={} hash={}",
            block.header.code_length,
            solution.nonce,
            solution.cycles_spent,
            header_hash(&block.header)
        )?;
        chain.push(block);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &ChainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let chain = read_chain(&a.chain)?;
    let mut failures = 0;
    for b in &chain {
        match verify_detailed(&b.header, &cfg) {
            Verification::Valid(_) => writeln!(out, "height={} valid", b.height)?,
            Verification::PuzzleFailed(_) => {
                failures += 1;
                writeln!(out, "height={} invalid", b.height)?;
                writeln!(err, "block {}: decoder output is not a codeword", b.height)?;
            }
            Verification::ParameterMismatch(reason) => {
                failures += 1;
                writeln!(out, "height={} invalid", b.height)?;
                writeln!(err, "block {}: {reason}", b.height)?;
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_pcm(a: &PcmArgs, out: &mut dyn Write) -> Result<i32> {
    let prev_hash = Hash256::from_hex(&a.prev_hash)?;
    let params = CodeParams::new(a.n, a.wc, a.wr)?;
    let h = build_pcm_from_seed(crate::headerchain::seed_from_prev_hash(&prev_hash), params)?;
    let text = match a.format {
        PcmFormat::Indices => h.render_indices(),
        PcmFormat::Dense => h.render_dense(),
    };
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let opts = ExperimentOptions {
        p_trials: a.p_trials,
        ..Default::default()
    };
    let reports = run_experiment(&cfg, a.games, &a.miners, a.seed, opts)?;
    std::fs::write(&a.out, samples_csv(&reports))?;
    writeln!(out, "seed={}", a.seed)?;
    writeln!(out, "samples_csv={}", a.out.display())?;
    for r in &reports {
        out.write_all(r.render().as_bytes())?;
    }
    Ok(EXIT_OK)
}

/// Parses a decimal such as `0.3238` into an exact ratio.
fn parse_decimal_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Config(format!("invalid delta1 '{s}'"));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
    let r = Ratio::new(num, den);
    if r <= Ratio::from_integer(0) || r >= Ratio::new(1, 2) {
        return Err(Error::Config(format!("delta1 {s} must lie in (0, 1/2)")));
    }
    Ok(r)
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let text = match a.kind {
        AnalyzeKind::Bounds => {
            let delta1 = match &a.delta1 {
                Some(s) => parse_decimal_ratio(s)?,
                None => delta1_for(cfg.w_c, cfg.w_r).ok_or_else(|| {
                    Error::Config(format!(
                        "no built-in delta1 for (w_c, w_r) = ({}, {}); pass --delta1",
                        cfg.w_c, cfg.w_r
                    ))
                })?,
            };
            let lengths: Vec<u64> = cfg.difficulty_levels.iter().map(|&n| u64::from(n)).collect();
            bounds_csv(&bounds_rows(&lengths, cfg.w_c, cfg.w_r, delta1, &a.miners)?)
        }
        AnalyzeKind::Table7 => table7_report(&table7_rows()?),
        AnalyzeKind::Entropy => {
            let grid = entropy_grid(a.max_n);
            let failures = grid.iter().filter(|c| !c.holds).count();
            emit(out, a.out.as_deref(), &entropy_grid_csv(&grid))?;
            return Ok(if failures == 0 { EXIT_OK } else { EXIT_FAILURE });
        }
    };
    emit(out, a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_chain_validate(a: &ChainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let chain = read_chain(&a.chain)?;
    let report = validate_chain(&chain, &cfg);
    out.write_all(report.render().as_bytes())?;
    if let Some(f) = report.first_failure() {
        writeln!(err, "chain invalid at height {}: {}", f.height, f.diagnostics.join("; "))?;
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}
