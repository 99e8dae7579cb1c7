use std::path::Path;
use std::process::{Command, Output};

use eccpow::headerchain::ChainConfig;

fn eccpow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eccpow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, cfg: &ChainConfig) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_config() -> ChainConfig {
    ChainConfig {
        difficulty_levels: vec![24, 48],
        retarget_window: 4,
        ..ChainConfig::default()
    }
}

#[test]
fn mine_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config());
    let chain = dir.path().join("chain.jsonl");
    let chain = chain.to_str().unwrap();

    let out = eccpow(&["mine", "--config", &cfg, "--chain", chain, "--blocks", "5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 5);
    // appending continues the same chain
    let out = eccpow(&["mine", "--config", &cfg, "--chain", chain, "--blocks", "3", "--workers", "3", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(chain).unwrap().lines().count(), 8);

    let out = eccpow(&["verify", "--config", &cfg, "--chain", chain]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).lines().all(|l| l.ends_with("valid") && !l.ends_with("invalid")));
    assert_eq!(eccpow(&["chain", "validate", "--config", &cfg, "--chain", chain]).status.code(), Some(0));
}

#[test]
fn mining_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config());
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    eccpow(&["mine", "--config", &cfg, "--chain", a.to_str().unwrap(), "--blocks", "6", "--workers", "1"]);
    eccpow(&["mine", "--config", &cfg, "--chain", b.to_str().unwrap(), "--blocks", "6", "--workers", "4"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn edited_nonce_digit_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config());
    let chain = dir.path().join("chain.jsonl");
    eccpow(&["mine", "--config", &cfg, "--chain", chain.to_str().unwrap(), "--blocks", "12", "--seed", "1"]);
    let text = std::fs::read_to_string(&chain).unwrap();

    let mut rejected = 0;
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        let mut rec: serde_json::Value = serde_json::from_str(line).unwrap();
        let nonce = rec["nonce"].as_u64().unwrap();
        // change the last decimal digit
        rec["nonce"] = (nonce - nonce % 10 + (nonce % 10 + 1) % 10).into();
        let mut edited = lines.clone();
        let replaced = rec.to_string();
        edited[i] = &replaced;
        let path = dir.path().join(format!("edited-{i}.jsonl"));
        std::fs::write(&path, edited.join("\n") + "\n").unwrap();
        let code = eccpow(&["verify", "--config", &cfg, "--chain", path.to_str().unwrap()]).status.code();
        assert!(matches!(code, Some(0) | Some(1)));
        rejected += usize::from(code == Some(1));
    }
    // each edit survives with probability about p (~0.15 at n = 24), far less at n = 48
    assert!(rejected >= 8, "only {rejected}/12 edits rejected");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"w_c": 3}"#).unwrap();
    let chain = dir.path().join("c.jsonl");
    let out = eccpow(&["verify", "--config", bad.to_str().unwrap(), "--chain", chain.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let cfg = write_config(
        dir.path(),
        &ChainConfig {
            difficulty_levels: vec![48, 24],
            ..ChainConfig::default()
        },
    );
    assert_eq!(
        eccpow(&["chain", "validate", "--config", &cfg, "--chain", chain.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn pcm_subcommand() {
    let zero = "00".repeat(32);
    let out = eccpow(&["pcm", "--prev-hash", &zero, "--n", "24", "--wc", "3", "--wr", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    // first block is the base pattern
    assert_eq!(text.lines().next().unwrap(), "0 1 2 3 4 5");
    let out = eccpow(&["pcm", "--prev-hash", &zero, "--n", "10", "--wc", "3", "--wr", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn simulate_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config());
    let csv = dir.path().join("fshc.csv");
    let args = [
        "simulate", "--config", &cfg, "--games", "300", "--miners", "1,3", "--seed", "4", "--out",
        csv.to_str().unwrap(), "--p-trials", "20000",
    ];
    let out = eccpow(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.lines().all(|l| l.contains('=')));
    assert!(report.contains("M=1\n") && report.contains("M=3\n"));
    assert!(report.contains("gof_p_value="));
    let samples = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(samples.lines().next(), Some("game_id,M,fshc"));
    assert_eq!(samples.lines().count(), 601);

    let again = dir.path().join("again.csv");
    let mut args2 = args;
    args2[10] = again.to_str().unwrap();
    eccpow(&args2);
    assert_eq!(samples, std::fs::read_to_string(&again).unwrap());

    let few = eccpow(&["simulate", "--config", &cfg, "--games", "10", "--miners", "1", "--seed", "4", "--out", csv.to_str().unwrap()]);
    assert_eq!(few.status.code(), Some(2));
}

#[test]
fn analyze_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg45 = write_config(
        dir.path(),
        &ChainConfig {
            w_c: 4,
            w_r: 5,
            difficulty_levels: vec![80, 120, 160],
            ..ChainConfig::default()
        },
    );
    let out = eccpow(&["analyze", "--config", &cfg45, "bounds"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("n,k,wc,wr,delta1,M,bound,mean,variance"));
    assert_eq!(csv.lines().count(), 10);

    let out = eccpow(&["analyze", "--config", &cfg45, "table7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("bound(1)/bound(20)"));

    let dest = dir.path().join("entropy.csv");
    let out = eccpow(&["analyze", "--config", &cfg45, "entropy", "--out", dest.to_str().unwrap(), "--max-n", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let grid = std::fs::read_to_string(&dest).unwrap();
    assert!(grid.starts_with("n,k,log2_ball,n_entropy,holds\n"));
    assert!(grid.lines().skip(1).all(|l| l.ends_with(",true")));

    // no built-in delta1 for (3, 6)
    let dir36 = tempfile::tempdir().unwrap();
    let cfg36 = write_config(dir36.path(), &ChainConfig::default());
    assert_eq!(eccpow(&["analyze", "--config", &cfg36, "bounds"]).status.code(), Some(2));
    assert_eq!(
        eccpow(&["analyze", "--config", &cfg36, "bounds", "--delta1", "0.2"]).status.code(),
        Some(0)
    );
}
