use super::{header_hash, Block, ChainConfig, Hash256};
use crate::puzzle::{verify_detailed, Verification};

/// Per-block outcome of [`validate_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCheck {
    pub height: u64,
    pub linkage_ok: bool,
    pub header_ok: bool,
    pub puzzle_ok: bool,
    pub diagnostics: Vec<String>,
    /// Non-fatal observations (timestamp regressions, stale audit words).
    pub warnings: Vec<String>,
}

impl BlockCheck {
    pub fn is_valid(&self) -> bool {
        self.linkage_ok && self.header_ok && self.puzzle_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub blocks: Vec<BlockCheck>,
}

impl ValidationReport {
    /// A chain is valid iff every block passes; the empty chain is valid.
    pub fn is_valid(&self) -> bool {
        self.blocks.iter().all(BlockCheck::is_valid)
    }

    pub fn first_failure(&self) -> Option<&BlockCheck> {
        self.blocks.iter().find(|b| !b.is_valid())
    }

    /// One line per block: `height linkage header puzzle [diagnostics]`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
        for b in &self.blocks {
            out.push_str(&format!(
                "block {} linkage={} header={} puzzle={}",
                b.height,
                flag(b.linkage_ok),
                flag(b.header_ok),
                flag(b.puzzle_ok)
            ));
            for d in &b.diagnostics {
                out.push_str(&format!(" | {d}"));
            }
            for w in &b.warnings {
                out.push_str(&format!(" | warning: {w}"));
            }
            out.push('\n');
        }
        out.push_str(if self.is_valid() { "chain valid\n" } else { "chain INVALID\n" });
        out
    }
}

/// Checks linkage, header invariants and the puzzle for every block.
///
/// Genesis must sit at height 0 with an all-zero parent hash; every later
/// block must reference the hash of its predecessor's header.
pub fn validate_chain(blocks: &[Block], cfg: &ChainConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (idx, block) in blocks.iter().enumerate() {
        let mut check = BlockCheck {
            height: block.height,
            linkage_ok: true,
            header_ok: true,
            puzzle_ok: true,
            diagnostics: Vec::new(),
            warnings: Vec::new(),
        };
        let header = &block.header;

        if block.height != idx as u64 {
            check.linkage_ok = false;
            check.diagnostics.push(format!("height {} at position {idx}", block.height));
        }
        let expected_parent = match idx {
            0 => Hash256::ZERO,
            _ => header_hash(&blocks[idx - 1].header),
        };
        if header.prev_hash != expected_parent {
            check.linkage_ok = false;
            check.diagnostics.push(format!(
                "prev_hash {} does not match parent hash {expected_parent}",
                header.prev_hash
            ));
        }
        if idx > 0 && header.timestamp < blocks[idx - 1].header.timestamp {
            check.warnings.push(format!(
                "timestamp {} precedes parent timestamp {}",
                header.timestamp,
                blocks[idx - 1].header.timestamp
            ));
        }

        match verify_detailed(header, cfg) {
            Verification::Valid(out) => {
                if out.word != block.solution_word {
                    check.warnings.push("stored solution_word differs from recomputed codeword".into());
                }
            }
            Verification::PuzzleFailed(_) => {
                check.puzzle_ok = false;
                check.diagnostics.push("decoder output is not a codeword".into());
            }
            Verification::ParameterMismatch(reason) => {
                check.header_ok = false;
                check.puzzle_ok = false;
                check.diagnostics.push(reason);
            }
        }
        if !check.warnings.is_empty() {
            for w in &check.warnings {
                log::warn!("block {}: {w}", block.height);
            }
        }
        report.blocks.push(check);
    }
    report
}
