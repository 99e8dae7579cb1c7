use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BlockHeader, CodeParams};
use crate::decoder::DecoderParams;
use crate::error::{Error, Result};

/// Published protocol constants shared by every miner and verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub w_c: u16,
    pub w_r: u16,
    /// Admissible code lengths, easiest first.
    pub difficulty_levels: Vec<u32>,
    pub max_iter: u32,
    pub epsilon_num: u32,
    pub epsilon_den: u32,
    pub llr_scale: u32,
    pub retarget_window: u64,
    pub target_block_seconds: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            w_c: 3,
            w_r: 6,
            difficulty_levels: vec![24, 48, 96, 192],
            max_iter: 20,
            epsilon_num: 1,
            epsilon_den: 4,
            llr_scale: 8,
            retarget_window: 10,
            target_block_seconds: 60,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.difficulty_levels.is_empty() {
            return Err(Error::Config("difficulty_levels is empty".into()));
        }
        if !self.difficulty_levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "difficulty_levels must be strictly increasing".into(),
            ));
        }
        for &n in &self.difficulty_levels {
            CodeParams {
                n: n as usize,
                w_c: self.w_c as usize,
                w_r: self.w_r as usize,
            }
            .validate()
            .map_err(|e| Error::Config(format!("difficulty level {n}: {e}")))?;
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if self.llr_scale == 0 {
            return Err(Error::Config("llr_scale must be positive".into()));
        }
        if self.retarget_window == 0 {
            return Err(Error::Config("retarget_window must be positive".into()));
        }
        if self.target_block_seconds == 0 {
            return Err(Error::Config("target_block_seconds must be positive".into()));
        }
        // 0 < num/den < 1/2
        if self.epsilon_num == 0
            || self.epsilon_den == 0
            || 2 * u64::from(self.epsilon_num) >= u64::from(self.epsilon_den)
        {
            return Err(Error::Config(format!(
                "epsilon {}/{} outside (0, 1/2)",
                self.epsilon_num, self.epsilon_den
            )));
        }
        Ok(())
    }

    pub fn decoder_params(&self) -> DecoderParams {
        DecoderParams {
            max_iter: self.max_iter,
            epsilon_num: self.epsilon_num,
            epsilon_den: self.epsilon_den,
            llr_scale: self.llr_scale,
        }
    }

    pub fn code_params(&self, n: u32) -> CodeParams {
        CodeParams {
            n: n as usize,
            w_c: self.w_c as usize,
            w_r: self.w_r as usize,
        }
    }

    /// True when the header's `(n, w_c, w_r)` is one of the configured levels.
    pub fn admits(&self, header: &BlockHeader) -> bool {
        header.col_degree == self.w_c
            && header.row_degree == self.w_r
            && self.difficulty_levels.contains(&header.code_length)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ChainConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
