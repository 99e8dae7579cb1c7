//! Append-only chain file: one JSON object per line.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Block, BlockHeader, Hash256};
use crate::bits::{pack_bits, unpack_bits};
use crate::error::{Error, Result};

/// On-disk form of a [`Block`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub height: u64,
    pub version: u32,
    pub prev_hash: String,
    pub merkle_root: String,
    pub timestamp: u64,
    pub n: u32,
    pub wc: u16,
    pub wr: u16,
    pub nonce: u32,
    pub solution_word: String,
}

impl From<&Block> for BlockRecord {
    fn from(b: &Block) -> Self {
        let h = &b.header;
        BlockRecord {
            height: b.height,
            version: h.version,
            prev_hash: h.prev_hash.to_hex(),
            merkle_root: h.merkle_root.to_hex(),
            timestamp: h.timestamp,
            n: h.code_length,
            wc: h.col_degree,
            wr: h.row_degree,
            nonce: h.nonce,
            solution_word: hex::encode(pack_bits(&b.solution_word)),
        }
    }
}

impl BlockRecord {
    pub fn into_block(self) -> Result<Block> {
        let header = BlockHeader {
            version: self.version,
            prev_hash: Hash256::from_hex(&self.prev_hash)?,
            merkle_root: Hash256::from_hex(&self.merkle_root)?,
            timestamp: self.timestamp,
            code_length: self.n,
            col_degree: self.wc,
            row_degree: self.wr,
            nonce: self.nonce,
        };
        let packed = hex::decode(&self.solution_word)
            .map_err(|e| Error::Parameter(format!("solution_word: {e}")))?;
        // audit metadata only: a length that disagrees with n is left for
        // validation to flag rather than rejected as a malformed record
        let bits = (self.n as usize).min(packed.len() * 8);
        Ok(Block {
            header,
            height: self.height,
            solution_word: unpack_bits(&packed, bits),
        })
    }
}

pub fn read_chain_from<R: Read>(reader: R) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: BlockRecord = serde_json::from_str(&line).map_err(|e| Error::ChainFormat {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        let block = record.into_block().map_err(|e| Error::ChainFormat {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        blocks.push(block);
    }
    Ok(blocks)
}

/// Reads a chain file; a missing file is an empty chain.
pub fn read_chain(path: &Path) -> Result<Vec<Block>> {
    match std::fs::File::open(path) {
        Ok(f) => read_chain_from(f),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

pub fn write_chain<W: Write>(mut writer: W, blocks: &[Block]) -> Result<()> {
    for b in blocks {
        let line = serde_json::to_string(&BlockRecord::from(b)).expect("record serializes");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

pub fn append_block(path: &Path, block: &Block) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    write_chain(&mut f, std::slice::from_ref(block))?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block() -> Block {
        Block {
            header: BlockHeader {
                version: 1,
                prev_hash: Hash256([3u8; 32]),
                merkle_root: Hash256([4u8; 32]),
                timestamp: 17,
                code_length: 12,
                col_degree: 3,
                row_degree: 4,
                nonce: 99,
            },
            height: 5,
            solution_word: vec![1, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 1],
        }
    }

    #[test]
    fn record_line_round_trip() {
        let mut buf = Vec::new();
        write_chain(&mut buf, &[block(), block()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("\"solution_word\":\"b090\""));
        assert_eq!(read_chain_from(&buf[..]).unwrap(), vec![block(), block()]);
    }

    #[test]
    fn malformed_line_reports_position() {
        let mut buf = Vec::new();
        write_chain(&mut buf, &[block()]).unwrap();
        buf.extend_from_slice(b"{\"height\": 1}\n");
        match read_chain_from(&buf[..]) {
            Err(Error::ChainFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_file_is_empty_chain() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chain.jsonl");
        assert!(read_chain(&path).unwrap().is_empty());
        append_block(&path, &block()).unwrap();
        append_block(&path, &block()).unwrap();
        assert_eq!(read_chain(&path).unwrap().len(), 2);
    }
}
