//! Block headers, their canonical byte layout, chain configuration and the
//! chain store.
//!
//! The header carries the code parameters `(n, w_c, w_r)` directly; there is
//! no separate difficulty field. Difficulty is raised by moving `n` up the
//! configured ladder of code lengths.

mod config;
mod store;
mod validate;

use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use config::ChainConfig;
pub use store::{append_block, read_chain, read_chain_from, write_chain, BlockRecord};
pub use validate::{validate_chain, BlockCheck, ValidationReport};

/// Size of the canonical header serialization in bytes.
pub const HEADER_BYTES: usize = 88;

/// Largest code length accepted in a header.
pub const MAX_CODE_LENGTH: u32 = 8192;

/// A 32-byte SHA-256 digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Hash256(pub [u8; 32]);

impl Hash256 {
    pub const ZERO: Hash256 = Hash256([0u8; 32]);

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s.trim(), &mut out)
            .map_err(|e| Error::Parameter(format!("bad 32-byte hex digest {s:?}: {e}")))?;
        Ok(Hash256(out))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn sha256(data: &[u8]) -> Self {
        Hash256(Sha256::digest(data).into())
    }
}

impl fmt::Debug for Hash256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hash256({})", self.to_hex())
    }
}

impl fmt::Display for Hash256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Regular LDPC code parameters: length `n`, column degree `w_c`, row degree `w_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub n: usize,
    pub w_c: usize,
    pub w_r: usize,
}

impl CodeParams {
    pub fn new(n: usize, w_c: usize, w_r: usize) -> Result<Self> {
        let params = CodeParams { n, w_c, w_r };
        params.validate()?;
        Ok(params)
    }

    /// Checks `w_c >= 3`, `w_r > w_c`, `w_r | n` and `w_r <= n <= 8192`.
    pub fn validate(&self) -> Result<()> {
        let CodeParams { n, w_c, w_r } = *self;
        if w_c < 3 {
            return Err(Error::Parameter(format!("column degree {w_c} < 3")));
        }
        if w_r <= w_c {
            return Err(Error::Parameter(format!(
                "row degree {w_r} must exceed column degree {w_c}"
            )));
        }
        if n < w_r {
            return Err(Error::Parameter(format!("code length {n} < row degree {w_r}")));
        }
        if n % w_r != 0 {
            return Err(Error::Parameter(format!(
                "row degree {w_r} does not divide code length {n}"
            )));
        }
        if n > MAX_CODE_LENGTH as usize {
            return Err(Error::Parameter(format!(
                "code length {n} exceeds cap {MAX_CODE_LENGTH}"
            )));
        }
        Ok(())
    }

    /// Number of parity checks, `m = n * w_c / w_r`.
    pub fn checks(&self) -> usize {
        self.n * self.w_c / self.w_r
    }
}

/// The eight consensus fields of a block header.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BlockHeader {
    pub version: u32,
    pub prev_hash: Hash256,
    /// Opaque; no Merkle tree is computed here.
    pub merkle_root: Hash256,
    /// Unix seconds.
    pub timestamp: u64,
    pub code_length: u32,
    pub col_degree: u16,
    pub row_degree: u16,
    pub nonce: u32,
}

impl BlockHeader {
    pub fn code_params(&self) -> CodeParams {
        CodeParams {
            n: self.code_length as usize,
            w_c: self.col_degree as usize,
            w_r: self.row_degree as usize,
        }
    }

    /// Checks the header invariants on the code parameters.
    pub fn validate(&self) -> Result<()> {
        self.code_params()
            .validate()
            .map_err(|e| Error::InvalidHeader(e.to_string()))
    }

    pub fn with_nonce(&self, nonce: u32) -> BlockHeader {
        BlockHeader {
            nonce,
            ..self.clone()
        }
    }

    /// Canonical serialization, see [`serialize_header`].
    pub fn to_bytes(&self) -> [u8; HEADER_BYTES] {
        serialize_header(self)
    }

    pub fn hash(&self) -> Hash256 {
        header_hash(self)
    }
}

/// Big-endian fixed-width layout:
/// `version(4) | prev_hash(32) | merkle_root(32) | timestamp(8) | n(4) | w_c(2) | w_r(2) | nonce(4)`.
///
/// Serialization itself never fails; use [`BlockHeader::validate`] to check
/// the consensus invariants.
pub fn serialize_header(h: &BlockHeader) -> [u8; HEADER_BYTES] {
    let mut out = [0u8; HEADER_BYTES];
    out[0..4].copy_from_slice(&h.version.to_be_bytes());
    out[4..36].copy_from_slice(&h.prev_hash.0);
    out[36..68].copy_from_slice(&h.merkle_root.0);
    out[68..76].copy_from_slice(&h.timestamp.to_be_bytes());
    out[76..80].copy_from_slice(&h.code_length.to_be_bytes());
    out[80..82].copy_from_slice(&h.col_degree.to_be_bytes());
    out[82..84].copy_from_slice(&h.row_degree.to_be_bytes());
    out[84..88].copy_from_slice(&h.nonce.to_be_bytes());
    out
}

/// Inverse of [`serialize_header`].
pub fn deserialize_header(bytes: &[u8; HEADER_BYTES]) -> BlockHeader {
    let mut prev_hash = [0u8; 32];
    let mut merkle_root = [0u8; 32];
    prev_hash.copy_from_slice(&bytes[4..36]);
    merkle_root.copy_from_slice(&bytes[36..68]);
    BlockHeader {
        version: u32::from_be_bytes(bytes[0..4].try_into().unwrap()),
        prev_hash: Hash256(prev_hash),
        merkle_root: Hash256(merkle_root),
        timestamp: u64::from_be_bytes(bytes[68..76].try_into().unwrap()),
        code_length: u32::from_be_bytes(bytes[76..80].try_into().unwrap()),
        col_degree: u16::from_be_bytes(bytes[80..82].try_into().unwrap()),
        row_degree: u16::from_be_bytes(bytes[82..84].try_into().unwrap()),
        nonce: u32::from_be_bytes(bytes[84..88].try_into().unwrap()),
    }
}

/// SHA-256 of the canonical serialization. This is the first hash-vector
/// segment for the header itself and the PCM seed source for its child.
pub fn header_hash(h: &BlockHeader) -> Hash256 {
    Hash256::sha256(&serialize_header(h))
}

/// Byte sum of the previous block hash, in `0..=8160`.
///
/// Any permutation of the digest bytes gives the same seed.
pub fn seed_from_prev_hash(prev_hash: &Hash256) -> i64 {
    prev_hash.0.iter().map(|&b| i64::from(b)).sum()
}

/// A mined block as stored in the chain file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub header: BlockHeader,
    pub height: u64,
    /// Decoder output recorded when the block was mined. Audit data only;
    /// verification always recomputes it.
    pub solution_word: Vec<u8>,
}
