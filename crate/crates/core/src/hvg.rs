//! Hash-vector generation: the decoder input derived from the current block
//! header.
//!
//! The first segment is `s_1 = SHA256(header bytes)`; further segments are
//! chained, `s_u = SHA256(s_{u-1})`. The vector is the first `n` bits of
//! `s_1 | s_2 | ...`, most significant bit of each byte first.

use sha2::{Digest, Sha256};

use crate::bits::unpack_bits;
use crate::headerchain::{serialize_header, BlockHeader};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashVector {
    pub bits: Vec<u8>,
    /// Number of SHA-256 digests consumed, counting a partial last one.
    pub segments_used: usize,
}

impl HashVector {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

pub fn build_hash_vector(header: &BlockHeader, n: usize) -> HashVector {
    let segments = n.div_ceil(256);
    let mut stream = Vec::with_capacity(segments * 32);
    let mut seg: [u8; 32] = Sha256::digest(serialize_header(header)).into();
    stream.extend_from_slice(&seg);
    for _ in 1..segments {
        seg = Sha256::digest(seg).into();
        stream.extend_from_slice(&seg);
    }
    HashVector {
        bits: unpack_bits(&stream, n),
        segments_used: segments,
    }
}
