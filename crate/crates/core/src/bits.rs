//! Bit vectors are plain `Vec<u8>` holding 0/1 values; these helpers pack
//! them MSB-first for storage and hashing.

/// Packs 0/1 values MSB-first; the final byte is zero-padded.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Takes the first `n` bits of `bytes`, MSB-first.
pub fn unpack_bits(bytes: &[u8], n: usize) -> Vec<u8> {
    (0..n).map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1).collect()
}

pub fn hamming_weight(bits: &[u8]) -> usize {
    bits.iter().filter(|&&b| b != 0).count()
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
