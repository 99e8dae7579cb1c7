//! Error-correction-code proof-of-work.
//!
//! Each block's puzzle is an LDPC decoding problem: the parity-check matrix is
//! rebuilt from the previous block hash, the decoder input is a hash vector of
//! the current header, and a nonce solves the block when the decoder output is
//! a codeword. Besides mining and verification the crate carries the
//! analysis tools used to study success probability and block times.

pub mod analysis;
pub mod bits;
pub mod cli;
pub mod decoder;
pub mod error;
pub mod headerchain;
pub mod hvg;
pub mod pcm;
pub mod puzzle;
pub mod sim;

pub use error::{Error, Result};
