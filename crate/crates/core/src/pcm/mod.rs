//! Time-variant parity-check matrices.
//!
//! H stacks `w_c` blocks of size `(n / w_r) x n`: the base block `A`, whose
//! row `i` covers columns `i*w_r .. (i+1)*w_r`, followed by `w_c - 1` column
//! permutations of `A`. Permutation `i` (1-based) is seeded with `S - i + 1`
//! where `S` is the byte sum of the previous block hash, so any verifier can
//! rebuild H from the header alone while H changes from block to block.

mod gf2;
mod permutation;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::headerchain::{seed_from_prev_hash, CodeParams, Hash256};

pub use gf2::{
    correctable_errors, derive_generator, gf2_rank, min_distance_bruteforce, GeneratorMatrix,
    MAX_ENUMERATION_DIMENSION,
};
pub use permutation::{seeded_permutation, SeedStream};

/// Sparse binary matrix with the adjacency tables the decoder walks.
///
/// Edges are numbered row-major: the ones of row 0 first, in ascending
/// column order, then row 1, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    rows: Vec<Vec<u32>>,
    row_ptr: Vec<usize>,
    edge_col: Vec<u32>,
    col_edges: Vec<Vec<u32>>,
    params: Option<CodeParams>,
    source_seed: Option<i64>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from per-row column indices. Indices are sorted and
    /// must be distinct and `< n`.
    pub fn from_rows(n: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parameter(format!("row {i} repeats a column index")));
            }
            if let Some(&last) = row.last() {
                if last as usize >= n {
                    return Err(Error::Parameter(format!(
                        "row {i} has column {last} >= n = {n}"
                    )));
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut edge_col = Vec::new();
        let mut col_edges = vec![Vec::new(); n];
        row_ptr.push(0);
        for row in &rows {
            for &c in row {
                col_edges[c as usize].push(edge_col.len() as u32);
                edge_col.push(c);
            }
            row_ptr.push(edge_col.len());
        }
        Ok(ParityCheckMatrix {
            n,
            rows,
            row_ptr,
            edge_col,
            col_edges,
            params: None,
            source_seed: None,
        })
    }

    /// Builds a matrix from dense 0/1 rows.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != n) {
            return Err(Error::Parameter("ragged dense matrix".into()));
        }
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(j, _)| j as u32)
                    .collect()
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    /// Code parameters when the matrix came from [`build_pcm`].
    pub fn params(&self) -> Option<CodeParams> {
        self.params
    }

    /// Seed `S` when the matrix came from [`build_pcm`].
    pub fn source_seed(&self) -> Option<i64> {
        self.source_seed
    }

    pub fn num_edges(&self) -> usize {
        self.edge_col.len()
    }

    /// Edge index range of row `i`.
    pub(crate) fn row_edges(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub(crate) fn edge_col(&self, e: usize) -> usize {
        self.edge_col[e] as usize
    }

    pub(crate) fn col_edges(&self, j: usize) -> &[u32] {
        &self.col_edges[j]
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        self.col_edges.iter().map(Vec::len).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].binary_search(&(col as u32)).is_ok()
    }

    /// `H x` over GF(2).
    pub fn syndrome(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (x[c as usize] & 1)))
            .collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![0u8; self.n];
                for &c in row {
                    d[c as usize] = 1;
                }
                d
            })
            .collect()
    }

    /// One line per row: space-separated column indices.
    pub fn render_indices(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    /// One line per row of `0`/`1` characters.
    pub fn render_dense(&self) -> String {
        let mut out = String::new();
        for row in self.to_dense() {
            let line: String = row.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
            writeln!(out, "{line}").unwrap();
        }
        out
    }
}

/// Rows of the base block: row `i` has ones in columns `i*w_r .. (i+1)*w_r`.
pub fn base_matrix(n: usize, w_r: usize) -> Result<Vec<Vec<u32>>> {
    if w_r == 0 || n == 0 || !n.is_multiple_of(w_r) {
        return Err(Error::Parameter(format!(
            "row degree {w_r} does not divide code length {n}"
        )));
    }
    Ok((0..n / w_r)
        .map(|i| ((i * w_r) as u32..((i + 1) * w_r) as u32).collect())
        .collect())
}

/// Column permutation of the base block: entry `(r, j)` is `A(r, perm[j])`.
fn permuted_block(perm: &[u32], n: usize, w_r: usize) -> Vec<Vec<u32>> {
    let mut rows = vec![Vec::with_capacity(w_r); n / w_r];
    for (j, &src) in perm.iter().enumerate() {
        rows[src as usize / w_r].push(j as u32);
    }
    rows
}

/// Builds the parity-check matrix for a block whose parent hashes to `prev_hash`.
pub fn build_pcm(prev_hash: &Hash256, n: usize, w_c: usize, w_r: usize) -> Result<ParityCheckMatrix> {
    let params = CodeParams::new(n, w_c, w_r)?;
    let seed = seed_from_prev_hash(prev_hash);
    build_pcm_from_seed(seed, params)
}

/// As [`build_pcm`], starting from the seed `S` directly.
pub fn build_pcm_from_seed(seed: i64, params: CodeParams) -> Result<ParityCheckMatrix> {
    params.validate()?;
    let CodeParams { n, w_c, w_r } = params;
    let mut rows = base_matrix(n, w_r)?;
    rows.reserve(params.checks() - rows.len());
    for i in 1..w_c as i64 {
        let perm = seeded_permutation(seed - i + 1, n);
        rows.extend(permuted_block(&perm, n, w_r));
    }
    let mut h = ParityCheckMatrix::from_rows(n, rows)?;
    h.params = Some(params);
    h.source_seed = Some(seed);
    Ok(h)
}
