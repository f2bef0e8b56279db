//! Linear algebra over GF(2).
//!
//! Matrices are stored sparsely as sorted per-row supports. Elimination
//! routines convert to a dense bit-packed form internally.

use std::fmt;

use crate::error::{Error, Result};

/// Binary matrix stored as the sorted column support of every row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<usize>>,
}

impl fmt::Debug for SparseBinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SparseBinaryMatrix({}x{}, {} ones)",
            self.n_rows,
            self.n_cols,
            self.num_ones()
        )
    }
}

impl SparseBinaryMatrix {
    /// All-zero matrix.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseBinaryMatrix {
            n_rows,
            n_cols,
            rows: vec![Vec::new(); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseBinaryMatrix {
            n_rows: n,
            n_cols: n,
            rows: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from row supports. Supports are sorted; duplicate or
    /// out-of-range column indices are rejected.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            validate_support(row, n_cols).map_err(|e| match e {
                Error::InvalidArgument(msg) => Error::invalid(format!("row {i}: {msg}")),
                other => other,
            })?;
        }
        Ok(SparseBinaryMatrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        })
    }

    /// Builds a matrix from dense 0/1 rows of equal length.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n_cols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| {
                if r.len() != n_cols {
                    return Err(Error::DimensionMismatch {
                        expected: n_cols,
                        found: r.len(),
                    });
                }
                Ok(r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(j, _)| j)
                    .collect())
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        Ok(SparseBinaryMatrix {
            n_rows: dense.len(),
            n_cols,
            rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn num_ones(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Row indices of every column, in increasing order.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                cols[j].push(i);
            }
        }
        cols
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_cols];
        for row in &self.rows {
            for &j in row {
                w[j] += 1;
            }
        }
        w
    }

    pub fn transpose(&self) -> SparseBinaryMatrix {
        SparseBinaryMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows: self.columns(),
        }
    }

    /// Replaces the support of row `i`.
    pub fn set_row(&mut self, i: usize, support: Vec<usize>) -> Result<()> {
        if i >= self.n_rows {
            return Err(Error::invalid(format!(
                "row {i} out of range for {} rows",
                self.n_rows
            )));
        }
        let mut support = support;
        validate_support(&mut support, self.n_cols)?;
        self.rows[i] = support;
        Ok(())
    }

    pub fn push_row(&mut self, support: Vec<usize>) -> Result<()> {
        let mut support = support;
        validate_support(&mut support, self.n_cols)?;
        self.rows.push(support);
        self.n_rows += 1;
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![0u8; self.n_cols];
                for &j in row {
                    d[j] = 1;
                }
                d
            })
            .collect()
    }

    /// Syndrome `word · Hᵀ` as one bit per row.
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>> {
        self.check_len(word.len())?;
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &j| acc ^ (word[j] & 1)))
            .collect())
    }

    /// True when every check is satisfied by `word`.
    pub fn is_codeword(&self, word: &[u8]) -> Result<bool> {
        self.check_len(word.len())?;
        Ok(self
            .rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &j| acc ^ (word[j] & 1)) == 0))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: len,
            });
        }
        Ok(())
    }
}

fn validate_support(row: &mut [usize], n_cols: usize) -> Result<()> {
    row.sort_unstable();
    if let Some(&last) = row.last() {
        if last >= n_cols {
            return Err(Error::invalid(format!(
                "column index {last} out of range for {n_cols} columns"
            )));
        }
    }
    if row.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("duplicate column index"));
    }
    Ok(())
}

/// XOR of two sorted supports.
pub fn xor_supports(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Dense bit-packed rows used inside elimination.
#[derive(Clone)]
pub(crate) struct BitRows {
    words: usize,
    n_cols: usize,
    data: Vec<u64>,
}

impl BitRows {
    pub(crate) fn from_sparse(m: &SparseBinaryMatrix) -> Self {
        let mut b = BitRows::zeros(m.n_rows(), m.n_cols());
        for (i, row) in m.rows().iter().enumerate() {
            for &j in row {
                b.flip(i, j);
            }
        }
        b
    }

    pub(crate) fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let words = n_cols.div_ceil(64).max(1);
        BitRows {
            words,
            n_cols,
            data: vec![0; words * n_rows],
        }
    }

    pub(crate) fn n_rows(&self) -> usize {
        self.data.len() / self.words
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    pub(crate) fn flip(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] ^= 1 << (j % 64);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    /// row[dst] ^= row[src]
    fn add_row(&mut self, dst: usize, src: usize) {
        let (w, d, s) = (self.words, dst * self.words, src * self.words);
        for k in 0..w {
            let v = self.data[s + k];
            self.data[d + k] ^= v;
        }
    }

    fn push_row(&mut self, bits: &[u8]) {
        let start = self.data.len();
        self.data.resize(start + self.words, 0);
        for (j, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                self.data[start + j / 64] ^= 1 << (j % 64);
            }
        }
    }

    /// In-place Gauss-Jordan elimination visiting columns in `order`.
    /// Returns `(row, pivot column)` pairs in row order.
    fn reduce(&mut self, order: impl Iterator<Item = usize>) -> Vec<usize> {
        let n_rows = self.n_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in order {
            if r == n_rows {
                break;
            }
            let Some(p) = (r..n_rows).find(|&i| self.get(i, col)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..n_rows {
                if i != r && self.get(i, col) {
                    self.add_row(i, r);
                }
            }
            pivots.push(col);
            r += 1;
        }
        pivots
    }

    fn rank(mut self) -> usize {
        let n = self.n_cols;
        self.reduce(0..n).len()
    }
}

/// Rank over GF(2).
pub fn rank(m: &SparseBinaryMatrix) -> usize {
    BitRows::from_sparse(m).rank()
}

/// True iff `v` is a GF(2) combination of the rows of `m`.
pub fn row_space_contains(m: &SparseBinaryMatrix, v: &[u8]) -> Result<bool> {
    if v.len() != m.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: m.n_cols(),
            found: v.len(),
        });
    }
    if v.iter().all(|&b| b & 1 == 0) {
        return Ok(true);
    }
    let base = BitRows::from_sparse(m);
    let r0 = base.clone().rank();
    let mut ext = base;
    ext.push_row(v);
    Ok(ext.rank() == r0)
}

/// Same as [`row_space_contains`] for a sparse support.
pub fn row_space_contains_support(m: &SparseBinaryMatrix, support: &[usize]) -> Result<bool> {
    let mut v = vec![0u8; m.n_cols()];
    for &j in support {
        if j >= m.n_cols() {
            return Err(Error::invalid(format!("column {j} out of range")));
        }
        v[j] ^= 1;
    }
    row_space_contains(m, &v)
}

/// Systematic generator matrix of the code with parity-check matrix `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorForm {
    /// k × n generator in the original column order.
    pub generator: SparseBinaryMatrix,
    /// Column placed at each position of the `[I_k | P]` form: the
    /// systematic positions first, then the pivot (parity) columns.
    pub column_permutation: Vec<usize>,
    /// Increasing columns carrying the information bits.
    pub systematic_positions: Vec<usize>,
}

impl GeneratorForm {
    pub fn k(&self) -> usize {
        self.generator.n_rows()
    }

    pub fn n(&self) -> usize {
        self.generator.n_cols()
    }

    /// Encodes `u` as the XOR of the generator rows it selects.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: u.len(),
            });
        }
        let mut c = vec![0u8; self.n()];
        for (row, _) in self.generator.rows().iter().zip(u).filter(|(_, &b)| b & 1 == 1) {
            for &j in row {
                c[j] ^= 1;
            }
        }
        Ok(c)
    }

    /// Information bits read back from the systematic positions.
    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        self.systematic_positions
            .iter()
            .map(|&j| codeword[j])
            .collect()
    }
}

/// Gauss-Jordan reduction of `h` with pivots searched from the last column
/// towards the first, so that dual-diagonal parity parts end up as the
/// pivot set and the leading columns carry the information bits.
pub fn systematic_generator(h: &SparseBinaryMatrix) -> Result<GeneratorForm> {
    let m = h.n_rows();
    let n = h.n_cols();
    let mut a = BitRows::from_sparse(h);
    let pivots = a.reduce((0..n).rev());
    if pivots.len() < m {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            expected: m,
        });
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let systematic: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    let rows = systematic
        .iter()
        .map(|&f| {
            let mut support: Vec<usize> = pivots
                .iter()
                .enumerate()
                .filter(|&(r, _)| a.get(r, f))
                .map(|(_, &p)| p)
                .collect();
            support.push(f);
            support.sort_unstable();
            support
        })
        .collect();
    let generator = SparseBinaryMatrix {
        n_rows: systematic.len(),
        n_cols: n,
        rows,
    };
    let column_permutation = systematic.iter().chain(pivots.iter()).copied().collect();
    Ok(GeneratorForm {
        generator,
        column_permutation,
        systematic_positions: systematic,
    })
}

/// Keeps a maximal linearly independent subset of rows, in order.
pub fn independent_rows(h: &SparseBinaryMatrix) -> Vec<usize> {
    let words = h.n_cols().div_ceil(64).max(1);
    // echelon basis: (pivot column, packed row)
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut kept = Vec::new();
    for (i, row) in h.rows().iter().enumerate() {
        let mut v = vec![0u64; words];
        for &j in row {
            v[j / 64] ^= 1 << (j % 64);
        }
        for (p, b) in &basis {
            if (v[p / 64] >> (p % 64)) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
        if let Some(w) = v.iter().position(|&x| x != 0) {
            let pivot = w * 64 + v[w].trailing_zeros() as usize;
            // keep the basis fully reduced on its pivot columns
            for (_, b) in basis.iter_mut() {
                if (b[pivot / 64] >> (pivot % 64)) & 1 == 1 {
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x ^= y;
                    }
                }
            }
            basis.push((pivot, v));
            kept.push(i);
        }
    }
    kept
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn hamming74() -> SparseBinaryMatrix {
        SparseBinaryMatrix::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap()
    }

    fn enumerate(g: &GeneratorForm) -> Vec<Vec<u8>> {
        let k = g.k();
        (0..1u32 << k)
            .map(|m| {
                let u: Vec<u8> = (0..k).map(|i| ((m >> i) & 1) as u8).collect();
                g.encode(&u).unwrap()
            })
            .collect()
    }

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(rank(&SparseBinaryMatrix::identity(4)), 4);
        assert_eq!(rank(&SparseBinaryMatrix::zeros(3, 5)), 0);
        assert_eq!(rank(&hamming74()), 3);
    }

    #[test]
    fn from_rows_rejects_bad_support() {
        assert!(SparseBinaryMatrix::from_rows(4, vec![vec![1, 1]]).is_err());
        assert!(SparseBinaryMatrix::from_rows(4, vec![vec![4]]).is_err());
        let m = SparseBinaryMatrix::from_rows(4, vec![vec![3, 0]]).unwrap();
        assert_eq!(m.row(0), &[0, 3]);
    }

    #[test]
    fn row_space_membership() {
        let h = hamming74();
        for row in h.to_dense() {
            assert!(row_space_contains(&h, &row).unwrap());
        }
        assert!(row_space_contains(&h, &[0; 7]).unwrap());
        assert!(!row_space_contains(&h, &[1, 0, 0, 0, 0, 0, 0]).unwrap());
        assert!(row_space_contains(&h, &[0; 6]).is_err());
        let sum = xor_supports(h.row(0), h.row(2));
        assert!(row_space_contains_support(&h, &sum).unwrap());
    }

    #[test]
    fn single_parity_check_generator() {
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 1, 1]]).unwrap();
        let g = systematic_generator(&h).unwrap();
        assert_eq!(g.k(), 2);
        for row in g.generator.rows() {
            assert_eq!(row.len() % 2, 0);
            assert!(h.is_codeword(&support_to_bits(row, 3)).unwrap());
        }
    }

    #[test]
    fn hamming_generator_spans_codebook() {
        let h = hamming74();
        let g = systematic_generator(&h).unwrap();
        assert_eq!(g.k(), 4);
        let words = enumerate(&g);
        let mut distinct = words.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 16);
        for (m, w) in words.iter().enumerate() {
            assert!(h.is_codeword(w).unwrap());
            let u: Vec<u8> = (0..4).map(|i| ((m >> i) & 1) as u8).collect();
            assert_eq!(g.extract_info(w), u);
        }
        // brute force: exactly 16 words of length 7 satisfy H
        let brute = (0..128u32)
            .filter(|&x| {
                let w: Vec<u8> = (0..7).map(|i| ((x >> i) & 1) as u8).collect();
                h.is_codeword(&w).unwrap()
            })
            .count();
        assert_eq!(brute, 16);
    }

    #[test]
    fn generator_rejects_rank_deficiency() {
        let h = SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![1, 1, 0]]).unwrap();
        match systematic_generator(&h) {
            Err(Error::RankDeficient { rank, expected }) => {
                assert_eq!((rank, expected), (1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn independent_rows_drops_dependents() {
        let h = SparseBinaryMatrix::from_dense(&[
            vec![1, 1, 0, 0],
            vec![0, 1, 1, 0],
            vec![1, 0, 1, 0],
            vec![0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(independent_rows(&h), vec![0, 1, 3]);
    }

    pub(crate) fn support_to_bits(s: &[usize], n: usize) -> Vec<u8> {
        let mut v = vec![0; n];
        for &j in s {
            v[j] = 1;
        }
        v
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = SparseBinaryMatrix> {
            (1usize..8, 1usize..12).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(0u8..2, c), r)
                    .prop_map(|d| SparseBinaryMatrix::from_dense(&d).unwrap())
            })
        }

        proptest! {
            #[test]
            fn rank_equals_transpose_rank(m in matrix()) {
                let r = rank(&m);
                prop_assert_eq!(r, rank(&m.transpose()));
                prop_assert!(r <= m.n_rows().min(m.n_cols()));
            }

            #[test]
            fn appending_row_space_member_keeps_rank(m in matrix(), mask in any::<u16>()) {
                let mut combo = Vec::new();
                for i in 0..m.n_rows() {
                    if (mask >> i) & 1 == 1 {
                        combo = xor_supports(&combo, m.row(i));
                    }
                }
                let mut ext = m.clone();
                ext.push_row(combo).unwrap();
                prop_assert_eq!(rank(&ext), rank(&m));
            }

            #[test]
            fn generator_is_orthogonal_and_systematic(m in matrix()) {
                let kept = independent_rows(&m);
                let rows = kept.iter().map(|&i| m.row(i).to_vec()).collect();
                let h = SparseBinaryMatrix::from_rows(m.n_cols(), rows).unwrap();
                let g = systematic_generator(&h).unwrap();
                prop_assert_eq!(g.k(), h.n_cols() - h.n_rows());
                prop_assert_eq!(rank(&g.generator), g.k());
                for (i, row) in g.generator.rows().iter().enumerate() {
                    let bits = support_to_bits(row, h.n_cols());
                    prop_assert!(h.is_codeword(&bits).unwrap());
                    for (t, &p) in g.systematic_positions.iter().enumerate() {
                        prop_assert_eq!(bits[p], u8::from(t == i));
                    }
                }
            }
        }
    }
}
