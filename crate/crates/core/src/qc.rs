//! Quasi-cyclic parity-check matrices of the IEEE 802.16e rate-1/2 LDPC
//! code family: the 12×24 prototype, its per-length renormalization and the
//! circulant lifting.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;

/// Code lengths of the rate-1/2 family handled here.
pub const WIMAX_LENGTHS: [usize; 5] = [576, 672, 768, 864, 960];

/// Expansion factor the prototype shifts are defined for.
pub const WIMAX_Z0: usize = 96;

#[rustfmt::skip]
const WIMAX_RATE_HALF: [[i32; 24]; 12] = [
    [-1, 94, 73, -1, -1, -1, -1, -1, 55, 83, -1, -1,  7,  0, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, 27, -1, -1, -1, 22, 79,  9, -1, -1, -1, 12, -1,  0,  0, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, 24, 22, 81, -1, 33, -1, -1, -1,  0, -1, -1,  0,  0, -1, -1, -1, -1, -1, -1, -1, -1],
    [61, -1, 47, -1, -1, -1, -1, -1, 65, 25, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, 39, -1, -1, -1, 84, -1, -1, 41, 72, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, -1, 46, 40, -1, 82, -1, -1, -1, 79,  0, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1, -1],
    [-1, -1, 95, 53, -1, -1, -1, -1, -1, 14, 18, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1],
    [-1, 11, 73, -1, -1, -1,  2, -1, -1, 47, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1],
    [12, -1, -1, -1, 83, 24, -1, 43, -1, -1, -1, 51, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1, -1],
    [-1, -1, -1, -1, -1, 94, -1, 59, -1, -1, 70, 72, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1],
    [-1, -1,  7, 65, -1, -1, -1, -1, 39, 49, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0],
    [43, -1, -1, -1, -1, 66, -1, 41, -1, -1, -1, 26,  7, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0],
];

/// Prototype matrix: `-1` is an all-zero block, `e >= 0` an identity block
/// cyclically shifted right by `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<i32>,
}

impl BaseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<i32>) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: n_rows * n_cols,
                found: entries.len(),
            });
        }
        if let Some(&bad) = entries.iter().find(|&&e| e < -1) {
            return Err(Error::invalid(format!("base entry {bad} is below -1")));
        }
        Ok(BaseMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<i32>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                expected: n_cols,
                found: r.len(),
            });
        }
        BaseMatrix::new(rows.len(), n_cols, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.entries[i * self.n_cols + j]
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// Number of circulant (nonnegative) blocks in row `i`.
    pub fn row_weight(&self, i: usize) -> usize {
        self.row(i).iter().filter(|&&e| e >= 0).count()
    }

    pub fn col_weight(&self, j: usize) -> usize {
        (0..self.n_rows).filter(|&i| self.get(i, j) >= 0).count()
    }

    /// Shift scaling `e -> floor(e * z / 96)` for positive entries.
    pub fn renormalize(&self, z: usize) -> BaseMatrix {
        let entries = self
            .entries
            .iter()
            .map(|&e| {
                if e > 0 {
                    ((e as i64 * z as i64) / WIMAX_Z0 as i64) as i32
                } else {
                    e
                }
            })
            .collect();
        BaseMatrix {
            entries,
            ..self.clone()
        }
    }

    /// Expands every entry into a `z × z` zero or shifted-identity block.
    pub fn lift(&self, z: usize) -> Result<SparseBinaryMatrix> {
        if z == 0 {
            return Err(Error::invalid("expansion factor must be positive"));
        }
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                let e = self.get(i, j);
                if e >= 0 && e as usize >= z {
                    return Err(Error::ShiftOutOfRange {
                        row: i,
                        col: j,
                        shift: e,
                        z,
                    });
                }
            }
        }
        let rows = (0..self.n_rows)
            .flat_map(|i| (0..z).map(move |t| (i, t)))
            .map(|(i, t)| lift_row(self.row(i), z, t))
            .collect();
        SparseBinaryMatrix::from_rows(self.n_cols * z, rows)
    }

    /// Whitespace-separated integers, one base row per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n_rows {
            let line = self
                .row(i)
                .iter()
                .map(|e| format!("{e:>3}"))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(s, "{line}");
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<BaseMatrix> {
        let rows = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(ln, l)| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<i32>().map_err(|e| Error::Parse {
                            line: ln + 1,
                            msg: format!("bad entry {t:?}: {e}"),
                        })
                    })
                    .collect::<Result<Vec<i32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BaseMatrix::from_rows(&rows)
    }
}

/// Support of binary row `t` of the lifted block row `base_row`.
///
/// Block `(i, j)` with shift `e` has its row-`t` one at column `(t + e) mod z`.
pub fn lift_row(base_row: &[i32], z: usize, t: usize) -> Vec<usize> {
    let mut support: Vec<usize> = base_row
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= 0)
        .map(|(j, &e)| j * z + (t + e as usize) % z)
        .collect();
    support.sort_unstable();
    support
}

/// The printed 12×24 prototype of the rate-1/2 code.
pub fn wimax_base_matrix() -> BaseMatrix {
    let entries = WIMAX_RATE_HALF.iter().flatten().copied().collect();
    BaseMatrix {
        n_rows: 12,
        n_cols: 24,
        entries,
    }
}

/// Length and expansion factor of one code of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftParams {
    pub z: usize,
}

impl LiftParams {
    pub fn from_length(n: usize) -> Result<Self> {
        if !WIMAX_LENGTHS.contains(&n) {
            return Err(Error::invalid(format!(
                "unsupported length {n}; expected one of {WIMAX_LENGTHS:?}"
            )));
        }
        Ok(LiftParams { z: n / 24 })
    }

    pub fn n(&self) -> usize {
        24 * self.z
    }

    pub fn m(&self) -> usize {
        12 * self.z
    }
}

/// Renormalized prototype for length `n`.
pub fn wimax_renormalized(n: usize) -> Result<BaseMatrix> {
    let p = LiftParams::from_length(n)?;
    Ok(wimax_base_matrix().renormalize(p.z))
}

/// Binary parity-check matrix of the rate-1/2 code of length `n`.
pub fn wimax_parity_check(n: usize) -> Result<SparseBinaryMatrix> {
    let p = LiftParams::from_length(n)?;
    wimax_base_matrix().renormalize(p.z).lift(p.z)
}

/// Length of `h` if it is exactly one of the lifted rate-1/2 matrices.
pub fn identify_wimax(h: &SparseBinaryMatrix) -> Option<usize> {
    let n = h.n_cols();
    if !WIMAX_LENGTHS.contains(&n) || h.n_rows() != n / 2 {
        return None;
    }
    let lifted = wimax_parity_check(n).ok()?;
    (&lifted == h).then_some(n)
}
