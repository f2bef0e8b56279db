//! MacKay "alist" text format for sparse binary matrices.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! col degrees (n values)
//! row degrees (m values)
//! one line per column: 1-based row indices
//! one line per row: 1-based column indices
//! ```
//!
//! Zero entries used as padding in the per-column and per-row lists are
//! ignored on input. Output is written without padding, except that an
//! empty list is written as a single `0`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;

pub fn to_alist(h: &SparseBinaryMatrix) -> String {
    let cols = h.columns();
    let col_deg: Vec<usize> = cols.iter().map(Vec::len).collect();
    let row_deg = h.row_weights();
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", h.n_cols(), h.n_rows());
    let _ = writeln!(
        s,
        "{} {}",
        col_deg.iter().max().copied().unwrap_or(0),
        row_deg.iter().max().copied().unwrap_or(0)
    );
    let _ = writeln!(s, "{}", join(col_deg.iter().copied()));
    let _ = writeln!(s, "{}", join(row_deg.iter().copied()));
    for col in &cols {
        let _ = writeln!(s, "{}", join(col.iter().map(|&i| i + 1)));
    }
    for row in h.rows() {
        let _ = writeln!(s, "{}", join(row.iter().map(|&j| j + 1)));
    }
    s
}

fn join(it: impl Iterator<Item = usize>) -> String {
    let s = it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    // empty lists are written as a single padding zero
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

pub fn parse_alist(text: &str) -> Result<SparseBinaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (ln, line) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        let nums = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|e| Error::Parse {
                    line: ln,
                    msg: format!("{what}: bad integer {t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        Ok((ln, nums))
    };

    let (ln, dims) = next_numbers("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(Error::Parse {
            line: ln,
            msg: "expected `n m`".into(),
        });
    };
    let (ln, maxes) = next_numbers("maximum degrees")?;
    if maxes.len() != 2 {
        return Err(Error::Parse {
            line: ln,
            msg: "expected `max_col_degree max_row_degree`".into(),
        });
    }
    let (ln, col_deg) = next_numbers("column degrees")?;
    if col_deg.len() != n {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected {n} column degrees, got {}", col_deg.len()),
        });
    }
    let (ln, row_deg) = next_numbers("row degrees")?;
    if row_deg.len() != m {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected {m} row degrees, got {}", row_deg.len()),
        });
    }

    let mut from_cols: Vec<(usize, usize)> = Vec::new();
    for (j, &d) in col_deg.iter().enumerate() {
        let (ln, idx) = next_numbers("column list")?;
        let idx: Vec<usize> = idx.into_iter().filter(|&v| v != 0).collect();
        if idx.len() != d {
            return Err(Error::Parse {
                line: ln,
                msg: format!("column {} lists {} entries, degree is {d}", j + 1, idx.len()),
            });
        }
        for i in idx {
            if i > m {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("row index {i} exceeds {m}"),
                });
            }
            from_cols.push((i - 1, j));
        }
    }

    let mut rows = Vec::with_capacity(m);
    for (i, &d) in row_deg.iter().enumerate() {
        let (ln, idx) = next_numbers("row list")?;
        let idx: Vec<usize> = idx.into_iter().filter(|&v| v != 0).collect();
        if idx.len() != d {
            return Err(Error::Parse {
                line: ln,
                msg: format!("row {} lists {} entries, degree is {d}", i + 1, idx.len()),
            });
        }
        if let Some(&bad) = idx.iter().find(|&&j| j > n) {
            return Err(Error::Parse {
                line: ln,
                msg: format!("column index {bad} exceeds {n}"),
            });
        }
        rows.push(idx.into_iter().map(|j| j - 1).collect::<Vec<_>>());
    }

    let h = SparseBinaryMatrix::from_rows(n, rows)?;
    let mut from_rows: Vec<(usize, usize)> = h
        .rows()
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().map(move |&j| (i, j)))
        .collect();
    from_rows.sort_unstable();
    from_cols.sort_unstable();
    if from_rows != from_cols {
        return Err(Error::Parse {
            line: 0,
            msg: "row and column lists describe different matrices".into(),
        });
    }
    Ok(h)
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<SparseBinaryMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_alist(&text)
}

pub fn write_alist(path: impl AsRef<Path>, h: &SparseBinaryMatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_alist(h)).map_err(|e| Error::file(path, e))
}
