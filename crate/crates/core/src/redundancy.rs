//! Redundant parity checks and alternative parity-check matrices.
//!
//! Two sources of low-weight redundant checks are provided:
//!
//! * prototype-level combination of two (optionally three) base-matrix rows
//!   whose circulants never collide with different shifts; lifting such a
//!   row yields `z` binary checks at once;
//! * binary combination of the checks closing a short cycle of the Tanner
//!   graph, whose weight is at most `Σ w_i − c`.
//!
//! A representation replaces a handful of rows of the original matrix by
//! redundant checks while keeping full rank, so every representation
//! describes the same code.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::alist;
use crate::error::{Error, Result};
use crate::gf2::{self, xor_supports, SparseBinaryMatrix};
use crate::qc::{self, BaseMatrix};
use crate::seeds;
use crate::tanner::{cycle_check_sets, TannerGraph};

/// A prototype row obtained as the sum of several base rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundantBaseRow {
    /// Base rows that were added, increasing.
    pub source_rows: Vec<usize>,
    pub entries: Vec<i32>,
    /// Weight of each of the `z` binary rows the lifted row expands into.
    pub predicted_binary_weight: usize,
}

impl RedundantBaseRow {
    /// The `z` binary checks of this row together with the original rows
    /// they are the sum of.
    pub fn lift(&self, z: usize) -> Vec<RedundantRow> {
        (0..z)
            .map(|t| RedundantRow {
                support: qc::lift_row(&self.entries, z, t),
                sources: self.source_rows.iter().map(|&i| i * z + t).collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CombineError {
    #[error("base row index {index} out of range for {n_rows} rows")]
    InvalidIndex { index: usize, n_rows: usize },
    #[error("base row {0} listed more than once")]
    RepeatedRow(usize),
    #[error("column {column} holds unequal shifts {shifts:?}; the sum is not a single circulant")]
    Incompatible { column: usize, shifts: Vec<i32> },
}

/// Sum of base rows `i` and `j`.
///
/// Per column: a zero block and a circulant give the circulant, two equal
/// shifts cancel, two different shifts are not representable.
pub fn combine_base_rows(
    hb: &BaseMatrix,
    i: usize,
    j: usize,
) -> std::result::Result<RedundantBaseRow, CombineError> {
    combine_base_row_set(hb, &[i, j])
}

/// Sum of any set of distinct base rows. A column stays representable when
/// at most one shift value occurs an odd number of times in it.
pub fn combine_base_row_set(
    hb: &BaseMatrix,
    rows: &[usize],
) -> std::result::Result<RedundantBaseRow, CombineError> {
    let mut sources = rows.to_vec();
    sources.sort_unstable();
    for w in sources.windows(2) {
        if w[0] == w[1] {
            return Err(CombineError::RepeatedRow(w[0]));
        }
    }
    if let Some(&bad) = sources.iter().find(|&&r| r >= hb.n_rows()) {
        return Err(CombineError::InvalidIndex {
            index: bad,
            n_rows: hb.n_rows(),
        });
    }
    let mut entries = Vec::with_capacity(hb.n_cols());
    for col in 0..hb.n_cols() {
        let mut odd: Vec<i32> = Vec::new();
        for &r in &sources {
            let e = hb.get(r, col);
            if e < 0 {
                continue;
            }
            if let Some(p) = odd.iter().position(|&x| x == e) {
                odd.swap_remove(p);
            } else {
                odd.push(e);
            }
        }
        match odd.len() {
            0 => entries.push(-1),
            1 => entries.push(odd[0]),
            _ => {
                odd.sort_unstable();
                return Err(CombineError::Incompatible {
                    column: col,
                    shifts: odd,
                });
            }
        }
    }
    let predicted_binary_weight = entries.iter().filter(|&&e| e >= 0).count();
    Ok(RedundantBaseRow {
        source_rows: sources,
        entries,
        predicted_binary_weight,
    })
}

/// All compatible unordered row pairs, lightest first, ties by `(i, j)`.
pub fn enumerate_combinable_pairs(hb: &BaseMatrix) -> Vec<(usize, usize, RedundantBaseRow)> {
    let mut out = Vec::new();
    for i in 0..hb.n_rows() {
        for j in i + 1..hb.n_rows() {
            if let Ok(r) = combine_base_rows(hb, i, j) {
                out.push((i, j, r));
            }
        }
    }
    out.sort_by_key(|(i, j, r)| (r.predicted_binary_weight, *i, *j));
    out
}

/// All compatible row triples, lightest first.
pub fn enumerate_combinable_triples(hb: &BaseMatrix) -> Vec<RedundantBaseRow> {
    let n = hb.n_rows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Ok(r) = combine_base_row_set(hb, &[i, j, k]) {
                    out.push(r);
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.predicted_binary_weight, &a.source_rows).cmp(&(b.predicted_binary_weight, &b.source_rows))
    });
    out
}

/// Checks closing one cycle and the resulting weight bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCheckSet {
    pub check_indices: Vec<usize>,
    pub cycle_length: usize,
    /// `Σ w_i − c` over the participating checks.
    pub weight_bound: usize,
}

/// `Σ w_i − c`.
pub fn cycle_weight_bound(weights: &[usize], cycle_length: usize) -> usize {
    weights.iter().sum::<usize>().saturating_sub(cycle_length)
}

/// Sums of the checks closing cycles of length `c`, at most `max_rows` of
/// them, in the order produced by [`cycle_check_sets`].
pub fn cycle_redundant_rows(
    h: &SparseBinaryMatrix,
    c: usize,
    max_rows: usize,
) -> Result<Vec<(CycleCheckSet, Vec<usize>)>> {
    if c < 4 || !c.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "cycle length must be even and at least 4, got {c}"
        )));
    }
    let g = TannerGraph::new(h);
    let mut out = Vec::new();
    for cycle in cycle_check_sets(&g, c, max_rows) {
        let row = cycle
            .checks
            .iter()
            .fold(Vec::new(), |acc, &i| xor_supports(&acc, h.row(i)));
        if row.is_empty() {
            continue;
        }
        let weights: Vec<usize> = cycle.checks.iter().map(|&i| h.row_weight(i)).collect();
        out.push((
            CycleCheckSet {
                weight_bound: cycle_weight_bound(&weights, c),
                check_indices: cycle.checks,
                cycle_length: c,
            },
            row,
        ));
    }
    Ok(out)
}

/// A binary redundant check and the rows of the original matrix it sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundantRow {
    pub support: Vec<usize>,
    pub sources: Vec<usize>,
}

impl RedundantRow {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// True when the support really is the sum of its source rows of `h`.
    pub fn matches(&self, h: &SparseBinaryMatrix) -> bool {
        if self.sources.iter().any(|&s| s >= h.n_rows()) {
            return false;
        }
        let sum = self
            .sources
            .iter()
            .fold(Vec::new(), |acc, &i| xor_supports(&acc, h.row(i)));
        sum == self.support
    }
}

/// Where redundant checks are taken from.
#[derive(Clone, Debug, PartialEq)]
pub enum RowSource {
    /// Lifted sums of base rows of a renormalized prototype.
    BaseRows {
        base: BaseMatrix,
        z: usize,
        include_triples: bool,
    },
    /// Sums of checks closing short cycles.
    Cycles {
        lengths: Vec<usize>,
        max_rows_per_length: usize,
    },
}

impl RowSource {
    /// Base-row sums for the lifted rate-1/2 matrices, cycle sums otherwise.
    pub fn default_for(h: &SparseBinaryMatrix) -> RowSource {
        match qc::identify_wimax(h) {
            Some(n) => RowSource::BaseRows {
                base: qc::wimax_renormalized(n).expect("identified length is supported"),
                z: n / 24,
                include_triples: false,
            },
            None => RowSource::Cycles {
                lengths: vec![4, 6],
                max_rows_per_length: 20_000,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RowSource::BaseRows { .. } => "base-rows",
            RowSource::Cycles { .. } => "cycles",
        }
    }
}

/// Redundant checks of `h` from `source`.
pub fn build_pool(h: &SparseBinaryMatrix, source: &RowSource) -> Result<Vec<RedundantRow>> {
    let pool: Vec<RedundantRow> = match source {
        RowSource::BaseRows {
            base,
            z,
            include_triples,
        } => {
            let lifted = base.lift(*z)?;
            if &lifted != h {
                return Err(Error::invalid(
                    "base matrix does not lift to the given parity-check matrix",
                ));
            }
            let mut rows: Vec<RedundantBaseRow> = enumerate_combinable_pairs(base)
                .into_iter()
                .map(|(_, _, r)| r)
                .collect();
            if *include_triples {
                rows.extend(enumerate_combinable_triples(base));
            }
            rows.iter().flat_map(|r| r.lift(*z)).collect()
        }
        RowSource::Cycles {
            lengths,
            max_rows_per_length,
        } => {
            let mut rows = Vec::new();
            for &c in lengths {
                for (set, support) in cycle_redundant_rows(h, c, *max_rows_per_length)? {
                    rows.push(RedundantRow {
                        support,
                        sources: set.check_indices,
                    });
                }
            }
            rows
        }
    };
    Ok(pool)
}

/// Bounds and retry budget of [`assemble_representation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyConfig {
    pub min_replace: usize,
    pub max_replace: usize,
    pub max_retries: usize,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            min_replace: 10,
            max_replace: 16,
            max_retries: 100,
        }
    }
}

/// Number of replaced rows for code length `n`: 10 at n = 576 rising
/// linearly to 16 at n = 960, clamped to that range.
pub fn default_replace_count(n: usize) -> usize {
    let r = 10.0 + (n as f64 - 576.0) * 6.0 / 384.0;
    (r.round() as i64).clamp(10, 16) as usize
}

/// A parity-check matrix of the same code with some rows replaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assembled {
    pub matrix: SparseBinaryMatrix,
    /// Replaced row indices, increasing.
    pub replaced_rows: Vec<usize>,
}

/// Replaces `replace_count` rows of `h` by redundant checks from `pool`.
///
/// Candidates are visited from the lightest weight class upwards in a
/// seeded random order inside each class. Each accepted candidate replaces
/// one of its own source rows, drawn at random among those not yet
/// replaced; any other choice would lose rank. The result is rank-checked
/// and the draw repeated on failure.
pub fn assemble_representation(
    h: &SparseBinaryMatrix,
    pool: &[RedundantRow],
    replace_count: usize,
    seed: u64,
    cfg: &AssemblyConfig,
) -> Result<Assembled> {
    if replace_count < cfg.min_replace || replace_count > cfg.max_replace {
        return Err(Error::invalid(format!(
            "replace count {replace_count} outside [{}, {}]",
            cfg.min_replace, cfg.max_replace
        )));
    }
    if replace_count > pool.len() {
        return Err(Error::invalid(format!(
            "replace count {replace_count} exceeds pool size {}",
            pool.len()
        )));
    }
    if let Some(bad) = pool.iter().position(|r| !r.matches(h)) {
        return Err(Error::invalid(format!(
            "pool row {bad} is not the sum of its source rows"
        )));
    }
    let m = h.n_rows();
    let target_rank = gf2::rank(h);
    if target_rank != m {
        return Err(Error::RankDeficient {
            rank: target_rank,
            expected: m,
        });
    }

    let mut tiers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, r) in pool.iter().enumerate() {
        tiers.entry(r.weight()).or_default().push(idx);
    }

    let mut rng = seeds::rng(seed);
    let mut last_failure = String::from("no attempt made");
    for _ in 0..cfg.max_retries.max(1) {
        let mut order = Vec::with_capacity(pool.len());
        for tier in tiers.values() {
            let mut t = tier.clone();
            t.shuffle(&mut rng);
            order.extend(t);
        }

        let mut replaced = vec![false; m];
        let mut changes: Vec<(usize, usize)> = Vec::with_capacity(replace_count);
        for idx in order {
            if changes.len() == replace_count {
                break;
            }
            let free: Vec<usize> = pool[idx]
                .sources
                .iter()
                .copied()
                .filter(|&s| !replaced[s])
                .collect();
            if free.is_empty() {
                continue;
            }
            let target = free[rng.random_range(0..free.len())];
            replaced[target] = true;
            changes.push((target, idx));
        }
        if changes.len() < replace_count {
            last_failure = format!(
                "only {} of {replace_count} rows could be replaced",
                changes.len()
            );
            continue;
        }

        let mut matrix = h.clone();
        for &(row, idx) in &changes {
            matrix.set_row(row, pool[idx].support.clone())?;
        }
        let r = gf2::rank(&matrix);
        if r == m {
            let mut replaced_rows: Vec<usize> = changes.iter().map(|&(row, _)| row).collect();
            replaced_rows.sort_unstable();
            return Ok(Assembled {
                matrix,
                replaced_rows,
            });
        }
        last_failure = format!("rank dropped to {r} of {m}");
    }
    Err(Error::AssemblyFailed {
        attempts: cfg.max_retries.max(1),
        reason: last_failure,
    })
}

/// Ordered parity-check matrices `H_1 … H_l` of one code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationSet {
    pub matrices: Vec<SparseBinaryMatrix>,
    pub code_id: String,
    pub seed: u64,
    /// Assembly seed of each representation; `None` for the original.
    pub sub_seeds: Vec<Option<u64>>,
    pub replaced_rows: Vec<Vec<usize>>,
}

impl RepresentationSet {
    /// The set holding only the original matrix.
    pub fn single(h: SparseBinaryMatrix, code_id: impl Into<String>) -> Self {
        RepresentationSet {
            matrices: vec![h],
            code_id: code_id.into(),
            seed: 0,
            sub_seeds: vec![None],
            replaced_rows: vec![Vec::new()],
        }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn n(&self) -> usize {
        self.matrices[0].n_cols()
    }

    /// First `l` representations.
    pub fn prefix(&self, l: usize) -> RepresentationSet {
        let l = l.min(self.len());
        RepresentationSet {
            matrices: self.matrices[..l].to_vec(),
            code_id: self.code_id.clone(),
            seed: self.seed,
            sub_seeds: self.sub_seeds[..l].to_vec(),
            replaced_rows: self.replaced_rows[..l].to_vec(),
        }
    }

    /// Checks the set invariants: equal dimensions, full rank, every row
    /// of every matrix in the row space of `H_1`, pairwise distinct.
    pub fn validate(&self) -> Result<()> {
        let first = self
            .matrices
            .first()
            .ok_or_else(|| Error::invalid("empty representation set"))?;
        let (m, n) = (first.n_rows(), first.n_cols());
        let stacked_base = gf2::rank(first);
        if stacked_base != m {
            return Err(Error::RankDeficient {
                rank: stacked_base,
                expected: m,
            });
        }
        for (i, h) in self.matrices.iter().enumerate() {
            if (h.n_rows(), h.n_cols()) != (m, n) {
                return Err(Error::invalid(format!("representation {i} has other dimensions")));
            }
            let r = gf2::rank(h);
            if r != m {
                return Err(Error::RankDeficient { rank: r, expected: m });
            }
            // same code: stacking H_i under H_1 adds no rank
            let mut stacked = first.clone();
            for row in h.rows() {
                stacked.push_row(row.clone())?;
            }
            if gf2::rank(&stacked) != m {
                return Err(Error::invalid(format!(
                    "representation {i} defines a different code"
                )));
            }
            if self.matrices[..i].contains(h) {
                return Err(Error::invalid(format!("representation {i} is a duplicate")));
            }
        }
        Ok(())
    }

    /// Writes `H_01.alist …` and `manifest.txt` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        let mut manifest = String::new();
        let h = &self.matrices[0];
        let _ = writeln!(manifest, "code {}", self.code_id);
        let _ = writeln!(manifest, "n {}", h.n_cols());
        let _ = writeln!(manifest, "m {}", h.n_rows());
        let _ = writeln!(manifest, "l {}", self.len());
        let _ = writeln!(manifest, "seed {}", self.seed);
        for (i, mat) in self.matrices.iter().enumerate() {
            let file = format!("H_{:02}.alist", i + 1);
            alist::write_alist(dir.join(&file), mat)?;
            let seed = self.sub_seeds[i].map_or("-".to_string(), |s| s.to_string());
            let rows = if self.replaced_rows[i].is_empty() {
                "-".to_string()
            } else {
                self.replaced_rows[i]
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(manifest, "rep {} {file} seed {seed} replaced {rows}", i + 1);
        }
        let path = dir.join("manifest.txt");
        fs::write(&path, manifest).map_err(|e| Error::file(path, e))
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<RepresentationSet> {
        let dir = dir.as_ref();
        let path = dir.join("manifest.txt");
        let text = fs::read_to_string(&path).map_err(|e| Error::file(&path, e))?;
        let mut code_id = String::new();
        let mut seed = 0;
        let mut expected_l = None;
        let mut matrices = Vec::new();
        let mut sub_seeds = Vec::new();
        let mut replaced_rows = Vec::new();
        let bad = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        for (ln, line) in text.lines().enumerate() {
            let ln = ln + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["code", rest @ ..] => code_id = rest.join(" "),
                ["seed", s] => seed = s.parse().map_err(|_| bad(ln, "bad seed"))?,
                ["l", l] => expected_l = Some(l.parse::<usize>().map_err(|_| bad(ln, "bad l"))?),
                ["n", _] | ["m", _] => {}
                ["rep", _, file, "seed", s, "replaced", rows @ ..] => {
                    matrices.push(alist::read_alist(dir.join(file))?);
                    sub_seeds.push(if *s == "-" {
                        None
                    } else {
                        Some(s.parse().map_err(|_| bad(ln, "bad sub-seed"))?)
                    });
                    let rows = if rows == ["-"] {
                        Vec::new()
                    } else {
                        rows.iter()
                            .map(|r| r.parse::<usize>().map_err(|_| bad(ln, "bad row index")))
                            .collect::<Result<Vec<_>>>()?
                    };
                    replaced_rows.push(rows);
                }
                _ => return Err(bad(ln, "unrecognized manifest line")),
            }
        }
        if matrices.is_empty() || expected_l.is_some_and(|l| l != matrices.len()) {
            return Err(bad(0, "manifest lists no or the wrong number of representations"));
        }
        Ok(RepresentationSet {
            matrices,
            code_id,
            seed,
            sub_seeds,
            replaced_rows,
        })
    }
}

/// `H_1 = h`, followed by `l − 1` assembled representations with
/// independent sub-seeds. A representation equal to an earlier one is
/// redrawn with the next sub-seed.
pub fn build_representation_set(
    h: &SparseBinaryMatrix,
    pool: &[RedundantRow],
    l: usize,
    replace_count: usize,
    seed: u64,
    code_id: &str,
    cfg: &AssemblyConfig,
) -> Result<RepresentationSet> {
    if l == 0 {
        return Err(Error::invalid("a representation set needs l >= 1"));
    }
    let mut set = RepresentationSet::single(h.clone(), code_id);
    set.seed = seed;
    const REDRAWS: u64 = 16;
    for index in 1..l {
        let mut built = None;
        for redraw in 0..REDRAWS {
            let sub = seeds::derive(seed, (index as u64) | (redraw << 32));
            let a = assemble_representation(h, pool, replace_count, sub, cfg).map_err(|e| {
                Error::Representation {
                    index,
                    source: Box::new(e),
                }
            })?;
            if !set.matrices.contains(&a.matrix) {
                built = Some((sub, a));
                break;
            }
        }
        let (sub, a) = built.ok_or_else(|| Error::Representation {
            index,
            source: Box::new(Error::AssemblyFailed {
                attempts: REDRAWS as usize,
                reason: "every draw duplicated an earlier representation".into(),
            }),
        })?;
        set.matrices.push(a.matrix);
        set.sub_seeds.push(Some(sub));
        set.replaced_rows.push(a.replaced_rows);
    }
    Ok(set)
}
