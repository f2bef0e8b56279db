//! Progressive edge-growth (PEG) construction of irregular LDPC codes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{self, SparseBinaryMatrix};
use crate::seeds;
use crate::tanner::local_girth;

/// Code lengths offered for the rate-1/2 PEG codes.
pub const PEG_LENGTHS: [usize; 6] = [500, 600, 700, 800, 900, 1000];

/// Node-perspective variable degree distribution `L(x) = Σ L_d x^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    node_fractions: BTreeMap<usize, f64>,
}

impl DegreeDistribution {
    pub fn new(node_fractions: BTreeMap<usize, f64>) -> Result<Self> {
        if node_fractions.is_empty() {
            return Err(Error::invalid("empty degree distribution"));
        }
        for (&d, &f) in &node_fractions {
            if d < 2 {
                return Err(Error::invalid(format!("degree {d} is below 2")));
            }
            if !f.is_finite() || f <= 0.0 {
                return Err(Error::invalid(format!("fraction {f} for degree {d} is not positive")));
            }
        }
        let total: f64 = node_fractions.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("fractions sum to {total}, not 1")));
        }
        Ok(DegreeDistribution { node_fractions })
    }

    /// The optimized rate-1/2 distribution used for the PEG codes.
    pub fn optimized_rate_half() -> Self {
        let node_fractions = [
            (2, 0.5043865558),
            (3, 0.2955760529),
            (5, 0.0572634080),
            (6, 0.0362602194),
            (7, 0.0049622081),
            (9, 0.0292344776),
            (11, 0.0650312477),
            (12, 0.0072858305),
        ]
        .into_iter()
        .collect();
        DegreeDistribution::new(node_fractions).expect("table is a valid distribution")
    }

    pub fn fractions(&self) -> &BTreeMap<usize, f64> {
        &self.node_fractions
    }

    /// Average variable degree `Σ d · L_d`.
    pub fn mean_degree(&self) -> f64 {
        self.node_fractions.iter().map(|(&d, &f)| d as f64 * f).sum()
    }

    pub fn max_degree(&self) -> usize {
        *self.node_fractions.keys().last().expect("nonempty")
    }
}

/// Variable degrees in nondecreasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeAssignment(Vec<usize>);

impl DegreeAssignment {
    pub fn new(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable();
        DegreeAssignment(degrees)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn edges(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &d in &self.0 {
            *h.entry(d).or_insert(0) += 1;
        }
        h
    }
}

/// Node counts by largest-remainder rounding of `n · L_d`.
///
/// Remainder ties go to the smaller degree.
pub fn quantize_degrees(dist: &DegreeDistribution, n: usize) -> Result<DegreeAssignment> {
    if n < 2 {
        return Err(Error::invalid("code length must be at least 2"));
    }
    let mut counts: Vec<(usize, usize, f64)> = dist
        .fractions()
        .iter()
        .map(|(&d, &f)| {
            let exact = f * n as f64;
            let floor = exact.floor();
            (d, floor as usize, exact - floor)
        })
        .collect();
    let assigned: usize = counts.iter().map(|c| c.1).sum();
    let missing = n.saturating_sub(assigned);
    let mut by_remainder: Vec<usize> = (0..counts.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        counts[b]
            .2
            .partial_cmp(&counts[a].2)
            .expect("finite remainders")
            .then(counts[a].0.cmp(&counts[b].0))
    });
    for &i in by_remainder.iter().take(missing) {
        counts[i].1 += 1;
    }
    let degrees = counts
        .iter()
        .flat_map(|&(d, c, _)| std::iter::repeat_n(d, c))
        .collect();
    Ok(DegreeAssignment::new(degrees))
}

/// Greedy PEG construction of an `m × n` parity-check matrix.
///
/// Variable nodes are processed in the given (nondecreasing) degree order.
/// The first edge of a node goes to a check of minimal current degree;
/// every further edge goes to a check that is unreachable from the node in
/// the current graph or, if all checks are reachable, to one at maximal
/// depth of the breadth-first tree. Among those, the lowest current check
/// degree wins and remaining ties are broken by the seeded generator.
pub fn peg_construct(
    n: usize,
    m: usize,
    degrees: &DegreeAssignment,
    seed: u64,
) -> Result<SparseBinaryMatrix> {
    if degrees.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: degrees.n(),
        });
    }
    if m == 0 {
        return Err(Error::invalid("no check nodes"));
    }
    if let Some(&d) = degrees.degrees().iter().find(|&&d| d > m || d == 0) {
        return Err(Error::invalid(format!(
            "variable degree {d} infeasible with {m} checks"
        )));
    }
    let mut peg = Peg::new(n, m, seed);
    for (v, &d) in degrees.degrees().iter().enumerate() {
        for k in 0..d {
            let candidates = if k == 0 {
                (0..m).collect()
            } else {
                peg.farthest_checks(v)
            };
            let c = peg.pick_lightest(&candidates);
            peg.connect(v, c);
        }
    }
    SparseBinaryMatrix::from_rows(n, peg.check_adj)
}

struct Peg {
    var_adj: Vec<Vec<usize>>,
    check_adj: Vec<Vec<usize>>,
    rng: rand_chacha::ChaCha8Rng,
    // scratch for the breadth-first search, stamped per search
    check_mark: Vec<u32>,
    var_mark: Vec<u32>,
    stamp: u32,
}

impl Peg {
    fn new(n: usize, m: usize, seed: u64) -> Self {
        Peg {
            var_adj: vec![Vec::new(); n],
            check_adj: vec![Vec::new(); m],
            rng: seeds::rng(seed),
            check_mark: vec![0; m],
            var_mark: vec![0; n],
            stamp: 0,
        }
    }

    fn connect(&mut self, v: usize, c: usize) {
        self.var_adj[v].push(c);
        self.check_adj[c].push(v);
    }

    /// Checks at maximal distance from `v`, or unreachable from it.
    fn farthest_checks(&mut self, v: usize) -> Vec<usize> {
        self.stamp += 1;
        let s = self.stamp;
        let m = self.check_adj.len();
        self.var_mark[v] = s;
        let mut frontier: Vec<usize> = Vec::new();
        for &c in &self.var_adj[v] {
            if self.check_mark[c] != s {
                self.check_mark[c] = s;
                frontier.push(c);
            }
        }
        let mut reached = frontier.len();
        loop {
            let mut next = Vec::new();
            for &c in &frontier {
                for &u in &self.check_adj[c] {
                    if self.var_mark[u] == s {
                        continue;
                    }
                    self.var_mark[u] = s;
                    for &c2 in &self.var_adj[u] {
                        if self.check_mark[c2] != s {
                            self.check_mark[c2] = s;
                            next.push(c2);
                        }
                    }
                }
            }
            if next.is_empty() {
                // the tree stopped growing: take the unreachable checks
                return (0..m).filter(|&c| self.check_mark[c] != s).collect();
            }
            reached += next.len();
            if reached == m {
                return next;
            }
            frontier = next;
        }
    }

    fn pick_lightest(&mut self, candidates: &[usize]) -> usize {
        let min = candidates
            .iter()
            .map(|&c| self.check_adj[c].len())
            .min()
            .expect("at least one candidate check");
        let lightest: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&c| self.check_adj[c].len() == min)
            .collect();
        lightest[self.rng.random_range(0..lightest.len())]
    }
}

/// Summary written next to an exported PEG matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PegManifest {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub distribution: DegreeDistribution,
    pub girth: Option<usize>,
    pub rank: usize,
}

impl PegManifest {
    pub fn describe(h: &SparseBinaryMatrix, seed: u64, distribution: &DegreeDistribution) -> Self {
        PegManifest {
            n: h.n_cols(),
            m: h.n_rows(),
            seed,
            distribution: distribution.clone(),
            girth: local_girth(h).global,
            rank: gf2::rank(h),
        }
    }

    /// Rate of the code actually defined, `1 − rank / n`.
    pub fn effective_rate(&self) -> f64 {
        1.0 - self.rank as f64 / self.n as f64
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "m {}", self.m);
        let _ = writeln!(s, "seed {}", self.seed);
        for (d, f) in self.distribution.fractions() {
            let _ = writeln!(s, "degree {d} {f}");
        }
        match self.girth {
            Some(g) => {
                let _ = writeln!(s, "girth {g}");
            }
            None => {
                let _ = writeln!(s, "girth inf");
            }
        }
        let _ = writeln!(s, "rank {}", self.rank);
        let _ = writeln!(s, "effective_rate {}", self.effective_rate());
        s
    }
}

/// Rate-1/2 PEG code of length `n`; the seed is advanced until the matrix
/// has full rank. Returns the matrix and the seed that produced it.
pub fn peg_rate_half_full_rank(n: usize, seed: u64, max_tries: u64) -> Result<(SparseBinaryMatrix, u64)> {
    let degrees = quantize_degrees(&DegreeDistribution::optimized_rate_half(), n)?;
    let m = n / 2;
    let mut best_rank = 0;
    for t in 0..max_tries.max(1) {
        let s = seed.wrapping_add(t);
        let h = peg_construct(n, m, &degrees, s)?;
        let r = gf2::rank(&h);
        if r == m {
            return Ok((h, s));
        }
        best_rank = best_rank.max(r);
    }
    Err(Error::RankDeficient {
        rank: best_rank,
        expected: m,
    })
}
