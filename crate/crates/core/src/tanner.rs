//! Tanner graph adjacency, girth and short-cycle search.

use std::collections::{HashSet, VecDeque};

use crate::gf2::SparseBinaryMatrix;

/// Bipartite check/variable adjacency in compressed form.
///
/// Edges are numbered in check-major order: the edges of check `c` are
/// `check_ptr[c]..check_ptr[c + 1]`.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    n_checks: usize,
    n_vars: usize,
    check_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    var_ptr: Vec<usize>,
    /// Edge ids grouped by variable node.
    var_edges: Vec<usize>,
    /// Check node of each entry of `var_edges`.
    var_checks: Vec<usize>,
}

impl TannerGraph {
    pub fn new(h: &SparseBinaryMatrix) -> Self {
        let n_checks = h.n_rows();
        let n_vars = h.n_cols();
        let mut check_ptr = Vec::with_capacity(n_checks + 1);
        let mut edge_var = Vec::with_capacity(h.num_ones());
        check_ptr.push(0);
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            check_ptr.push(edge_var.len());
        }
        let mut var_ptr = vec![0; n_vars + 1];
        for &v in &edge_var {
            var_ptr[v + 1] += 1;
        }
        for j in 0..n_vars {
            var_ptr[j + 1] += var_ptr[j];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0; edge_var.len()];
        let mut var_checks = vec![0; edge_var.len()];
        for c in 0..n_checks {
            let start = check_ptr[c];
            for (offset, &v) in edge_var[start..check_ptr[c + 1]].iter().enumerate() {
                let e = start + offset;
                var_edges[fill[v]] = e;
                var_checks[fill[v]] = c;
                fill[v] += 1;
            }
        }
        TannerGraph {
            n_checks,
            n_vars,
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
            var_checks,
        }
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Variable nodes adjacent to check `c`.
    #[inline]
    pub fn check_vars(&self, c: usize) -> &[usize] {
        &self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
    }

    #[inline]
    pub fn check_edge_range(&self, c: usize) -> std::ops::Range<usize> {
        self.check_ptr[c]..self.check_ptr[c + 1]
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    /// Check nodes adjacent to variable `v`.
    #[inline]
    pub fn var_checks(&self, v: usize) -> &[usize] {
        &self.var_checks[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// Edge ids incident to variable `v`.
    #[inline]
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[self.var_ptr[v]..self.var_ptr[v + 1]]
    }

    /// Length of the shortest cycle through check node `c`, if any.
    pub fn check_girth(&self, c: usize) -> Option<usize> {
        // Nodes: checks are 0..m, variables m..m+n.
        let m = self.n_checks;
        let total = m + self.n_vars;
        let mut dist = vec![usize::MAX; total];
        let mut branch = vec![usize::MAX; total];
        let mut parent = vec![usize::MAX; total];
        let mut queue = VecDeque::new();
        dist[c] = 0;
        queue.push_back(c);
        let mut best: Option<usize> = None;
        while let Some(u) = queue.pop_front() {
            if let Some(b) = best {
                // any cycle closed from here on is at least 2*dist(u) long
                if 2 * dist[u] >= b {
                    break;
                }
            }
            let neighbors: Box<dyn Iterator<Item = usize>> = if u < m {
                Box::new(self.check_vars(u).iter().map(|&v| v + m))
            } else {
                Box::new(self.var_checks(u - m).iter().copied())
            };
            for w in neighbors {
                if w == parent[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    branch[w] = if u == c { w } else { branch[u] };
                    queue.push_back(w);
                } else if w != c && u != c && branch[w] != branch[u] {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
        best
    }
}

/// Per-check shortest cycle lengths and the global girth.
///
/// `None` marks a check node on no cycle (its component is a tree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GirthReport {
    pub local: Vec<Option<usize>>,
    pub global: Option<usize>,
}

impl GirthReport {
    /// Distinct finite local girths, ascending.
    pub fn local_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.local.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Breadth-first search from every check node of the Tanner graph of `h`.
pub fn local_girth(h: &SparseBinaryMatrix) -> GirthReport {
    let g = TannerGraph::new(h);
    let local: Vec<Option<usize>> = (0..g.n_checks()).map(|c| g.check_girth(c)).collect();
    let global = local.iter().flatten().min().copied();
    GirthReport { local, global }
}

/// A set of check nodes closing a cycle of the given length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckCycle {
    /// Increasing check indices, `length / 2` of them.
    pub checks: Vec<usize>,
    pub length: usize,
}

/// Enumerates check sets that close a cycle of exactly `length` edges.
///
/// Each distinct set of checks is reported once, in order of its smallest
/// check index. Enumeration stops after `limit` sets.
pub fn cycle_check_sets(g: &TannerGraph, length: usize, limit: usize) -> Vec<CheckCycle> {
    assert!(length >= 4 && length.is_multiple_of(2), "cycle length must be even and >= 4");
    let half = length / 2;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut checks = Vec::with_capacity(half);
    let mut vars = Vec::with_capacity(half);
    for start in 0..g.n_checks() {
        if out.len() >= limit {
            break;
        }
        checks.clear();
        vars.clear();
        checks.push(start);
        walk(g, start, half, &mut checks, &mut vars, &mut seen, &mut out, limit);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    g: &TannerGraph,
    start: usize,
    half: usize,
    checks: &mut Vec<usize>,
    vars: &mut Vec<usize>,
    seen: &mut HashSet<Vec<usize>>,
    out: &mut Vec<CheckCycle>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let cur = *checks.last().expect("path starts at a check");
    for &v in g.check_vars(cur) {
        if vars.contains(&v) {
            continue;
        }
        for &next in g.var_checks(v) {
            if next == cur {
                continue;
            }
            if checks.len() == half {
                // closing edge back to the start
                if next == start {
                    let mut set = checks.clone();
                    set.sort_unstable();
                    if seen.insert(set.clone()) {
                        out.push(CheckCycle {
                            checks: set,
                            length: 2 * half,
                        });
                        if out.len() >= limit {
                            return;
                        }
                    }
                }
                continue;
            }
            // the start is the smallest check of the cycle
            if next <= start || checks.contains(&next) {
                continue;
            }
            checks.push(next);
            vars.push(v);
            walk(g, start, half, checks, vars, seen, out, limit);
            vars.pop();
            checks.pop();
            if out.len() >= limit {
                return;
            }
        }
    }
}
