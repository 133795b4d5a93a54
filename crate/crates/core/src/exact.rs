//! Dense exact resistance machinery and the exact greedy.
//!
//! Everything here works on the Moore-Penrose pseudoinverse of the graph
//! Laplacian, built as `(L + J/n)^-1 - J/n` from a Cholesky factorization.
//! Removing a non-bridge edge `e` is the rank-1 downdate `L - b_e b_e^T`,
//! whose pseudoinverse follows from Sherman-Morrison in O(n^2).

use std::time::Instant;

use faer::{Mat, Side};
use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::selection::{check_budget, check_target, Selection, Step};

/// `1 - R_e` at or below this is treated as a bridge.
pub const BRIDGE_TOLERANCE: f64 = 1e-9;

/// Default cap on the number of subsets `brute_force` will enumerate.
pub const DEFAULT_SUBSET_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone)]
pub struct PseudoinverseState {
    ldag: Mat<f64>,
    trace: f64,
}

/// The three scalars of the closed-form marginal gain for one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeTerms {
    /// `1 - b_e^T L^+ b_e`, zero exactly for bridges.
    pub a: f64,
    /// `b_e^T (L^+)^2 b_e`.
    pub b: f64,
    /// `(L^+ b_e)_v^2`.
    pub c: f64,
}

impl PseudoinverseState {
    pub fn new(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        if n < 2 {
            return Err(Error::SingleNode);
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let shift = 1.0 / n as f64;
        let mut m = Mat::<f64>::from_fn(n, n, |_, _| shift);
        for u in 0..n {
            m[(u, u)] += g.degree(u) as f64;
        }
        for (_, u, v) in g.edges() {
            m[(u, v)] -= 1.0;
            m[(v, u)] -= 1.0;
        }
        let llt = m
            .llt(Side::Lower)
            .map_err(|e| Error::Numerical(format!("cholesky of L + J/n failed: {e:?}")))?;
        let inv = faer::linalg::solvers::DenseSolveCore::inverse(&llt);
        let ldag = Mat::from_fn(n, n, |i, j| 0.5 * (inv[(i, j)] + inv[(j, i)]) - shift);
        let trace = (0..n).map(|i| ldag[(i, i)]).sum();
        Ok(Self { ldag, trace })
    }

    pub fn node_count(&self) -> usize {
        self.ldag.nrows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.ldag
    }

    pub fn entry(&self, i: NodeId, j: NodeId) -> f64 {
        self.ldag[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn effective_resistance(&self, x: NodeId, y: NodeId) -> Result<f64> {
        let n = self.node_count();
        for node in [x, y] {
            if node >= n {
                return Err(Error::NodeOutOfRange(node));
            }
        }
        if x == y {
            return Err(Error::SameNode(x));
        }
        Ok(self.ldag[(x, x)] + self.ldag[(y, y)] - 2.0 * self.ldag[(x, y)])
    }

    /// Sum of effective resistances from `v` to every other node, in the
    /// matrix form `n L+_vv + tr(L+)`.
    pub fn resistance_distance(&self, v: NodeId) -> f64 {
        self.node_count() as f64 * self.ldag[(v, v)] + self.trace
    }

    pub fn information_centrality(&self, v: NodeId) -> f64 {
        self.node_count() as f64 / self.resistance_distance(v)
    }

    /// `L+ b_e` for `e = (x, y)`.
    fn edge_potential(&self, x: NodeId, y: NodeId) -> Vec<f64> {
        let cx = self.ldag.col_as_slice(x);
        let cy = self.ldag.col_as_slice(y);
        cx.iter().zip(cy).map(|(p, q)| p - q).collect()
    }

    pub fn edge_terms(&self, (x, y): (NodeId, NodeId), v: NodeId) -> EdgeTerms {
        let cx = self.ldag.col_as_slice(x);
        let cy = self.ldag.col_as_slice(y);
        let b = cx.iter().zip(cy).map(|(p, q)| (p - q) * (p - q)).sum();
        let resistance = cx[x] - cx[y] - cy[x] + cy[y];
        let pv = cx[v] - cy[v];
        EdgeTerms {
            a: 1.0 - resistance,
            b,
            c: pv * pv,
        }
    }

    /// Change in the information centrality of `v` from removing edge
    /// `(x, y)`, or `None` when the edge is a bridge.
    pub fn marginal_gain(&self, endpoints: (NodeId, NodeId), v: NodeId) -> Option<f64> {
        let EdgeTerms { a, b, c } = self.edge_terms(endpoints, v);
        if a <= BRIDGE_TOLERANCE {
            return None;
        }
        let n = self.node_count() as f64;
        let lvv = self.ldag[(v, v)];
        let before = n * lvv + self.trace;
        let after = n * a * lvv + n * c + a * self.trace + b;
        Some(-(n * b + n * n * c) / (after * before))
    }

    /// Sherman-Morrison downdate for removing the non-bridge edge `e`. Only
    /// the endpoints of `e` are read from `g`, so `e` may already be removed
    /// there.
    pub fn remove_edge(&mut self, g: &Graph, e: EdgeId) -> Result<()> {
        let (x, y) = g.endpoints(e);
        let w = self.edge_potential(x, y);
        let a = 1.0 - (w[x] - w[y]);
        if a <= BRIDGE_TOLERANCE {
            return Err(Error::Bridge(e));
        }
        let n = self.node_count();
        for j in 0..n {
            let s = w[j] / a;
            let col = self.ldag.col_as_slice_mut(j);
            for (dst, wi) in col.iter_mut().zip(&w) {
                *dst += wi * s;
            }
        }
        self.trace += w.iter().map(|t| t * t).sum::<f64>() / a;
        Ok(())
    }
}

/// Information centrality of `v` by a fresh dense pseudoinverse.
pub fn information_centrality(g: &Graph, v: NodeId) -> Result<f64> {
    check_target(g, v)?;
    Ok(PseudoinverseState::new(g)?.information_centrality(v))
}

/// Greedy that removes, `k` times, the non-bridge edge with the most negative
/// exact marginal gain. Ties go to the smallest edge id.
pub fn exact_sm(g: &Graph, v: NodeId, k: usize) -> Result<Selection> {
    check_target(g, v)?;
    check_budget(g, k)?;
    let start = Instant::now();
    let mut g = g.clone();
    let mut state = PseudoinverseState::new(&g)?;
    let mut steps = Vec::with_capacity(k);
    for iteration in 1..=k {
        let candidates = g.removable_edges()?;
        let best = candidates
            .par_iter()
            .filter_map(|&e| state.marginal_gain(g.endpoints(e), v).map(|gain| (e, gain)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((edge, _)) = best else { break };
        let endpoints = g.endpoints(edge);
        g.remove_edge(edge)?;
        state.remove_edge(&g, edge)?;
        steps.push(Step {
            iteration,
            edge,
            endpoints,
            estimate: Some(state.information_centrality(v)),
            elapsed: start.elapsed(),
        });
    }
    Ok(Selection::new(k, steps))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BruteForce {
    Optimal { edges: Vec<EdgeId>, centrality: f64 },
    /// No `k`-subset keeps the graph connected.
    Infeasible,
}

/// Exhaustive minimum of `I_v` over all connectivity-preserving `k`-subsets of
/// live edges. Subsets are visited in lexicographic order of sorted edge ids
/// and only a strictly smaller value replaces the incumbent.
pub fn brute_force(g: &Graph, v: NodeId, k: usize, budget: u128) -> Result<BruteForce> {
    check_target(g, v)?;
    let edges = g.edge_ids();
    if k == 0 || k > edges.len() {
        return Err(Error::InvalidK { k, m: edges.len() });
    }
    let subsets = binomial(edges.len() as u128, k as u128);
    if subsets > budget {
        return Err(Error::BudgetExceeded { subsets, budget });
    }
    let best = edges
        .iter()
        .copied()
        .combinations(k)
        .filter_map(|subset| {
            let h = g.without_edges(&subset).ok()?;
            if !h.is_connected() {
                return None;
            }
            let value = PseudoinverseState::new(&h).ok()?.information_centrality(v);
            Some((subset, value))
        })
        .fold(None::<(Vec<EdgeId>, f64)>, |best, (subset, value)| match best {
            Some((_, b)) if value >= b - 1e-12 => best,
            _ => Some((subset, value)),
        });
    Ok(match best {
        Some((edges, centrality)) => BruteForce::Optimal { edges, centrality },
        None => BruteForce::Infeasible,
    })
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Exact effective resistance diameter (largest pairwise resistance).
pub fn resistance_diameter(g: &Graph) -> Result<f64> {
    let state = PseudoinverseState::new(g)?;
    let n = g.node_count();
    let mut best = 0.0f64;
    for x in 0..n {
        for y in x + 1..n {
            best = best.max(state.effective_resistance(x, y)?);
        }
    }
    Ok(best)
}

/// A configuration where removing `second` helps less on the empty set than
/// after `first` was removed, which supermodularity of `I_v` would forbid.
#[derive(Debug, Clone)]
pub struct SupermodularityViolation {
    pub graph: Graph,
    pub target: NodeId,
    pub first: EdgeId,
    pub second: EdgeId,
    /// `I_v({second}) - I_v({})`
    pub gain_alone: f64,
    /// `I_v({first, second}) - I_v({first})`
    pub gain_after_first: f64,
}

/// Searches every connected graph on `n` labelled nodes (n <= 7) for a
/// violation of `f(S + a) - f(S) <= f(H + a) - f(H)` with `S = {}` and
/// `H = {first}`, where `f = I_v`.
pub fn find_supermodularity_violation(n: usize) -> Result<Option<SupermodularityViolation>> {
    if !(2..=7).contains(&n) {
        return Err(Error::InvalidParameter(format!("n = {n} outside 2..=7")));
    }
    let slots: Vec<(NodeId, NodeId)> = (0..n).tuple_combinations().collect();
    for mask in 1u32..(1 << slots.len()) {
        let pairs: Vec<_> = (0..slots.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| slots[i])
            .collect();
        let g = Graph::from_edges(n, &pairs)?;
        if !g.is_connected() {
            continue;
        }
        let base = PseudoinverseState::new(&g)?;
        for first in g.removable_edges()? {
            let mut h = g.clone();
            h.remove_edge(first)?;
            let mut after_first = base.clone();
            after_first.remove_edge(&g, first)?;
            for second in h.removable_edges()? {
                for v in 0..n {
                    let Some(alone) = base.marginal_gain(g.endpoints(second), v) else {
                        continue;
                    };
                    let Some(later) = after_first.marginal_gain(g.endpoints(second), v) else {
                        continue;
                    };
                    if alone > later + 1e-9 {
                        return Ok(Some(SupermodularityViolation {
                            graph: g,
                            target: v,
                            first,
                            second,
                            gain_alone: alone,
                            gain_after_first: later,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}
