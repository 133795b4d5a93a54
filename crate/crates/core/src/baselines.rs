//! Comparison strategies: random removal, shortest-path betweenness from the
//! target, and spanning-tree centrality. All of them skip bridges, so the
//! graph stays connected.

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::exact::PseudoinverseState;
use crate::graph::{EdgeId, Graph, NodeId};
use crate::selection::{check_budget, check_target, Selection, Step};

/// Whether scores are recomputed after each removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rescoring {
    #[default]
    Sequential,
    /// Score once and take edges in score order, skipping current bridges.
    Static,
}

const TIE: f64 = 1e-12;

fn step(g: &Graph, iteration: usize, edge: EdgeId, start: Instant) -> Step {
    Step {
        iteration,
        edge,
        endpoints: g.endpoints(edge),
        estimate: None,
        elapsed: start.elapsed(),
    }
}

/// Non-bridge edge with the highest score; ties within `1e-12` go to the
/// smallest id.
fn top_edge(g: &Graph, scores: &[f64]) -> Result<Option<EdgeId>> {
    let mut best: Option<(EdgeId, f64)> = None;
    for e in g.removable_edges()? {
        if best.is_none_or(|(_, s)| scores[e] > s + TIE) {
            best = Some((e, scores[e]));
        }
    }
    Ok(best.map(|(e, _)| e))
}

/// `k` edges picked uniformly among the current non-bridges, one at a time.
pub fn random_edges(g: &Graph, k: usize, seed: u64) -> Result<Selection> {
    check_budget(g, k)?;
    if !g.is_connected() {
        return Err(crate::Error::Disconnected);
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = g.clone();
    let mut steps = Vec::new();
    for iteration in 1..=k {
        let removable = g.removable_edges()?;
        if removable.is_empty() {
            break;
        }
        let e = removable[rng.random_range(0..removable.len())];
        g.remove_edge(e)?;
        steps.push(step(&g, iteration, e, start));
    }
    Ok(Selection::new(k, steps))
}

/// Sum over nodes `u` of the fraction of shortest `v`-`u` paths through each
/// edge, by one breadth-first search and a reverse dependency sweep.
pub fn betweenness_scores(g: &Graph, v: NodeId) -> Vec<f64> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([v]);
    dist[v] = 0;
    sigma[v] = 1.0;
    while let Some(a) = queue.pop_front() {
        order.push(a);
        for &(b, _) in g.neighbors(a) {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
            if dist[b] == dist[a] + 1 {
                sigma[b] += sigma[a];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    let mut score = vec![0.0f64; g.edge_capacity()];
    for &c in order.iter().rev() {
        for &(a, e) in g.neighbors(c) {
            if dist[a] != usize::MAX && dist[a] + 1 == dist[c] {
                let share = sigma[a] / sigma[c] * (1.0 + delta[c]);
                score[e] = share;
                delta[a] += share;
            }
        }
    }
    score
}

/// Greedy removal by betweenness with respect to the target.
pub fn betweenness_edges(g: &Graph, v: NodeId, k: usize, mode: Rescoring) -> Result<Selection> {
    check_target(g, v)?;
    check_budget(g, k)?;
    greedy_by_score(g, k, mode, (), |h, _| betweenness_scores(h, v), |_, _, _| Ok(()))
}

/// Effective resistance of every live edge; equals the fraction of spanning
/// trees containing it.
pub fn spanning_scores(g: &Graph, state: &PseudoinverseState) -> Vec<f64> {
    let mut score = vec![0.0; g.edge_capacity()];
    let live: Vec<(EdgeId, NodeId, NodeId)> = g.edges().collect();
    let values: Vec<f64> = live
        .par_iter()
        .map(|&(_, a, b)| state.entry(a, a) + state.entry(b, b) - 2.0 * state.entry(a, b))
        .collect();
    for ((e, _, _), r) in live.into_iter().zip(values) {
        score[e] = r;
    }
    score
}

/// Greedy removal by spanning-tree centrality, downdating the pseudoinverse
/// after each removal.
pub fn spanning_edges(g: &Graph, k: usize, mode: Rescoring) -> Result<Selection> {
    check_budget(g, k)?;
    let state = PseudoinverseState::new(g)?;
    greedy_by_score(g, k, mode, state, spanning_scores, |h, st, e| st.remove_edge(h, e))
}

fn greedy_by_score<S>(
    g: &Graph,
    k: usize,
    mode: Rescoring,
    mut state: S,
    score: impl Fn(&Graph, &S) -> Vec<f64>,
    commit: impl Fn(&Graph, &mut S, EdgeId) -> Result<()>,
) -> Result<Selection> {
    let start = Instant::now();
    let mut g = g.clone();
    let mut steps = Vec::new();
    let mut scores = score(&g, &state);
    for iteration in 1..=k {
        if mode == Rescoring::Sequential && iteration > 1 {
            scores = score(&g, &state);
        }
        let Some(e) = top_edge(&g, &scores)? else {
            break;
        };
        g.remove_edge(e)?;
        commit(&g, &mut state, e)?;
        steps.push(step(&g, iteration, e, start));
    }
    Ok(Selection::new(k, steps))
}
