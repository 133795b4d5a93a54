//! Synthetic graph models.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, Graph};

/// Barabasi-Albert preferential attachment: a clique on `m0 + 1` nodes, then
/// each new node links to `m0` distinct existing nodes chosen with
/// probability proportional to degree.
pub fn generate_ba(n: usize, m0: usize, seed: u64) -> Result<Graph> {
    if m0 == 0 || n <= m0 {
        return Err(Error::InvalidParameter(format!("need n > m0 >= 1 (n = {n}, m0 = {m0})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(m0 * (m0 + 1) / 2 + (n - m0 - 1) * m0);
    // every endpoint once per incident edge, for degree-proportional draws
    let mut ends = Vec::with_capacity(2 * pairs.capacity());
    for a in 0..=m0 {
        for b in a + 1..=m0 {
            pairs.push((a, b));
            ends.extend([a, b]);
        }
    }
    let mut chosen = Vec::with_capacity(m0);
    for t in m0 + 1..n {
        chosen.clear();
        while chosen.len() < m0 {
            let w = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&w) {
                chosen.push(w);
            }
        }
        for &w in &chosen {
            pairs.push((w, t));
            ends.extend([w, t]);
        }
    }
    Graph::from_edges(n, &pairs)
}

/// Watts-Strogatz small world: a ring where each node links to its `k_ring`
/// nearest neighbours, each edge rewired with probability `p` to a uniform
/// endpoint that creates neither a loop nor a duplicate. Returns the largest
/// connected component.
pub fn generate_ws(n: usize, k_ring: usize, p: f64, seed: u64) -> Result<Graph> {
    if k_ring < 2 || !k_ring.is_multiple_of(2) || k_ring >= n {
        return Err(Error::InvalidParameter(format!(
            "k_ring = {k_ring} must be even, at least 2 and below n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut pairs = Vec::with_capacity(n * k_ring / 2);
    for j in 1..=k_ring / 2 {
        for i in 0..n {
            pairs.push((i, (i + j) % n));
        }
    }
    let mut present: HashSet<(usize, usize)> = pairs.iter().map(|&(a, b)| key(a, b)).collect();
    let mut degree = vec![k_ring; n];
    for idx in 0..pairs.len() {
        if rng.random::<f64>() >= p {
            continue;
        }
        let (a, b) = pairs[idx];
        if degree[a] >= n - 1 {
            continue;
        }
        let w = loop {
            let w = rng.random_range(0..n);
            if w != a && !present.contains(&key(a, w)) {
                break w;
            }
        };
        present.remove(&key(a, b));
        present.insert(key(a, w));
        degree[b] -= 1;
        degree[w] += 1;
        pairs[idx] = (a, w);
    }
    let g = Graph::from_edges(n, &pairs)?;
    if g.is_connected() {
        Ok(g)
    } else {
        Ok(largest_connected_component(&g)?.graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ba_edge_count() {
        let g = generate_ba(10, 2, 1).unwrap();
        assert_eq!(g.edge_count(), 17);
        assert!(g.is_connected());
    }

    #[test]
    fn ba_rejects_bad_parameters() {
        assert!(generate_ba(3, 3, 0).is_err());
        assert!(generate_ba(3, 0, 0).is_err());
    }

    #[test]
    fn ba_is_deterministic() {
        let a = generate_ba(200, 3, 9).unwrap();
        let b = generate_ba(200, 3, 9).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }

    #[test]
    fn ba_is_heavy_tailed() {
        for seed in 0..5 {
            let g = generate_ba(10_000, 2, seed).unwrap();
            let degrees = g.degrees();
            let mean = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
            let max = *degrees.iter().max().unwrap() as f64;
            assert!(max > 10.0 * mean, "seed {seed}: max {max}, mean {mean}");
        }
    }

    #[test]
    fn ws_without_rewiring_is_a_lattice() {
        let g = generate_ws(12, 4, 0.0, 0).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
        let c = generate_ws(9, 2, 0.0, 0).unwrap();
        assert_eq!(c.edge_count(), 9);
        assert!(c.degrees().iter().all(|&d| d == 2));
        assert_eq!(c.diameter().unwrap(), 4);
    }

    #[test]
    fn ws_rewiring_keeps_edge_count() {
        for seed in 0..10 {
            let g = generate_ws(50, 4, 0.1, seed).unwrap();
            if g.node_count() == 50 {
                assert_eq!(g.edge_count(), 100);
            }
        }
    }

    #[test]
    fn ws_rejects_bad_parameters() {
        assert!(generate_ws(10, 3, 0.1, 0).is_err());
        assert!(generate_ws(10, 10, 0.1, 0).is_err());
        assert!(generate_ws(10, 2, 1.5, 0).is_err());
    }
}
