//! Property-based checks of the structural invariants.

use std::collections::HashMap;

use infocen::bench::{Algorithm, ExperimentConfig, GraphSource, PhiBound, TargetSpec};
use infocen::exact::{information_centrality, PseudoinverseState};
use infocen::graph::{Graph, NodeId};
use infocen::schur::approxi_sc;
use infocen::walks::{Lambda, SamplingConfig, SideTag, WalkStore};
use proptest::prelude::*;

/// Connected graph: a random spanning tree plus random extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n)
        .prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            let extra = proptest::collection::vec((0..n, 0..n), 0..2 * n);
            (Just(n), parents, extra)
        })
        .prop_map(|(n, parents, extra)| {
            let mut pairs: Vec<(usize, usize)> = parents.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            for (a, b) in extra {
                let key = (a.min(b), a.max(b));
                if a != b && !pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == key) {
                    pairs.push((a, b));
                }
            }
            Graph::from_edges(n, &pairs).unwrap()
        })
}

fn sampling() -> SamplingConfig {
    SamplingConfig::default().with_epsilon(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn marginal_gain_matches_recompute(g in connected_graph(14), pick in any::<prop::sample::Index>()) {
        let v = pick.index(g.node_count());
        let state = PseudoinverseState::new(&g).unwrap();
        let before = state.information_centrality(v);
        for e in g.edge_ids() {
            let h = g.without_edges(&[e]).unwrap();
            match state.marginal_gain(g.endpoints(e), v) {
                Some(gain) => {
                    prop_assert!(h.is_connected());
                    let fresh = information_centrality(&h, v).unwrap() - before;
                    prop_assert!((gain - fresh).abs() < 1e-9, "{gain} vs {fresh}");
                    // removing any non-bridge strictly lowers centrality
                    prop_assert!(gain < 0.0);
                }
                None => prop_assert!(!h.is_connected()),
            }
        }
    }

    #[test]
    fn downdates_match_fresh_pseudoinverse(g in connected_graph(14), seed in any::<u64>()) {
        let mut h = g.clone();
        let mut state = PseudoinverseState::new(&h).unwrap();
        for i in 0..5 {
            let removable = h.removable_edges().unwrap();
            if removable.is_empty() {
                break;
            }
            let e = removable[(seed as usize).wrapping_add(i) % removable.len()];
            h.remove_edge(e).unwrap();
            state.remove_edge(&h, e).unwrap();
        }
        let fresh = PseudoinverseState::new(&h).unwrap();
        for i in 0..h.node_count() {
            for j in 0..h.node_count() {
                prop_assert!((state.entry(i, j) - fresh.entry(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bridges_are_exactly_the_disconnecting_edges(g in connected_graph(16)) {
        let mask = g.bridge_mask().unwrap();
        for e in g.edge_ids() {
            let h = g.without_edges(&[e]).unwrap();
            prop_assert_eq!(mask[e], !h.is_connected());
        }
    }

    #[test]
    fn walk_maps_are_complete(g in connected_graph(10), pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let v = pick.index(g.node_count());
        let params = sampling().resolve(&g, v).unwrap();
        let store = WalkStore::sample(&g, v, params, seed).unwrap();
        check_maps(&g, &store)?;
    }

    #[test]
    fn repaired_walks_stay_consistent(g in connected_graph(10), pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let v = pick.index(g.node_count());
        let params = sampling().resolve(&g, v).unwrap();
        let mut store = WalkStore::sample(&g, v, params, seed).unwrap();
        let mut h = g.clone();
        for _ in 0..3 {
            let removable = h.removable_edges().unwrap();
            let Some(&e) = removable.first() else { break };
            h.remove_edge(e).unwrap();
            store.repair(&h, e).unwrap();
            for w in store.valid_walks() {
                prop_assert!(!h.is_removed(w.center));
                for side in [w.side_a, w.side_b] {
                    for pair in side.windows(2) {
                        prop_assert!(h.find_edge(pair[0] as usize, pair[1] as usize).is_some());
                    }
                }
            }
            check_maps(&h, &store)?;
        }
    }

    #[test]
    fn config_round_trips(
        k in 1usize..50,
        eps in 0.001f64..0.999,
        alpha in 0.001f64..0.999,
        gamma in 0.0001f64..0.5,
        lambda in prop_oneof![Just(Lambda::Estimated), (0.01f64..0.99).prop_map(Lambda::Fixed)],
        phi in prop_oneof![Just(PhiBound::Diameter), Just(PhiBound::Resistance), (1.0f64..50.0).prop_map(PhiBound::Fixed)],
        seed in any::<u64>(),
        count in 1usize..100,
        timings in any::<bool>(),
    ) {
        let mut cfg = ExperimentConfig::paper(GraphSource::Ba { n: 100, m0: 3, seed: 2 });
        cfg.algorithms = vec![Algorithm::Exact, Algorithm::Fast];
        cfg.k = k;
        cfg.epsilon = eps;
        cfg.alpha = alpha;
        cfg.gamma = gamma;
        cfg.lambda = lambda;
        cfg.phi = phi;
        cfg.seed = seed;
        cfg.targets = TargetSpec::Random(count);
        cfg.timings = timings;
        let back = ExperimentConfig::from_kv(&cfg.to_kv()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

/// Every node and traversed edge of every valid walk is indexed at its first
/// position, and nothing else is.
fn check_maps(g: &Graph, store: &WalkStore) -> Result<(), TestCaseError> {
    let mut want_nodes: HashMap<NodeId, Vec<(usize, SideTag, u32)>> = HashMap::new();
    let mut want_edges: HashMap<usize, Vec<(usize, SideTag, u32)>> = HashMap::new();
    for w in store.valid_walks() {
        want_edges.entry(w.center).or_default().push((w.id, SideTag::Center, 0));
        for (tag, side) in [(SideTag::A, w.side_a), (SideTag::B, w.side_b)] {
            let mut seen_nodes = Vec::new();
            for (p, &u) in side.iter().enumerate() {
                if !seen_nodes.contains(&u) {
                    seen_nodes.push(u);
                    want_nodes.entry(u as usize).or_default().push((w.id, tag, p as u32));
                }
            }
            let mut seen_edges = Vec::new();
            for (p, pair) in side.windows(2).enumerate() {
                let e = g.find_edge(pair[0] as usize, pair[1] as usize).unwrap();
                if !seen_edges.contains(&e) {
                    seen_edges.push(e);
                    want_edges.entry(e).or_default().push((w.id, tag, p as u32));
                }
            }
        }
    }
    for u in 0..g.node_count() {
        let mut got: Vec<_> = store.node_entries(u).map(|en| (en.walk, en.side, en.pos)).collect();
        let mut want = want_nodes.remove(&u).unwrap_or_default();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want, "node {}", u);
    }
    for e in g.edge_ids() {
        let mut got: Vec<_> = store.edge_entries(e).map(|en| (en.walk, en.side, en.pos)).collect();
        let mut want = want_edges.remove(&e).unwrap_or_default();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want, "edge {}", e);
    }
    Ok(())
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let g = infocen::generators::generate_ba(60, 2, 4).unwrap();
    let config = sampling();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let params = config.resolve(&g, 5).unwrap();
            let mut dump = Vec::new();
            WalkStore::sample(&g, 5, params, 11).unwrap().write_dump(&mut dump).unwrap();
            (dump, approxi_sc(&g, 5, 3, &config, 11).unwrap().edges)
        })
    };
    assert_eq!(run(1), run(4));
}
