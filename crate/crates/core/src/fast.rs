//! FastICM: one up-front walk sample, a Bernoulli node subset for the
//! resistance sum, and incremental walk repair between greedy steps.

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::schur::{best_candidate, evaluate_candidates, initialization, Positions, SchurWeights};
use crate::selection::{check_budget, check_target, Selection, Step};
use crate::walks::{derive_seed, SamplingConfig, WalkStore};

/// Stream ids for seeds derived from the master seed.
const WALK_STREAM: u64 = 0;
const SUBSET_STREAM: u64 = u64::MAX;

/// Error parameters of the sum estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumEstimatorParams {
    pub alpha: f64,
    /// Upper bound on the effective resistance diameter.
    pub phi: f64,
}

impl SumEstimatorParams {
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if !(phi >= 1.0 && phi.is_finite()) {
            return Err(Error::InvalidParameter(format!("phi = {phi} must be at least 1")));
        }
        Ok(Self { alpha, phi })
    }

    pub fn beta(&self) -> f64 {
        self.alpha / 2.0
    }

    /// Walk accuracy `alpha / (2 phi)`.
    pub fn epsilon(&self) -> f64 {
        self.alpha / (2.0 * self.phi)
    }
}

/// Inclusion probability `phi sqrt(ln n / n) / beta`, clamped to 1.
pub fn inclusion_probability(n: usize, phi: f64, beta: f64) -> f64 {
    let n = n as f64;
    (phi * (n.ln() / n).sqrt() / beta).min(1.0)
}

/// A Bernoulli node sample and its inclusion probability.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSample {
    pub nodes: Vec<NodeId>,
    pub p: f64,
}

/// Includes every node except `target` independently with probability
/// `min(1, p)`.
pub fn bernoulli_subset(n: usize, target: NodeId, phi: f64, beta: f64, seed: u64) -> Result<NodeSample> {
    if n < 2 {
        return Err(Error::SingleNode);
    }
    if target >= n {
        return Err(Error::NodeOutOfRange(target));
    }
    if !(phi > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParameter("phi and beta must be positive".into()));
    }
    let p = inclusion_probability(n, phi, beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .filter(|&u| u != target)
        .filter(|_| p >= 1.0 || rng.random::<f64>() < p)
        .collect();
    Ok(NodeSample { nodes, p })
}

/// Horvitz-Thompson estimate `sum / p` of a total from Bernoulli samples.
pub fn estimate_sum(values: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1]")));
    }
    Ok(values.iter().sum::<f64>() / p)
}

/// Settings for [`fast_icm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastConfig {
    pub estimator: SumEstimatorParams,
    /// `epsilon` is overridden by `alpha / (2 phi)`.
    pub sampling: SamplingConfig,
    /// Resample all walks every this many iterations instead of repairing.
    pub resample_every: Option<usize>,
}

impl FastConfig {
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            estimator: SumEstimatorParams::new(alpha, phi)?,
            sampling: SamplingConfig::default(),
            resample_every: None,
        })
    }
}

/// Walk state kept across greedy steps.
struct State {
    store: WalkStore,
    weights: SchurWeights,
}

fn sample_state(g: &Graph, v: NodeId, q: &[NodeId], config: &FastConfig, seed: u64) -> Result<State> {
    let sampling = config.sampling.with_epsilon(config.estimator.epsilon());
    let params = sampling.resolve(g, v)?;
    let (weights, store) = initialization(g, v, q, params, seed)?;
    Ok(State { store, weights })
}

/// Realized inclusion probability, scaled down by the fraction of sampled
/// nodes that have an estimate.
fn effective_p(p: f64, weights: &SchurWeights) -> f64 {
    let q = weights.q_len();
    let covered = weights.covered();
    if covered == 0 {
        return 0.0;
    }
    p * covered as f64 / q as f64
}

/// Estimated resistance distance `R^_v` from the current state.
pub fn estimated_resistance_distance(weights: &SchurWeights, p: f64) -> Option<f64> {
    let p_eff = effective_p(p, weights);
    (p_eff > 0.0).then(|| weights.estimated_sum() / p_eff)
}

/// Greedy edge removal with one walk sample, repaired after each removal.
pub fn fast_icm(g: &Graph, v: NodeId, k: usize, config: &FastConfig, seed: u64) -> Result<Selection> {
    check_target(g, v)?;
    check_budget(g, k)?;
    let start = Instant::now();
    let n = g.node_count();
    let est = config.estimator;
    let sample = bernoulli_subset(n, v, est.phi, est.beta(), derive_seed(seed, SUBSET_STREAM))?;
    if sample.p >= 1.0 {
        log::info!("inclusion probability clamped to 1; the sum is evaluated exactly over all nodes");
    }
    if sample.nodes.is_empty() {
        return Err(Error::InvalidParameter("Bernoulli sample is empty".into()));
    }
    let mut g = g.clone();
    let mut state = sample_state(&g, v, &sample.nodes, config, derive_seed(seed, WALK_STREAM))?;
    log::info!(
        "sampled {} nodes (p = {:.4}); {} of them covered by walks",
        sample.nodes.len(),
        sample.p,
        state.weights.covered()
    );
    let mut pos = Positions::new(n);
    let mut steps = Vec::with_capacity(k);
    for iteration in 0..k {
        if let Some(every) = config.resample_every.filter(|&r| r > 0) {
            if iteration > 0 && iteration % every == 0 {
                state = sample_state(&g, v, &sample.nodes, config, derive_seed(seed, iteration as u64))?;
            }
        }
        let bridge = g.bridge_mask()?;
        let scores = evaluate_candidates(&g, &state.store, &state.weights)?;
        let Some((edge, _)) = best_candidate(&scores, &bridge) else {
            break;
        };
        g.remove_edge(edge)?;
        assert!(g.is_connected(), "committed edge {edge} disconnected the graph");

        let affected = state.store.walks_through_edge(edge);
        for &id in &affected {
            state.weights.apply_walk(&state.store.walk(id), -1.0, &mut pos);
        }
        state.store.repair(&g, edge)?;
        for &id in &affected {
            state.weights.apply_walk(&state.store.walk(id), 1.0, &mut pos);
        }
        state.weights.settle();

        let estimate = estimated_resistance_distance(&state.weights, sample.p).map(|r| n as f64 / r);
        steps.push(Step {
            iteration: iteration + 1,
            edge,
            endpoints: g.endpoints(edge),
            estimate,
            elapsed: start.elapsed(),
        });
    }
    Ok(Selection::new(k, steps))
}
