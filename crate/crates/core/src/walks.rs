//! Truncated random walks toward a target node.
//!
//! For every live edge `(i, j)` and replicate `r`, two independent walks start
//! at `i` and `j` and stop at the first visit of the target `v`. Joined through
//! the edge they form one combined walk `v ... i - j ... v`; it is valid only
//! when both sides reach `v` within `max_len` steps. Shortcutting a combined
//! walk at the first visits of a larger terminal set yields the weights of an
//! approximate Schur complement onto that set.
//!
//! Node sequences live in flat arenas addressed by spans. A repaired side is
//! written to the end of the arena and its old span becomes garbage until the
//! next compaction. Map entries carry the generation of the walk they were
//! recorded for; entries from an older generation are stale and skipped.

use std::io::{self, Read, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

pub type WalkId = usize;

/// Default cap on the per-side length budget.
pub const DEFAULT_MAX_LEN_CAP: usize = 10_000;

/// Resolved sampling parameters for one walk store.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    /// Maximum number of steps per side.
    pub max_len: usize,
    /// Target ratio of invalid walks.
    pub gamma: f64,
    /// Estimate of the spectral radius of the transition matrix with the target removed.
    pub lambda: f64,
    /// Replicates per edge.
    pub rho: usize,
    pub epsilon: f64,
}

impl TruncationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_owned()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda must lie in (0, 1)");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if self.rho == 0 {
            return bad("rho must be at least 1");
        }
        if self.max_len == 0 {
            return bad("max_len must be at least 1");
        }
        Ok(())
    }
}

/// How the spectral radius in the length budget is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    Fixed(f64),
    /// Computed for the actual graph and target by power iteration.
    Estimated,
}

impl Default for Lambda {
    fn default() -> Self {
        Lambda::Fixed(0.95)
    }
}

impl std::fmt::Display for Lambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lambda::Fixed(x) => write!(f, "{x:?}"),
            Lambda::Estimated => f.write_str("auto"),
        }
    }
}

impl std::str::FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Lambda::Estimated),
            x => x
                .parse()
                .map(Lambda::Fixed)
                .map_err(|_| Error::InvalidParameter(format!("lambda must be a number or 'auto', got '{s}'"))),
        }
    }
}

/// Spectral radius of the walk transition matrix restricted to the nodes
/// other than `v`. Runs power iteration on the lazy symmetric form
/// `(I + D^-1/2 A D^-1/2) / 2`, whose spectrum is nonnegative.
pub fn spectral_radius_without(g: &Graph, v: NodeId) -> f64 {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|u| if g.degree(u) > 0 { 1.0 / (g.degree(u) as f64).sqrt() } else { 0.0 })
        .collect();
    let mut x: Vec<f64> = (0..n)
        .map(|u| if u == v { 0.0 } else { (g.degree(u) as f64).sqrt() })
        .collect();
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut estimate = 0.0;
    for _ in 0..20_000 {
        let len = norm(&x);
        if len == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|a| *a /= len);
        let mut y = vec![0.0; n];
        for u in (0..n).filter(|&u| u != v) {
            let s: f64 = g
                .neighbors(u)
                .iter()
                .filter(|&&(w, _)| w != v)
                .map(|&(w, _)| x[w] * inv_sqrt[w])
                .sum();
            y[u] = 0.5 * (x[u] + s * inv_sqrt[u]);
        }
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        x = y;
        if (rayleigh - estimate).abs() < 1e-12 {
            estimate = rayleigh;
            break;
        }
        estimate = rayleigh;
    }
    (2.0 * estimate - 1.0).clamp(0.0, 1.0)
}

/// Unresolved sampling settings; `rho` and `max_len` depend on the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub epsilon: f64,
    pub gamma: f64,
    pub lambda: Lambda,
    /// Constant `c` in `rho = ceil(c ln n / epsilon^2)`.
    pub rho_constant: f64,
    pub max_len_cap: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            gamma: 1e-3,
            lambda: Lambda::default(),
            rho_constant: 0.25,
            max_len_cap: DEFAULT_MAX_LEN_CAP,
        }
    }
}

impl SamplingConfig {
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn resolve(&self, g: &Graph, v: NodeId) -> Result<TruncationParams> {
        if !(self.rho_constant > 0.0) {
            return Err(Error::InvalidParameter("rho constant must be positive".into()));
        }
        if v >= g.node_count() {
            return Err(Error::NodeOutOfRange(v));
        }
        let lambda = match self.lambda {
            Lambda::Fixed(x) => x,
            // a radius of exactly one would make the budget infinite
            Lambda::Estimated => spectral_radius_without(g, v).min(1.0 - 1e-12),
        };
        let target_degree = g.degree(v) as f64;
        let norm = (g.degrees().iter().map(|&d| (d * d) as f64).sum::<f64>()
            - target_degree * target_degree)
            .max(0.0)
            .sqrt();
        let params = TruncationParams {
            max_len: max_walk_length(
                g.edge_count(),
                g.node_count(),
                self.gamma,
                lambda,
                norm,
                self.max_len_cap,
            ),
            gamma: self.gamma,
            lambda,
            rho: replicates(g.node_count(), self.epsilon, self.rho_constant),
            epsilon: self.epsilon,
        };
        params.validate()?;
        Ok(params)
    }
}

/// `rho = max(1, ceil(c ln n / epsilon^2))`.
pub fn replicates(n: usize, epsilon: f64, constant: f64) -> usize {
    let raw = (constant * (n.max(2) as f64).ln() / (epsilon * epsilon)).ceil();
    if raw.is_finite() {
        (raw as usize).max(1)
    } else {
        usize::MAX
    }
}

/// Walk length budget `log(m gamma / (sqrt(n - 1) |d_{-v}|_2)) / log(lambda)`,
/// rounded up and clamped to `[1, cap]`.
pub fn max_walk_length(
    m: usize,
    n: usize,
    gamma: f64,
    lambda: f64,
    degree_norm_without_target: f64,
    cap: usize,
) -> usize {
    let ratio = m as f64 * gamma / ((n.saturating_sub(1) as f64).sqrt() * degree_norm_without_target);
    let len = (ratio.ln() / lambda.ln()).ceil();
    if len.is_nan() || len < 1.0 {
        1
    } else if len >= cap as f64 {
        cap
    } else {
        len as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideTag {
    A,
    B,
    /// The walk's own center edge (edge maps only).
    Center,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Span {
    start: usize,
    len: u32,
}

impl Span {
    fn range(self) -> std::ops::Range<usize> {
        self.start..self.start + self.len as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct SideSpans {
    nodes: Span,
    firsts: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct WalkHeader {
    center: EdgeId,
    replicate: u32,
    generation: u32,
    valid: bool,
    a: SideSpans,
    b: SideSpans,
}

/// `(walk, side, first position)` of a node or edge on a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapEntry {
    pub walk: WalkId,
    pub side: SideTag,
    pub pos: u32,
    generation: u32,
}

/// Read-only view of one combined walk.
#[derive(Debug, Clone, Copy)]
pub struct WalkView<'a> {
    pub id: WalkId,
    pub center: EdgeId,
    pub replicate: u32,
    pub generation: u32,
    pub valid: bool,
    /// Side from the first endpoint of the center edge outward, ending at the target.
    pub side_a: &'a [u32],
    pub side_b: &'a [u32],
    /// Distinct nodes of each side with their first position, in position order.
    pub firsts_a: &'a [(u32, u32)],
    pub firsts_b: &'a [(u32, u32)],
}

impl WalkView<'_> {
    /// Steps on side A (its node count minus one).
    pub fn len_a(&self) -> usize {
        self.side_a.len().saturating_sub(1)
    }

    pub fn len_b(&self) -> usize {
        self.side_b.len().saturating_sub(1)
    }

    /// Total length of the combined walk.
    pub fn combined_len(&self) -> usize {
        self.len_a() + 1 + self.len_b()
    }

    pub fn first_position(&self, side: SideTag, u: NodeId) -> Option<usize> {
        let firsts = match side {
            SideTag::A => self.firsts_a,
            SideTag::B => self.firsts_b,
            SideTag::Center => return None,
        };
        firsts
            .iter()
            .find(|&&(w, _)| w as usize == u)
            .map(|&(_, p)| p as usize)
    }
}

/// Weight that `walk` adds to the two-terminal graph on `{u, target}`, if any.
///
/// The walk is cut at the first visit of `u`. When `u` lies on exactly one
/// side, the cut walk joins `u` and the target and has length
/// `first position of u + 1 + length of the other side`; it then contributes
/// `1 / (rho * that length)`. On both sides or neither it closes a loop and
/// contributes nothing.
pub fn shortcut_contribution(walk: &WalkView<'_>, u: NodeId, rho: usize) -> Option<f64> {
    if !walk.valid {
        return None;
    }
    let pa = walk.first_position(SideTag::A, u);
    let pb = walk.first_position(SideTag::B, u);
    let len = match (pa, pb) {
        (Some(p), None) => p + 1 + walk.len_b(),
        (None, Some(p)) => p + 1 + walk.len_a(),
        _ => return None,
    };
    Some(1.0 / (rho as f64 * len as f64))
}

/// Sampled walks plus node-walk and edge-walk maps.
#[derive(Debug, Clone)]
pub struct WalkStore {
    target: NodeId,
    node_count: usize,
    edge_capacity: usize,
    params: TruncationParams,
    seed: u64,
    walks: Vec<WalkHeader>,
    nodes: Vec<u32>,
    firsts: Vec<(u32, u32)>,
    node_map: Vec<Vec<MapEntry>>,
    edge_map: Vec<Vec<MapEntry>>,
    invalid: usize,
    live_arena: usize,
}

/// A freshly drawn side: node sequence and the edge taken at each step.
#[derive(Debug, Default)]
struct SideDraft {
    nodes: Vec<u32>,
    edges: Vec<u32>,
}

#[derive(Debug)]
struct WalkDraft {
    center: EdgeId,
    replicate: u32,
    valid: bool,
    a: SideDraft,
    b: SideDraft,
}

/// Derives an independent seed for a numbered stream (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn walk_rng(seed: u64, edge: EdgeId, replicate: u32, generation: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(edge as u64).to_le_bytes());
    key[16..24].copy_from_slice(&u64::from(replicate).to_le_bytes());
    key[24..].copy_from_slice(&u64::from(generation).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Continues `side` from its last node until it reaches `target` or has
/// `max_len` steps. Returns whether the target was reached.
fn extend_side(
    g: &Graph,
    target: NodeId,
    max_len: usize,
    side: &mut SideDraft,
    rng: &mut ChaCha8Rng,
) -> bool {
    let mut u = *side.nodes.last().expect("side has a start node") as usize;
    while u != target {
        if side.edges.len() >= max_len {
            return false;
        }
        let nbrs = g.neighbors(u);
        if nbrs.is_empty() {
            return false;
        }
        let (w, e) = nbrs[rng.random_range(0..nbrs.len())];
        side.nodes.push(w as u32);
        side.edges.push(e as u32);
        u = w;
    }
    true
}

fn draw_walk(g: &Graph, target: NodeId, max_len: usize, seed: u64, e: EdgeId, r: u32) -> WalkDraft {
    let (i, j) = g.endpoints(e);
    let mut rng = walk_rng(seed, e, r, 0);
    let mut a = SideDraft {
        nodes: vec![i as u32],
        edges: Vec::new(),
    };
    let mut b = SideDraft {
        nodes: vec![j as u32],
        edges: Vec::new(),
    };
    let valid = extend_side(g, target, max_len, &mut a, &mut rng)
        && extend_side(g, target, max_len, &mut b, &mut rng);
    if !valid {
        a = SideDraft::default();
        b = SideDraft::default();
    }
    WalkDraft {
        center: e,
        replicate: r,
        valid,
        a,
        b,
    }
}

impl WalkStore {
    /// Samples `rho` combined walks for every live edge of `g`. The walk for
    /// `(edge, replicate)` depends only on `seed`, the edge id and the
    /// replicate index, so the result does not depend on thread count.
    pub fn sample(g: &Graph, target: NodeId, params: TruncationParams, seed: u64) -> Result<Self> {
        params.validate()?;
        if target >= g.node_count() {
            return Err(Error::NodeOutOfRange(target));
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let rho = u32::try_from(params.rho)
            .map_err(|_| Error::InvalidParameter("rho does not fit in 32 bits".into()))?;
        let drafts: Vec<Vec<WalkDraft>> = g
            .edge_ids()
            .into_par_iter()
            .map(|e| {
                (0..rho)
                    .map(|r| draw_walk(g, target, params.max_len, seed, e, r))
                    .collect()
            })
            .collect();
        let total: usize = drafts.iter().map(Vec::len).sum();
        let mut store = Self {
            target,
            node_count: g.node_count(),
            edge_capacity: g.edge_capacity(),
            params,
            seed,
            walks: Vec::with_capacity(total),
            nodes: Vec::new(),
            firsts: Vec::new(),
            node_map: vec![Vec::new(); g.node_count()],
            edge_map: vec![Vec::new(); g.edge_capacity()],
            invalid: 0,
            live_arena: 0,
        };
        let mut scratch = Scratch::new(g.node_count(), g.edge_capacity());
        for draft in drafts.into_iter().flatten() {
            let id = store.walks.len();
            store.walks.push(WalkHeader {
                center: draft.center,
                replicate: draft.replicate,
                generation: 0,
                valid: draft.valid,
                a: SideSpans::default(),
                b: SideSpans::default(),
            });
            if draft.valid {
                store.install(id, &draft.a, &draft.b, &mut scratch);
            } else {
                store.invalid += 1;
            }
        }
        Ok(store)
    }

    /// Writes both sides of walk `id` into the arenas and records map entries
    /// for the walk's current generation.
    fn install(&mut self, id: WalkId, a: &SideDraft, b: &SideDraft, scratch: &mut Scratch) {
        let generation = self.walks[id].generation;
        let center = self.walks[id].center;
        self.edge_map[center].push(MapEntry {
            walk: id,
            side: SideTag::Center,
            pos: 0,
            generation,
        });
        let spans_a = self.write_side(id, SideTag::A, a, scratch);
        let spans_b = self.write_side(id, SideTag::B, b, scratch);
        let header = &mut self.walks[id];
        header.a = spans_a;
        header.b = spans_b;
    }

    fn write_side(&mut self, id: WalkId, tag: SideTag, side: &SideDraft, scratch: &mut Scratch) -> SideSpans {
        let generation = self.walks[id].generation;
        let node_start = self.nodes.len();
        self.nodes.extend_from_slice(&side.nodes);
        let firsts_start = self.firsts.len();
        scratch.next_stamp();
        for (pos, &u) in side.nodes.iter().enumerate() {
            if scratch.mark_node(u as usize) {
                self.firsts.push((u, pos as u32));
                self.node_map[u as usize].push(MapEntry {
                    walk: id,
                    side: tag,
                    pos: pos as u32,
                    generation,
                });
            }
        }
        for (pos, &e) in side.edges.iter().enumerate() {
            if scratch.mark_edge(e as usize) {
                self.edge_map[e as usize].push(MapEntry {
                    walk: id,
                    side: tag,
                    pos: pos as u32,
                    generation,
                });
            }
        }
        let spans = SideSpans {
            nodes: Span {
                start: node_start,
                len: side.nodes.len() as u32,
            },
            firsts: Span {
                start: firsts_start,
                len: (self.firsts.len() - firsts_start) as u32,
            },
        };
        self.live_arena += side.nodes.len();
        spans
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn rho(&self) -> usize {
        self.params.rho
    }

    pub fn max_len(&self) -> usize {
        self.params.max_len
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn invalid_count(&self) -> usize {
        self.invalid
    }

    pub fn invalid_ratio(&self) -> f64 {
        if self.walks.is_empty() {
            0.0
        } else {
            self.invalid as f64 / self.walks.len() as f64
        }
    }

    pub fn walk(&self, id: WalkId) -> WalkView<'_> {
        let h = &self.walks[id];
        WalkView {
            id,
            center: h.center,
            replicate: h.replicate,
            generation: h.generation,
            valid: h.valid,
            side_a: &self.nodes[h.a.nodes.range()],
            side_b: &self.nodes[h.b.nodes.range()],
            firsts_a: &self.firsts[h.a.firsts.range()],
            firsts_b: &self.firsts[h.b.firsts.range()],
        }
    }

    pub fn walks(&self) -> impl Iterator<Item = WalkView<'_>> + '_ {
        (0..self.walks.len()).map(|id| self.walk(id))
    }

    pub fn valid_walks(&self) -> impl Iterator<Item = WalkView<'_>> + '_ {
        self.walks().filter(|w| w.valid)
    }

    fn is_current(&self, entry: &MapEntry) -> bool {
        let h = &self.walks[entry.walk];
        h.valid && h.generation == entry.generation
    }

    /// Current entries of the node-walk map for `u`.
    pub fn node_entries(&self, u: NodeId) -> impl Iterator<Item = MapEntry> + '_ {
        self.node_map[u].iter().copied().filter(|e| self.is_current(e))
    }

    /// Current entries of the edge-walk map for `e`.
    pub fn edge_entries(&self, e: EdgeId) -> impl Iterator<Item = MapEntry> + '_ {
        self.edge_map[e].iter().copied().filter(|en| self.is_current(en))
    }

    /// Valid walks that traverse `e` or use it as center edge, in id order.
    pub fn walks_through_edge(&self, e: EdgeId) -> Vec<WalkId> {
        let mut ids: Vec<WalkId> = self.edge_entries(e).map(|en| en.walk).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Updates the walks affected by the removal of `e`, which must already
    /// be removed from `g`. Walks centered on `e` are invalidated. Every other
    /// walk through `e` has each affected side cut just before its first
    /// traversal of `e` and regrown on `g` within the remaining length budget.
    /// Returns the ids of all walks that changed.
    pub fn repair(&mut self, g: &Graph, e: EdgeId) -> Result<Vec<WalkId>> {
        if !g.is_removed(e) {
            return Err(Error::InvalidParameter(format!(
                "edge {e} must be removed from the graph before repairing walks"
            )));
        }
        let affected = self.walks_through_edge(e);
        let max_len = self.params.max_len;
        let target = self.target;
        let seed = self.seed;
        let drafts: Vec<Option<(SideDraft, SideDraft)>> = affected
            .par_iter()
            .map(|&id| {
                let h = &self.walks[id];
                if h.center == e {
                    return None;
                }
                let mut rng = walk_rng(seed, h.center, h.replicate, h.generation + 1);
                let mut sides = [SideTag::A, SideTag::B].map(|tag| {
                    let spans = if tag == SideTag::A { h.a } else { h.b };
                    self.side_draft(spans, g)
                });
                for side in &mut sides {
                    if let Some(cut) = side.edges.iter().position(|&x| x as usize == e) {
                        side.nodes.truncate(cut + 1);
                        side.edges.truncate(cut);
                        if !extend_side(g, target, max_len, side, &mut rng) {
                            return None;
                        }
                    }
                }
                let [a, b] = sides;
                Some((a, b))
            })
            .collect();
        let mut scratch = Scratch::new(self.node_count, self.edge_capacity);
        for (&id, draft) in affected.iter().zip(drafts) {
            let h = self.walks[id];
            self.live_arena -= (h.a.nodes.len + h.b.nodes.len) as usize;
            let header = &mut self.walks[id];
            header.generation += 1;
            match draft {
                Some((a, b)) => self.install(id, &a, &b, &mut scratch),
                None => {
                    header.valid = false;
                    header.a = SideSpans::default();
                    header.b = SideSpans::default();
                    self.invalid += 1;
                }
            }
        }
        if self.nodes.len() > 2 * self.live_arena + 1024 {
            self.compact();
        }
        Ok(affected)
    }

    /// Reconstructs node and edge sequences for one stored side. Edge ids are
    /// looked up in `g`; the removed edge is still addressable there.
    fn side_draft(&self, spans: SideSpans, g: &Graph) -> SideDraft {
        let nodes = self.nodes[spans.nodes.range()].to_vec();
        let edges = nodes
            .windows(2)
            .map(|w| edge_between(g, w[0] as usize, w[1] as usize) as u32)
            .collect();
        SideDraft { nodes, edges }
    }

    /// Drops garbage from the arenas and stale map entries.
    pub fn compact(&mut self) {
        let mut nodes = Vec::with_capacity(self.live_arena);
        let mut firsts = Vec::new();
        for h in &mut self.walks {
            for spans in [&mut h.a, &mut h.b] {
                let start = nodes.len();
                nodes.extend_from_slice(&self.nodes[spans.nodes.range()]);
                spans.nodes.start = start;
                let fstart = firsts.len();
                firsts.extend_from_slice(&self.firsts[spans.firsts.range()]);
                spans.firsts.start = fstart;
            }
        }
        self.nodes = nodes;
        self.firsts = firsts;
        let walks = &self.walks;
        let current = |en: &MapEntry| {
            let h = &walks[en.walk];
            h.valid && h.generation == en.generation
        };
        for list in self.node_map.iter_mut().chain(self.edge_map.iter_mut()) {
            list.retain(current);
        }
    }

    /// Writes a versioned binary dump: header `(magic, version, n, m, rho,
    /// max_len, seed, target, walk count)` followed by each walk.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(DUMP_MAGIC)?;
        for word in [
            DUMP_VERSION,
            self.node_count as u64,
            self.edge_capacity as u64,
            self.params.rho as u64,
            self.params.max_len as u64,
            self.seed,
            self.target as u64,
            self.walks.len() as u64,
        ] {
            out.write_all(&word.to_le_bytes())?;
        }
        for w in self.walks() {
            out.write_all(&(w.center as u64).to_le_bytes())?;
            out.write_all(&w.replicate.to_le_bytes())?;
            out.write_all(&w.generation.to_le_bytes())?;
            out.write_all(&[u8::from(w.valid)])?;
            for side in [w.side_a, w.side_b] {
                out.write_all(&(side.len() as u32).to_le_bytes())?;
                for &u in side {
                    out.write_all(&u.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }
}

const DUMP_MAGIC: &[u8; 8] = b"ICWALKS\0";
const DUMP_VERSION: u64 = 1;

/// Header of a walk dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DumpHeader {
    pub version: u64,
    pub node_count: u64,
    pub edge_capacity: u64,
    pub rho: u64,
    pub max_len: u64,
    pub seed: u64,
    pub target: u64,
    pub walks: u64,
}

pub fn read_dump_header<R: Read>(mut input: R) -> io::Result<DumpHeader> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "not a walk dump"));
    }
    let mut words = [0u64; 8];
    for w in &mut words {
        let mut buf = [0u8; 8];
        input.read_exact(&mut buf)?;
        *w = u64::from_le_bytes(buf);
    }
    let [version, node_count, edge_capacity, rho, max_len, seed, target, walks] = words;
    if version != DUMP_VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported dump version {version}"),
        ));
    }
    Ok(DumpHeader {
        version,
        node_count,
        edge_capacity,
        rho,
        max_len,
        seed,
        target,
        walks,
    })
}

fn edge_between(g: &Graph, u: NodeId, w: NodeId) -> EdgeId {
    // removed edges are gone from adjacency lists, so fall back to a scan of
    // the edge table for the one edge a stored walk may still use
    g.find_edge(u, w).unwrap_or_else(|| {
        (0..g.edge_capacity())
            .find(|&e| {
                let (x, y) = g.endpoints(e);
                (x == u && y == w) || (x == w && y == u)
            })
            .expect("stored walk step has no edge")
    })
}

/// Stamp arrays for first-occurrence detection.
struct Scratch {
    node_stamp: Vec<u32>,
    edge_stamp: Vec<u32>,
    stamp: u32,
}

impl Scratch {
    fn new(n: usize, m: usize) -> Self {
        Self {
            node_stamp: vec![0; n],
            edge_stamp: vec![0; m],
            stamp: 0,
        }
    }

    fn next_stamp(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.node_stamp.fill(0);
            self.edge_stamp.fill(0);
            self.stamp = 1;
        }
    }

    fn mark_node(&mut self, u: usize) -> bool {
        std::mem::replace(&mut self.node_stamp[u], self.stamp) != self.stamp
    }

    fn mark_edge(&mut self, e: usize) -> bool {
        std::mem::replace(&mut self.edge_stamp[e], self.stamp) != self.stamp
    }
}
