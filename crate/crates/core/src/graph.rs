//! Undirected simple graphs with stable edge ids and logical edge removal.
//!
//! Edge ids are assigned once at construction and never reused. Removing an
//! edge flags it and drops it from both adjacency lists, so ids held by other
//! structures (walk maps, selection records) stay addressable.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::BufRead;

use log::warn;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<(NodeId, EdgeId)>>,
    edges: Vec<(NodeId, NodeId)>,
    removed: Vec<bool>,
    live: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes. Duplicate edges (in either orientation)
    /// are collapsed with a warning; self-loops are rejected.
    pub fn from_edges(n: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(pairs.len());
        let mut duplicates = 0usize;
        for &(u, v) in pairs {
            if u >= n {
                return Err(Error::NodeOutOfRange(u));
            }
            if v >= n {
                return Err(Error::NodeOutOfRange(v));
            }
            if u == v {
                return Err(Error::SameNode(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                duplicates += 1;
                continue;
            }
            let id = edges.len();
            edges.push((u, v));
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        if duplicates > 0 {
            warn!("collapsed {duplicates} duplicate edge(s)");
        }
        let live = edges.len();
        Ok(Self {
            adj,
            removed: vec![false; edges.len()],
            edges,
            live,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges that have not been removed.
    pub fn edge_count(&self) -> usize {
        self.live
    }

    /// Total number of edge ids ever assigned, removed ones included.
    pub fn edge_capacity(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Live neighbors of `u` as `(neighbor, edge id)` pairs.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[u]
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn is_removed(&self, e: EdgeId) -> bool {
        self.removed[e]
    }

    /// Live edges as `(id, u, v)` in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, NodeId, NodeId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(id, _)| !self.removed[*id])
            .map(|(id, &(u, v))| (id, u, v))
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges().map(|(id, _, _)| id).collect()
    }

    /// Id of the live edge joining `u` and `v`, if any.
    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].iter().find(|(w, _)| *w == b).map(|&(_, e)| e)
    }

    /// Logically removes edge `e`. Connectivity is not checked here.
    pub fn remove_edge(&mut self, e: EdgeId) -> Result<()> {
        if e >= self.edges.len() {
            return Err(Error::EdgeOutOfRange(e));
        }
        if self.removed[e] {
            return Err(Error::EdgeRemoved(e));
        }
        let (u, v) = self.edges[e];
        self.adj[u].retain(|&(_, id)| id != e);
        self.adj[v].retain(|&(_, id)| id != e);
        self.removed[e] = true;
        self.live -= 1;
        Ok(())
    }

    /// Copy of the graph with the given edges removed.
    pub fn without_edges(&self, removed: &[EdgeId]) -> Result<Self> {
        let mut g = self.clone();
        for &e in removed {
            g.remove_edge(e)?;
        }
        Ok(g)
    }

    /// Breadth-first hop distances from `source`; unreachable nodes get `usize::MAX`.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        match self.node_count() {
            0 => true,
            _ => self.bfs_distances(0).iter().all(|&d| d != usize::MAX),
        }
    }

    /// Hop diameter of a connected graph.
    pub fn diameter(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok((0..self.node_count())
            .map(|s| self.bfs_distances(s).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0))
    }

    /// Component index per node, numbered in order of smallest member id.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Edges whose removal disconnects the graph, by an iterative lowpoint
    /// traversal. Returned as a membership mask indexed by edge id.
    pub fn bridge_mask(&self) -> Result<Vec<bool>> {
        let n = self.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut mask = vec![false; self.edges.len()];
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut clock = 0;
        // (node, edge used to enter it, next adjacency index)
        let mut stack: Vec<(NodeId, EdgeId, usize)> = Vec::new();
        disc[0] = clock;
        low[0] = clock;
        clock += 1;
        stack.push((0, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (u, parent_edge, idx) = *top;
            if idx < self.adj[u].len() {
                top.2 += 1;
                let (w, e) = self.adj[u][idx];
                if e == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, e, 0));
                } else {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        mask[parent_edge] = true;
                    }
                }
            }
        }
        if disc.contains(&usize::MAX) {
            return Err(Error::Disconnected);
        }
        Ok(mask)
    }

    /// Bridge edge ids in increasing order.
    pub fn bridges(&self) -> Result<Vec<EdgeId>> {
        Ok(self
            .bridge_mask()?
            .into_iter()
            .enumerate()
            .filter_map(|(e, b)| b.then_some(e))
            .collect())
    }

    /// Live edges that are not bridges, in increasing id order.
    pub fn removable_edges(&self) -> Result<Vec<EdgeId>> {
        let mask = self.bridge_mask()?;
        Ok(self.edges().filter(|(e, _, _)| !mask[*e]).map(|(e, _, _)| e).collect())
    }
}

/// Node subgraph together with the id each new node had in the parent graph.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub original: Vec<NodeId>,
}

/// Induced subgraph on the largest connected component, relabeled densely in
/// increasing original id order. Ties go to the component holding the
/// smallest node id.
pub fn largest_connected_component(g: &Graph) -> Result<Subgraph> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let comp = g.components();
    let count = comp.iter().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // components are numbered by smallest member, so the first maximum wins ties
    let best = (0..count)
        .fold(0, |best, c| if sizes[c] > sizes[best] { c } else { best });
    let original: Vec<NodeId> = (0..g.node_count()).filter(|&u| comp[u] == best).collect();
    let mut new_id = vec![usize::MAX; g.node_count()];
    for (i, &u) in original.iter().enumerate() {
        new_id[u] = i;
    }
    let pairs: Vec<_> = g
        .edges()
        .filter(|&(_, u, _)| comp[u] == best)
        .map(|(_, u, v)| (new_id[u], new_id[v]))
        .collect();
    Ok(Subgraph {
        graph: Graph::from_edges(original.len(), &pairs)?,
        original,
    })
}

/// Bijection between the labels found in an edge list and dense node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeLabelMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum LabelKey<'a> {
    Int(i64),
    Text(&'a str),
}

impl NodeLabelMap {
    /// Identity labels `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::default();
        for i in 0..n {
            map.intern(&i.to_string());
        }
        map
    }

    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Labels for a subgraph whose node `i` was `original[i]` here.
    pub fn restrict(&self, original: &[NodeId]) -> Self {
        let mut map = Self::default();
        for &u in original {
            map.intern(&self.labels[u]);
        }
        map
    }

    fn key(&self, id: NodeId) -> LabelKey<'_> {
        let s = self.labels[id].as_str();
        s.parse().map_or(LabelKey::Text(s), LabelKey::Int)
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments; tokens after the first two on a line are ignored. Ids are
/// assigned in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Graph, NodeLabelMap)> {
    let mut labels = NodeLabelMap::default();
    let mut pairs = Vec::new();
    let mut extra_columns = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected two node labels, found {trimmed:?}"),
                })
            }
        };
        extra_columns |= tokens.next().is_some();
        if a == b {
            return Err(Error::SelfLoop {
                line: lineno,
                label: a.to_owned(),
            });
        }
        pairs.push((labels.intern(a), labels.intern(b)));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if extra_columns {
        warn!("ignored extra columns in edge list; graphs are treated as unweighted");
    }
    let g = Graph::from_edges(labels.len(), &pairs)?;
    Ok((g, labels))
}

pub fn parse_edge_list(text: &str) -> Result<(Graph, NodeLabelMap)> {
    load_edge_list(text.as_bytes())
}

/// Serializes live edges as `u v` lines in original labels, each pair ordered
/// and the list sorted. Integer labels sort numerically.
pub fn write_edge_list(g: &Graph, labels: &NodeLabelMap) -> String {
    let mut pairs: Vec<(NodeId, NodeId)> = g
        .edges()
        .map(|(_, u, v)| {
            if labels.key(u) <= labels.key(v) {
                (u, v)
            } else {
                (v, u)
            }
        })
        .collect();
    pairs.sort_by(|a, b| {
        (labels.key(a.0), labels.key(a.1)).cmp(&(labels.key(b.0), labels.key(b.1)))
    });
    let mut out = String::new();
    for (u, v) in pairs {
        out.push_str(labels.label(u));
        out.push(' ');
        out.push_str(labels.label(v));
        out.push('\n');
    }
    out
}
