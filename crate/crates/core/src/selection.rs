use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

/// How a greedy run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// All `k` edges were selected.
    Complete,
    /// Some edges were selected before every remaining edge became a bridge.
    Exhausted,
    /// The input had no removable edge at all.
    NoRemovableEdge,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Complete => "complete",
            Status::Exhausted => "exhausted",
            Status::NoRemovableEdge => "no removable edge",
        }
    }

    pub(crate) fn for_count(selected: usize, k: usize) -> Self {
        if selected == k {
            Status::Complete
        } else if selected == 0 {
            Status::NoRemovableEdge
        } else {
            Status::Exhausted
        }
    }
}

/// One committed removal.
#[derive(Debug, Clone)]
pub struct Step {
    pub iteration: usize,
    pub edge: EdgeId,
    pub endpoints: (NodeId, NodeId),
    /// The algorithm's own estimate of the target's information centrality
    /// after this removal, when it maintains one.
    pub estimate: Option<f64>,
    /// Wall time since the start of the run.
    pub elapsed: Duration,
}

/// Ordered edge removals produced by one of the strategies.
#[derive(Debug, Clone)]
pub struct Selection {
    pub edges: Vec<EdgeId>,
    pub steps: Vec<Step>,
    pub status: Status,
}

impl Selection {
    pub(crate) fn new(k: usize, steps: Vec<Step>) -> Self {
        let status = Status::for_count(steps.len(), k);
        if status == Status::Exhausted {
            log::warn!("only {} of {k} edges could be removed without disconnecting", steps.len());
        }
        Self {
            edges: steps.iter().map(|s| s.edge).collect(),
            steps,
            status,
        }
    }
}

pub(crate) fn check_budget(g: &Graph, k: usize) -> Result<()> {
    let m = g.edge_count();
    if k == 0 || k >= m {
        return Err(Error::InvalidK { k, m });
    }
    Ok(())
}

pub(crate) fn check_target(g: &Graph, v: NodeId) -> Result<()> {
    if v >= g.node_count() {
        return Err(Error::NodeOutOfRange(v));
    }
    if g.node_count() < 2 {
        return Err(Error::SingleNode);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}
