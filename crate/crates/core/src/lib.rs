//! Selecting edges whose removal minimizes the information centrality of a
//! target node while keeping the graph connected.
//!
//! Strategies:
//!
//! * [`exact::exact_sm`]: exact greedy on a dense Laplacian pseudoinverse,
//!   with [`exact::brute_force`] as the small-graph optimum.
//! * [`schur::approxi_sc`]: greedy on effective resistances estimated from
//!   truncated random walks forming an approximate Schur complement.
//! * [`fast::fast_icm`]: the same estimator restricted to a Bernoulli node
//!   sample, with walks sampled once and repaired after each removal.
//! * [`baselines`]: random, betweenness and spanning-edge heuristics.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod exact;
pub mod fast;
pub mod generators;
pub mod graph;
pub mod schur;
pub mod selection;
pub mod walks;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, NodeId, NodeLabelMap};
pub use selection::{Selection, Status, Step};
