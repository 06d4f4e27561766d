//! Exact reference implementations of the primitive graph tasks.
//!
//! Every oracle takes a [`GraphInstance`], rejects graph kinds its task is
//! not defined on with [`OracleError::KindMismatch`], and returns the exact
//! answer. Node arguments are looked up by id; unknown ids are errors.

mod clique;
mod flow;
mod paths;
mod structure;
mod traversal;

use thiserror::Error;

use crate::graph::{GraphInstance, Indexed, NodeId};

pub use clique::{max_clique_size, max_independent_set_size};
pub use flow::max_flow_value;
pub use paths::{diameter, shortest_path, shortest_path_length, single_source_distances};
pub use structure::{common_neighbors, is_distance_regular, is_regular, local_clustering};
pub use traversal::{
    connected_components, count_components, count_scc, has_eulerian_path, is_bipartite,
    is_connected, scc_partition,
};

pub(crate) use flow::max_flow_indexed;
pub(crate) use paths::{bfs_hops, diameter_indexed};
pub(crate) use structure::{clustering_indexed, common_indexed};
pub(crate) use traversal::{eulerian_indexed, scc_labels, weak_labels};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{op} is defined on {expected} graphs")]
    KindMismatch {
        op: &'static str,
        expected: &'static str,
    },
    #[error("no path from {0} to {1}")]
    NoPath(NodeId, NodeId),
    #[error("graph is disconnected; the quantity is undefined")]
    Disconnected,
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("missing or malformed argument `{0}`")]
    MissingArg(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type OracleResult<T> = Result<T, OracleError>;

pub(crate) fn require_undirected(g: &GraphInstance, op: &'static str) -> OracleResult<()> {
    if g.directed {
        return Err(OracleError::KindMismatch {
            op,
            expected: "undirected",
        });
    }
    Ok(())
}

pub(crate) fn require_directed(g: &GraphInstance, op: &'static str) -> OracleResult<()> {
    if !g.directed {
        return Err(OracleError::KindMismatch {
            op,
            expected: "directed",
        });
    }
    Ok(())
}

pub(crate) fn require_nonempty(g: &GraphInstance) -> OracleResult<()> {
    if g.nodes.is_empty() {
        return Err(OracleError::Degenerate("graph has no nodes".into()));
    }
    Ok(())
}

pub(crate) fn node_index(ix: &Indexed, node: NodeId) -> OracleResult<usize> {
    ix.index
        .get(&node)
        .copied()
        .ok_or(OracleError::UnknownNode(node))
}
