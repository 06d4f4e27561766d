//! Reference implementations of the nine composite tasks, each a fixed
//! composition of primitive oracles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphInstance, Indexed, NodeId};
use crate::oracles::{
    self, bfs_hops, clustering_indexed, common_indexed, diameter_indexed, eulerian_indexed,
    max_flow_indexed, node_index, require_directed, require_nonempty, require_undirected,
    scc_labels, weak_labels, OracleError, OracleResult,
};

/// How a composite task combines its primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositePattern {
    /// The first algorithm's output feeds the second.
    Sequential,
    /// Independent results merged by an aggregation formula.
    Parallel,
    /// A check selects which follow-up algorithm runs.
    Conditional,
}

/// Pick one shortest s–t path (lexicographically smallest), score every node
/// on it by local clustering, and return the best node (ties go to the node
/// closer to `s`) with the coefficients along the path.
pub fn clustering_on_shortest_path(
    g: &GraphInstance,
    s: NodeId,
    t: NodeId,
) -> OracleResult<(NodeId, Vec<f64>)> {
    require_undirected(g, "clustering_on_shortest_path")?;
    let path = oracles::shortest_path(g, s, t)?;
    let ix = Indexed::new(g);
    let coeffs: Vec<f64> = path
        .iter()
        .map(|&v| clustering_indexed(&ix, ix.index[&v]))
        .collect();
    let mut best = 0;
    for (i, &c) in coeffs.iter().enumerate() {
        if c > coeffs[best] {
            best = i;
        }
    }
    Ok((path[best], coeffs))
}

/// Hop diameter of each strongly connected component viewed as an undirected
/// induced subgraph, components ordered by smallest member. Singleton
/// components have diameter 0.
pub fn scc_diameters(g: &GraphInstance) -> OracleResult<Vec<i64>> {
    require_directed(g, "scc_diameters")?;
    oracles::scc_partition(g)?
        .iter()
        .map(|comp| {
            let sub = Indexed::new(&g.induced(comp).undirected_projection());
            diameter_indexed(&sub).map(|d| d as i64)
        })
        .collect()
}

/// Score each strongly connected component C by
/// `flow(s_C, t) * (1 + clustering(s_C))`, where `s_C` is C's smallest node
/// and clustering is taken in the undirected projection; return the best
/// component (ties go to the component with the smaller smallest node).
pub fn scc_flow_clustering_best(g: &GraphInstance, t: NodeId) -> OracleResult<BTreeSet<NodeId>> {
    require_directed(g, "scc_flow_clustering_best")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    let sink = node_index(&ix, t)?;
    let comps = oracles::scc_partition(g)?;
    let mut best: Option<(f64, usize)> = None;
    for (i, comp) in comps.iter().enumerate() {
        let rep = ix.index[comp.first().expect("components are non-empty")];
        let score = max_flow_indexed(&ix, rep, sink) * (1.0 + clustering_indexed(&ix, rep));
        if best.is_none_or(|(b, _)| score > b) {
            best = Some((score, i));
        }
    }
    let (_, i) = best.expect("a non-empty graph has a component");
    Ok(comps[i].clone())
}

/// `(|common neighbours| + (C(s) + C(t)) / 2) / (1 + d(s, t))` with `d` the
/// weighted shortest-path distance.
pub fn pair_tightness(g: &GraphInstance, s: NodeId, t: NodeId) -> OracleResult<f64> {
    require_undirected(g, "pair_tightness")?;
    let d = oracles::shortest_path_length(g, s, t)?;
    let ix = Indexed::new(g);
    let (a, b) = (ix.index[&s], ix.index[&t]);
    let common = common_indexed(&ix, a, b) as f64;
    let mean_c = (clustering_indexed(&ix, a) + clustering_indexed(&ix, b)) / 2.0;
    Ok((common + mean_c) / (1.0 + d))
}

/// Top-`k` nodes by bridge-hub score `(1 - C(v)) / mean distance from v`,
/// score descending with ties to the smaller id. Distances are hop counts
/// (weighted distances on weighted graphs). Needs a connected graph with at
/// least two nodes.
pub fn bridge_hubs(g: &GraphInstance, k: usize) -> OracleResult<Vec<(NodeId, f64)>> {
    require_undirected(g, "bridge_hubs")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    let n = ix.len();
    if n < 2 {
        return Err(OracleError::Degenerate(
            "mean distance needs at least two nodes".into(),
        ));
    }
    if weak_labels(&ix).1 != 1 {
        return Err(OracleError::Disconnected);
    }
    let mut scored: Vec<(NodeId, f64)> = (0..n)
        .map(|a| {
            let total: f64 = if g.weighted {
                oracles::single_source_distances(g, ix.ids[a])
                    .expect("node exists")
                    .values()
                    .sum()
            } else {
                bfs_hops(&ix, a).iter().map(|&d| d as f64).sum()
            };
            let mean = total / (n - 1) as f64;
            (ix.ids[a], (1.0 - clustering_indexed(&ix, a)) / mean)
        })
        .collect();
    scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    scored.truncate(k);
    Ok(scored)
}

/// `F * (1 + (C(s) + C(t)) / 2)` with `F` the maximum s→t flow and
/// clustering in the undirected projection.
pub fn endpoint_aware_flow(g: &GraphInstance, s: NodeId, t: NodeId) -> OracleResult<f64> {
    require_directed(g, "endpoint_aware_flow")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    let a = node_index(&ix, s)?;
    let b = node_index(&ix, t)?;
    let flow = max_flow_indexed(&ix, a, b);
    Ok(flow * (1.0 + (clustering_indexed(&ix, a) + clustering_indexed(&ix, b)) / 2.0))
}

/// The diameter when an Eulerian path exists, otherwise the larger of the
/// clustering coefficients of `s` and `t`.
pub fn eulerian_or_clustering(g: &GraphInstance, s: NodeId, t: NodeId) -> OracleResult<f64> {
    require_undirected(g, "eulerian_or_clustering")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    let a = node_index(&ix, s)?;
    let b = node_index(&ix, t)?;
    if eulerian_indexed(&ix) {
        // an Eulerian graph is connected, so the diameter exists
        return Ok(diameter_indexed(&ix)? as f64);
    }
    Ok(clustering_indexed(&ix, a).max(clustering_indexed(&ix, b)))
}

/// The diameter when connected, otherwise the diameter of the largest
/// component (ties go to the component with the smaller smallest node).
pub fn connectivity_component_diameter(g: &GraphInstance) -> OracleResult<i64> {
    require_undirected(g, "connectivity_component_diameter")?;
    require_nonempty(g)?;
    let comps = oracles::connected_components(g)?;
    let mut largest = &comps[0];
    for comp in &comps[1..] {
        if comp.len() > largest.len() {
            largest = comp;
        }
    }
    let sub = if comps.len() == 1 {
        Indexed::new(g)
    } else {
        Indexed::new(&g.induced(largest))
    };
    diameter_indexed(&sub).map(|d| d as i64)
}

/// Size of the largest strongly connected component when an Eulerian path
/// exists, otherwise the number of strongly connected components.
pub fn scc_eulerian_score(g: &GraphInstance) -> OracleResult<i64> {
    require_directed(g, "scc_eulerian_score")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    let (labels, count) = scc_labels(&ix);
    if eulerian_indexed(&ix) {
        let mut sizes = vec![0i64; count];
        for &l in &labels {
            sizes[l] += 1;
        }
        return Ok(sizes.into_iter().max().unwrap_or(0));
    }
    Ok(count as i64)
}
