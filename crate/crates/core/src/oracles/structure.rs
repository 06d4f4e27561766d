use std::collections::BTreeMap;

use super::paths::bfs_hops;
use super::traversal::weak_labels;
use super::{node_index, require_nonempty, require_undirected, OracleResult};
use crate::graph::{GraphInstance, Indexed, NodeId};

/// Every node has the same degree (same in- and out-degree when directed).
pub fn is_regular(g: &GraphInstance) -> OracleResult<bool> {
    require_nonempty(g)?;
    Ok(regular_indexed(&Indexed::new(g)))
}

fn regular_indexed(ix: &Indexed) -> bool {
    if ix.directed {
        let first = ix.in_out_degree(0);
        (1..ix.len()).all(|a| ix.in_out_degree(a) == first)
    } else {
        let first = ix.degree(0);
        (1..ix.len()).all(|a| ix.degree(a) == first)
    }
}

/// Distance regularity: the graph is connected and regular, and for every
/// pair (u, v) at distance i the number of neighbours of v at distance i-1
/// from u (c_i) and at distance i+1 from u (b_i) depends only on i.
pub fn is_distance_regular(g: &GraphInstance) -> OracleResult<bool> {
    require_undirected(g, "is_distance_regular")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    if !regular_indexed(&ix) || weak_labels(&ix).1 != 1 {
        return Ok(false);
    }
    let n = ix.len();
    let neighbors: Vec<Vec<usize>> = (0..n).map(|a| ix.undirected_neighbors(a)).collect();
    let mut numbers: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for u in 0..n {
        let dist = bfs_hops(&ix, u);
        for v in 0..n {
            let i = dist[v];
            let mut c = 0;
            let mut b = 0;
            for &x in &neighbors[v] {
                if i > 0 && dist[x] == i - 1 {
                    c += 1;
                } else if dist[x] == i + 1 {
                    b += 1;
                }
            }
            match numbers.get(&i) {
                Some(&seen) if seen != (c, b) => return Ok(false),
                Some(_) => {}
                None => {
                    numbers.insert(i, (c, b));
                }
            }
        }
    }
    Ok(true)
}

/// Local clustering coefficient of node `a` over the undirected view of
/// `ix`, ignoring self-loops and weights; 0 when the degree is below two.
pub(crate) fn clustering_indexed(ix: &Indexed, a: usize) -> f64 {
    let ns = ix.undirected_neighbors(a);
    let k = ns.len();
    if k < 2 {
        return 0.0;
    }
    let linked = |x: usize, y: usize| ix.has_arc(x, y) || (ix.directed && ix.has_arc(y, x));
    let mut links = 0usize;
    for (i, &x) in ns.iter().enumerate() {
        for &y in &ns[i + 1..] {
            if linked(x, y) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// Local clustering coefficient of `v` (unweighted, self-loops ignored).
pub fn local_clustering(g: &GraphInstance, v: NodeId) -> OracleResult<f64> {
    require_undirected(g, "local_clustering")?;
    let ix = Indexed::new(g);
    let a = node_index(&ix, v)?;
    Ok(clustering_indexed(&ix, a))
}

/// Number of nodes adjacent to both `u` and `v`, excluding `u` and `v`.
pub fn common_neighbors(g: &GraphInstance, u: NodeId, v: NodeId) -> OracleResult<i64> {
    require_undirected(g, "common_neighbors")?;
    let ix = Indexed::new(g);
    let a = node_index(&ix, u)?;
    let b = node_index(&ix, v)?;
    Ok(common_indexed(&ix, a, b) as i64)
}

pub(crate) fn common_indexed(ix: &Indexed, a: usize, b: usize) -> usize {
    let nb = ix.undirected_neighbors(b);
    ix.undirected_neighbors(a)
        .into_iter()
        .filter(|&x| x != a && x != b && nb.binary_search(&x).is_ok())
        .count()
}
