use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use super::traversal::weak_labels;
use super::{node_index, require_nonempty, require_undirected, OracleError, OracleResult};
use crate::graph::{GraphInstance, Indexed, NodeId};

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on index
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over `out` arcs (or `inn` when `reverse`); returns distances and
/// parents. A parent changes only on strict improvement, so ties keep the
/// first-settled, smallest-index predecessor.
fn dijkstra(ix: &Indexed, src: usize, reverse: bool) -> (Vec<f64>, Vec<usize>) {
    let n = ix.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(HeapItem(0.0, src));
    while let Some(HeapItem(d, a)) = heap.pop() {
        if done[a] {
            continue;
        }
        done[a] = true;
        let arcs = if reverse { &ix.inn[a] } else { &ix.out[a] };
        for &(b, w) in arcs {
            let nd = d + w;
            if nd < dist[b] {
                dist[b] = nd;
                parent[b] = a;
                heap.push(HeapItem(nd, b));
            }
        }
    }
    (dist, parent)
}

/// Hop distances from `src` along out-arcs; `usize::MAX` when unreachable.
pub(crate) fn bfs_hops(ix: &Indexed, src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; ix.len()];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(a) = queue.pop_front() {
        for &(b, _) in &ix.out[a] {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
        }
    }
    dist
}

fn endpoints(
    g: &GraphInstance,
    ix: &Indexed,
    s: NodeId,
    t: NodeId,
) -> OracleResult<(usize, usize)> {
    require_nonempty(g)?;
    Ok((node_index(ix, s)?, node_index(ix, t)?))
}

/// Minimum total weight of an s→t path (hop count when unweighted).
pub fn shortest_path_length(g: &GraphInstance, s: NodeId, t: NodeId) -> OracleResult<f64> {
    let ix = Indexed::new(g);
    let (a, b) = endpoints(g, &ix, s, t)?;
    let (dist, _) = dijkstra(&ix, a, false);
    if dist[b].is_infinite() {
        return Err(OracleError::NoPath(s, t));
    }
    Ok(dist[b])
}

/// Distances from `s` to every reachable node.
pub fn single_source_distances(
    g: &GraphInstance,
    s: NodeId,
) -> OracleResult<BTreeMap<NodeId, f64>> {
    let ix = Indexed::new(g);
    let a = node_index(&ix, s)?;
    let (dist, _) = dijkstra(&ix, a, false);
    Ok(dist
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_finite())
        .map(|(i, &d)| (ix.ids[i], d))
        .collect())
}

/// One shortest s→t path.
///
/// Unweighted graphs yield the lexicographically smallest shortest path (by
/// node id sequence). Weighted graphs yield Dijkstra's parent chain where
/// equal-length alternatives keep the first-settled predecessor.
pub fn shortest_path(g: &GraphInstance, s: NodeId, t: NodeId) -> OracleResult<Vec<NodeId>> {
    let ix = Indexed::new(g);
    let (a, b) = endpoints(g, &ix, s, t)?;
    if g.weighted {
        let (dist, parent) = dijkstra(&ix, a, false);
        if dist[b].is_infinite() {
            return Err(OracleError::NoPath(s, t));
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        return Ok(path.into_iter().map(|i| ix.ids[i]).collect());
    }
    // hop distances to t, then greedy smallest-id descent from s
    let to_t = {
        let mut dist = vec![usize::MAX; ix.len()];
        let mut queue = VecDeque::new();
        dist[b] = 0;
        queue.push_back(b);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &ix.inn[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    };
    if to_t[a] == usize::MAX {
        return Err(OracleError::NoPath(s, t));
    }
    let mut path = vec![ix.ids[a]];
    let mut cur = a;
    while cur != b {
        cur = ix.out[cur]
            .iter()
            .map(|&(y, _)| y)
            .find(|&y| to_t[y] != usize::MAX && to_t[y] + 1 == to_t[cur])
            .expect("a descending neighbour exists on a shortest path");
        path.push(ix.ids[cur]);
    }
    Ok(path)
}

/// Hop diameter of a connected undirected graph.
pub fn diameter(g: &GraphInstance) -> OracleResult<i64> {
    require_undirected(g, "diameter")?;
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    diameter_indexed(&ix).map(|d| d as i64)
}

/// Exact hop diameter using eccentricity bounds (Takes & Kosters), which
/// usually needs far fewer BFS runs than all-pairs on sparse graphs.
pub(crate) fn diameter_indexed(ix: &Indexed) -> OracleResult<usize> {
    let n = ix.len();
    if n == 0 {
        return Err(OracleError::Degenerate("graph has no nodes".into()));
    }
    if weak_labels(ix).1 != 1 {
        return Err(OracleError::Disconnected);
    }
    let mut lower = vec![0usize; n];
    let mut upper = vec![usize::MAX; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = 0usize;
    let mut pick_high = true;
    while !active.is_empty() {
        let v = if pick_high {
            *active
                .iter()
                .max_by_key(|&&x| (upper[x], std::cmp::Reverse(x)))
                .unwrap()
        } else {
            *active.iter().min_by_key(|&&x| (lower[x], x)).unwrap()
        };
        pick_high = !pick_high;
        let dist = bfs_hops(ix, v);
        let ecc = *dist.iter().max().unwrap();
        best = best.max(ecc);
        lower[v] = ecc;
        upper[v] = ecc;
        for w in 0..n {
            let d = dist[w];
            lower[w] = lower[w].max(d.max(ecc - d));
            upper[w] = upper[w].min(ecc + d);
        }
        best = active
            .iter()
            .map(|&w| lower[w])
            .max()
            .unwrap_or(0)
            .max(best);
        // every ecc(w) <= upper[w]; once that cannot beat `best`, w is settled
        active.retain(|&w| w != v && upper[w] > best);
    }
    Ok(best)
}
