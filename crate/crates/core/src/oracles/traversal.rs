use std::collections::BTreeSet;

use super::{require_directed, require_nonempty, require_undirected, OracleResult};
use crate::graph::{GraphInstance, Indexed, NodeId};

/// Component label per node over the undirected view, labels in order of
/// first (smallest-index) member.
pub(crate) fn weak_labels(ix: &Indexed) -> (Vec<usize>, usize) {
    let n = ix.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        stack.push(start);
        while let Some(a) = stack.pop() {
            for &(b, _) in ix.out[a].iter().chain(ix.inn[a].iter()) {
                if label[b] == usize::MAX {
                    label[b] = count;
                    stack.push(b);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

pub fn is_connected(g: &GraphInstance) -> OracleResult<bool> {
    require_undirected(g, "is_connected")?;
    require_nonempty(g)?;
    Ok(weak_labels(&Indexed::new(g)).1 == 1)
}

pub fn count_components(g: &GraphInstance) -> OracleResult<i64> {
    require_undirected(g, "count_components")?;
    Ok(weak_labels(&Indexed::new(g)).1 as i64)
}

/// Connected components (undirected), each sorted, ordered by smallest member.
pub fn connected_components(g: &GraphInstance) -> OracleResult<Vec<BTreeSet<NodeId>>> {
    require_undirected(g, "connected_components")?;
    let ix = Indexed::new(g);
    let (label, count) = weak_labels(&ix);
    let mut comps = vec![BTreeSet::new(); count];
    for (i, &l) in label.iter().enumerate() {
        comps[l].insert(ix.ids[i]);
    }
    Ok(comps)
}

/// Iterative Tarjan; returns one component id per node.
pub(crate) fn scc_labels(ix: &Indexed) -> (Vec<usize>, usize) {
    let n = ix.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut count = 0;
    // (node, position in its out-list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < ix.out[v].len() {
                let w = ix.out[v][top.1].0;
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

/// Strongly connected components, each sorted, ordered by smallest member.
pub fn scc_partition(g: &GraphInstance) -> OracleResult<Vec<BTreeSet<NodeId>>> {
    require_directed(g, "scc_partition")?;
    let ix = Indexed::new(g);
    let (comp, count) = scc_labels(&ix);
    let mut comps = vec![BTreeSet::new(); count];
    for (i, &c) in comp.iter().enumerate() {
        comps[c].insert(ix.ids[i]);
    }
    comps.sort_by_key(|c| c.first().copied());
    Ok(comps)
}

pub fn count_scc(g: &GraphInstance) -> OracleResult<i64> {
    require_directed(g, "count_scc")?;
    Ok(scc_labels(&Indexed::new(g)).1 as i64)
}

/// Eulerian path existence with the NetworkX convention: every node,
/// isolated ones included, must lie in one (weakly) connected component.
pub fn has_eulerian_path(g: &GraphInstance) -> OracleResult<bool> {
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    Ok(eulerian_indexed(&ix))
}

pub(crate) fn eulerian_indexed(ix: &Indexed) -> bool {
    if ix.is_empty() || weak_labels(ix).1 != 1 {
        return false;
    }
    if ix.directed {
        let mut plus = 0;
        let mut minus = 0;
        for a in 0..ix.len() {
            let (i, o) = ix.in_out_degree(a);
            match o as i64 - i as i64 {
                0 => {}
                1 => plus += 1,
                -1 => minus += 1,
                _ => return false,
            }
        }
        plus <= 1 && minus <= 1
    } else {
        let odd = (0..ix.len()).filter(|&a| ix.degree(a) % 2 == 1).count();
        odd == 0 || odd == 2
    }
}

pub fn is_bipartite(g: &GraphInstance) -> OracleResult<bool> {
    require_undirected(g, "is_bipartite")?;
    let ix = Indexed::new(g);
    if ix.self_loop.iter().any(|&l| l) {
        return Ok(false);
    }
    let n = ix.len();
    let mut color = vec![u8::MAX; n];
    let mut stack = Vec::new();
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        stack.push(start);
        while let Some(a) = stack.pop() {
            for &(b, _) in &ix.out[a] {
                if color[b] == u8::MAX {
                    color[b] = 1 - color[a];
                    stack.push(b);
                } else if color[b] == color[a] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
