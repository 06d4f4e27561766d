use std::collections::VecDeque;

use super::{node_index, require_nonempty, OracleResult};
use crate::graph::{GraphInstance, Indexed, NodeId};

const EPS: f64 = 1e-12;

struct Arc {
    to: usize,
    cap: f64,
}

/// Dinic's algorithm on a residual network stored as paired arcs.
struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    level: Vec<usize>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            cursor: vec![0; n],
        }
    }

    fn add_arc(&mut self, a: usize, b: usize, cap: f64) {
        self.adj[a].push(self.arcs.len());
        self.arcs.push(Arc { to: b, cap });
        self.adj[b].push(self.arcs.len());
        self.arcs.push(Arc { to: a, cap: 0.0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(usize::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for &id in &self.adj[a] {
                let arc = &self.arcs[id];
                if arc.cap > EPS && self.level[arc.to] == usize::MAX {
                    self.level[arc.to] = self.level[a] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] != usize::MAX
    }

    /// Blocking-flow augmentation with an explicit stack.
    fn augment(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            // walk an admissible path
            let mut path: Vec<usize> = Vec::new();
            let mut node = s;
            loop {
                if node == t {
                    break;
                }
                let mut advanced = false;
                while self.cursor[node] < self.adj[node].len() {
                    let id = self.adj[node][self.cursor[node]];
                    let arc = &self.arcs[id];
                    if arc.cap > EPS && self.level[arc.to] == self.level[node] + 1 {
                        path.push(id);
                        node = arc.to;
                        advanced = true;
                        break;
                    }
                    self.cursor[node] += 1;
                }
                if !advanced {
                    // dead end: retreat
                    match path.pop() {
                        Some(id) => {
                            node = self.arcs[id ^ 1].to;
                            self.cursor[node] += 1;
                        }
                        None => return total,
                    }
                }
            }
            let bottleneck = path
                .iter()
                .map(|&id| self.arcs[id].cap)
                .fold(f64::INFINITY, f64::min);
            for &id in &path {
                self.arcs[id].cap -= bottleneck;
                self.arcs[id ^ 1].cap += bottleneck;
            }
            total += bottleneck;
        }
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.cursor.fill(0);
            flow += self.augment(s, t);
        }
        flow
    }
}

/// Maximum s→t flow with edge weights as capacities (unit capacities when
/// unweighted). Undirected edges act as two opposite arcs of equal capacity.
/// `s == t` carries no flow.
pub fn max_flow_value(g: &GraphInstance, s: NodeId, t: NodeId) -> OracleResult<f64> {
    require_nonempty(g)?;
    let ix = Indexed::new(g);
    let a = node_index(&ix, s)?;
    let b = node_index(&ix, t)?;
    Ok(max_flow_indexed(&ix, a, b))
}

pub(crate) fn max_flow_indexed(ix: &Indexed, s: usize, t: usize) -> f64 {
    if s == t {
        return 0.0;
    }
    let mut net = FlowNetwork::new(ix.len());
    for a in 0..ix.len() {
        for &(b, w) in &ix.out[a] {
            if a != b && w > 0.0 {
                net.add_arc(a, b, w);
            }
        }
    }
    net.max_flow(s, t)
}
