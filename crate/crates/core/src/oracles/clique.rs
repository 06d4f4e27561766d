use super::{require_nonempty, require_undirected, OracleResult};
use crate::graph::{GraphInstance, Indexed};

/// Dense adjacency bitsets, one row per vertex.
struct BitGraph {
    n: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitGraph {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            rows: vec![vec![0; words]; n],
        }
    }

    fn connect(&mut self, a: usize, b: usize) {
        if a != b {
            self.rows[a][b / 64] |= 1 << (b % 64);
            self.rows[b][a / 64] |= 1 << (a % 64);
        }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a][b / 64] >> (b % 64) & 1 == 1
    }
}

fn is_empty(set: &[u64]) -> bool {
    set.iter().all(|&w| w == 0)
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

fn clear(set: &mut [u64], v: usize) {
    set[v / 64] &= !(1 << (v % 64));
}

/// Maximum clique by branch and bound with greedy colouring bounds
/// (Tomita-style MCQ over bitsets).
struct CliqueSearch<'a> {
    g: &'a BitGraph,
    best: usize,
}

impl CliqueSearch<'_> {
    /// Greedy colour classes over `p`; returns vertices in non-decreasing
    /// colour order together with their colour numbers.
    fn colour(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut uncoloured = p.to_vec();
        let mut k = 0;
        while !is_empty(&uncoloured) {
            k += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                clear(&mut q, v);
                clear(&mut uncoloured, v);
                for (qw, rw) in q.iter_mut().zip(&self.g.rows[v]) {
                    *qw &= !rw;
                }
                order.push(v);
                colours.push(k);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, size: usize, mut p: Vec<u64>) {
        let (order, colours) = self.colour(&p);
        for i in (0..order.len()).rev() {
            if size + colours[i] <= self.best {
                return;
            }
            let v = order[i];
            let next: Vec<u64> = p.iter().zip(&self.g.rows[v]).map(|(a, b)| a & b).collect();
            if is_empty(&next) {
                self.best = self.best.max(size + 1);
            } else {
                self.expand(size + 1, next);
            }
            clear(&mut p, v);
        }
    }
}

fn max_clique_bits(g: &BitGraph) -> usize {
    if g.n == 0 {
        return 0;
    }
    let mut all = vec![0u64; g.words];
    for v in 0..g.n {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut search = CliqueSearch { g, best: 1 };
    search.expand(0, all);
    search.best
}

/// Relabel vertices by non-increasing degree, which tightens the colouring
/// bound early in the search.
fn degree_order(ix: &Indexed, complement: bool) -> Vec<usize> {
    let n = ix.len();
    let deg = |a: usize| {
        let d = ix.undirected_neighbors(a).len();
        if complement {
            n - 1 - d
        } else {
            d
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| (std::cmp::Reverse(deg(a)), a));
    order
}

fn bit_graph(ix: &Indexed, complement: bool) -> BitGraph {
    let n = ix.len();
    let order = degree_order(ix, complement);
    let mut pos = vec![0; n];
    for (i, &a) in order.iter().enumerate() {
        pos[a] = i;
    }
    let mut plain = BitGraph::new(n);
    for a in 0..n {
        for b in ix.undirected_neighbors(a) {
            plain.connect(pos[a], pos[b]);
        }
    }
    if !complement {
        return plain;
    }
    let mut comp = BitGraph::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if !plain.adjacent(a, b) {
                comp.connect(a, b);
            }
        }
    }
    comp
}

/// Size of a largest clique; self-loops are ignored.
pub fn max_clique_size(g: &GraphInstance) -> OracleResult<i64> {
    require_undirected(g, "max_clique_size")?;
    require_nonempty(g)?;
    Ok(max_clique_bits(&bit_graph(&Indexed::new(g), false)) as i64)
}

/// Size of a largest independent set, i.e. a largest clique of the complement.
pub fn max_independent_set_size(g: &GraphInstance) -> OracleResult<i64> {
    require_undirected(g, "max_independent_set_size")?;
    require_nonempty(g)?;
    Ok(max_clique_bits(&bit_graph(&Indexed::new(g), true)) as i64)
}
