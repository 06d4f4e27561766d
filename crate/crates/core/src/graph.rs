//! Edge-list graph instances and the indexed adjacency view the oracles run on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

pub type NodeId = i64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a node outside the node set")]
    DanglingEndpoint(NodeId, NodeId),
    #[error("weighted graph has an edge without a weight: ({0}, {1})")]
    MissingWeight(NodeId, NodeId),
    #[error("unweighted graph has a weighted edge: ({0}, {1})")]
    UnexpectedWeight(NodeId, NodeId),
    #[error("edge ({0}, {1}) has a negative or non-finite weight")]
    BadWeight(NodeId, NodeId),
    #[error("cannot parse edge list: {0}")]
    Parse(String),
}

/// One edge; `w` is present exactly when the owning graph is weighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: Option<f64>,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        Self { u, v, w: None }
    }

    pub fn weighted(u: NodeId, v: NodeId, w: f64) -> Self {
        Self { u, v, w: Some(w) }
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let len = if self.w.is_some() { 3 } else { 2 };
        let mut seq = serializer.serialize_seq(Some(len))?;
        seq.serialize_element(&self.u)?;
        seq.serialize_element(&self.v)?;
        if let Some(w) = self.w {
            seq.serialize_element(&w)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EdgeVisitor;

        impl<'de> Visitor<'de> for EdgeVisitor {
            type Value = Edge;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an edge [u, v] or [u, v, w]")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Edge, A::Error> {
                let u = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let v = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let w: Option<f64> = seq.next_element()?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(Edge { u, v, w })
            }
        }

        deserializer.deserialize_seq(EdgeVisitor)
    }
}

/// Direction and weighting of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct GraphKind {
    pub directed: bool,
    pub weighted: bool,
}

impl GraphKind {
    pub const fn new(directed: bool, weighted: bool) -> Self {
        Self { directed, weighted }
    }

    pub fn directed_text(&self) -> &'static str {
        if self.directed {
            "directed"
        } else {
            "undirected"
        }
    }

    pub fn weighted_text(&self) -> &'static str {
        if self.weighted {
            "weighted"
        } else {
            "unweighted"
        }
    }
}

/// A graph together with the task arguments it is queried with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInstance {
    pub directed: bool,
    pub weighted: bool,
    pub nodes: BTreeSet<NodeId>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub args: BTreeMap<String, Value>,
}

impl GraphInstance {
    /// Build an instance whose node set is exactly the edge endpoints plus `extra_nodes`.
    pub fn from_edges(
        kind: GraphKind,
        edges: Vec<Edge>,
        extra_nodes: impl IntoIterator<Item = NodeId>,
    ) -> Self {
        let mut nodes: BTreeSet<NodeId> = extra_nodes.into_iter().collect();
        for e in &edges {
            nodes.insert(e.u);
            nodes.insert(e.v);
        }
        Self {
            directed: kind.directed,
            weighted: kind.weighted,
            nodes,
            edges,
            args: BTreeMap::new(),
        }
    }

    pub fn unweighted(directed: bool, pairs: &[(NodeId, NodeId)]) -> Self {
        let edges = pairs.iter().map(|&(u, v)| Edge::new(u, v)).collect();
        Self::from_edges(GraphKind::new(directed, false), edges, [])
    }

    pub fn weighted_from(directed: bool, triples: &[(NodeId, NodeId, f64)]) -> Self {
        let edges = triples
            .iter()
            .map(|&(u, v, w)| Edge::weighted(u, v, w))
            .collect();
        Self::from_edges(GraphKind::new(directed, true), edges, [])
    }

    pub fn with_nodes(mut self, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        self.nodes.extend(nodes);
        self
    }

    pub fn with_arg(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.args.insert(name.to_string(), value.into());
        self
    }

    pub fn kind(&self) -> GraphKind {
        GraphKind::new(self.directed, self.weighted)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arg_node(&self, name: &str) -> Option<NodeId> {
        self.args.get(name).and_then(Value::as_i64)
    }

    pub fn arg_usize(&self, name: &str) -> Option<usize> {
        self.args
            .get(name)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        for e in &self.edges {
            if !self.nodes.contains(&e.u) || !self.nodes.contains(&e.v) {
                return Err(GraphError::DanglingEndpoint(e.u, e.v));
            }
            match (self.weighted, e.w) {
                (true, None) => return Err(GraphError::MissingWeight(e.u, e.v)),
                (false, Some(_)) => return Err(GraphError::UnexpectedWeight(e.u, e.v)),
                (true, Some(w)) if !(w.is_finite() && w >= 0.0) => {
                    return Err(GraphError::BadWeight(e.u, e.v))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Undirected view with the same nodes; for directed inputs, antiparallel
    /// arcs merge into one edge (the later arc's weight wins).
    pub fn undirected_projection(&self) -> GraphInstance {
        GraphInstance {
            directed: false,
            ..self.clone()
        }
    }

    /// Node-induced subgraph over `keep`.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> GraphInstance {
        GraphInstance {
            directed: self.directed,
            weighted: self.weighted,
            nodes: keep.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep.contains(&e.u) && keep.contains(&e.v))
                .copied()
                .collect(),
            args: BTreeMap::new(),
        }
    }

    /// Simple-graph complement (no self-loops), unweighted.
    pub fn complement(&self) -> GraphInstance {
        let ix = Indexed::new(self);
        let n = ix.len();
        let mut edges = Vec::new();
        for a in 0..n {
            let from = if self.directed { 0 } else { a + 1 };
            for b in from..n {
                if a != b && !ix.has_arc(a, b) {
                    edges.push(Edge::new(ix.ids[a], ix.ids[b]));
                }
            }
        }
        GraphInstance {
            directed: self.directed,
            weighted: false,
            nodes: self.nodes.clone(),
            edges,
            args: BTreeMap::new(),
        }
    }

    /// Render as the paper-style text edge list: `(u,v)` pairs or `(u,v,w)` triples.
    pub fn to_edge_list_text(&self) -> String {
        let items: Vec<String> = self
            .edges
            .iter()
            .map(|e| match e.w {
                Some(w) => format!("({},{},{})", e.u, e.v, fmt_weight(w)),
                None => format!("({},{})", e.u, e.v),
            })
            .collect();
        format!("{{{}}}", items.join(", "))
    }

    /// Parse a text edge list of `(u,v)` or `(u,v,w)` tuples; surrounding
    /// braces or brackets are optional.
    pub fn parse_edge_list_text(text: &str, directed: bool) -> Result<GraphInstance, GraphError> {
        let mut edges = Vec::new();
        let mut rest = text;
        while let Some(open) = rest.find('(') {
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| GraphError::Parse("unterminated tuple".into()))?
                + open;
            let inner = &rest[open + 1..close];
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            let node = |s: &str| {
                s.parse::<NodeId>()
                    .map_err(|_| GraphError::Parse(format!("bad node id {s:?}")))
            };
            let edge = match parts.as_slice() {
                [u, v] => Edge::new(node(u)?, node(v)?),
                [u, v, w] => Edge::weighted(
                    node(u)?,
                    node(v)?,
                    w.parse()
                        .map_err(|_| GraphError::Parse(format!("bad weight {w:?}")))?,
                ),
                _ => return Err(GraphError::Parse(format!("bad tuple ({inner})"))),
            };
            edges.push(edge);
            rest = &rest[close + 1..];
        }
        let weighted = edges.first().is_some_and(|e| e.w.is_some());
        if edges.iter().any(|e| e.w.is_some() != weighted) {
            return Err(GraphError::Parse("mixed pairs and triples".into()));
        }
        Ok(GraphInstance::from_edges(
            GraphKind::new(directed, weighted),
            edges,
            [],
        ))
    }
}

fn fmt_weight(w: f64) -> String {
    if w.fract() == 0.0 && w.abs() < 1e15 {
        format!("{w:.1}")
    } else {
        format!("{w}")
    }
}

/// Dense-index adjacency built from a [`GraphInstance`].
///
/// Parallel edges collapse into one (the last occurrence's weight wins); on
/// undirected graphs `(u,v)` and `(v,u)` are the same edge. Unweighted edges
/// carry weight 1.0. Self-loops are kept in `out`/`inn` and flagged in
/// `self_loop`.
#[derive(Debug, Clone)]
pub struct Indexed {
    pub ids: Vec<NodeId>,
    pub index: HashMap<NodeId, usize>,
    pub directed: bool,
    /// Out-neighbours (all neighbours when undirected), sorted by index.
    pub out: Vec<Vec<(usize, f64)>>,
    /// In-neighbours; equals `out` for undirected graphs.
    pub inn: Vec<Vec<(usize, f64)>>,
    pub self_loop: Vec<bool>,
}

impl Indexed {
    pub fn new(g: &GraphInstance) -> Self {
        let ids: Vec<NodeId> = g.nodes.iter().copied().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let n = ids.len();
        let mut arcs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &g.edges {
            let (Some(&a), Some(&b)) = (index.get(&e.u), index.get(&e.v)) else {
                continue;
            };
            let w = e.w.unwrap_or(1.0);
            if g.directed {
                arcs.insert((a, b), w);
            } else {
                arcs.insert((a.min(b), a.max(b)), w);
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut self_loop = vec![false; n];
        for (&(a, b), &w) in &arcs {
            if a == b {
                self_loop[a] = true;
            }
            out[a].push((b, w));
            inn[b].push((a, w));
            if !g.directed && a != b {
                out[b].push((a, w));
                inn[a].push((b, w));
            }
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_by_key(|&(x, _)| x);
        }
        Self {
            ids,
            index,
            directed: g.directed,
            out,
            inn,
            self_loop,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.out[a].binary_search_by_key(&b, |&(x, _)| x).is_ok()
    }

    /// Neighbours ignoring direction and self-loops, sorted and deduplicated.
    pub fn undirected_neighbors(&self, a: usize) -> Vec<usize> {
        let mut ns: Vec<usize> = self.out[a]
            .iter()
            .chain(self.inn[a].iter())
            .map(|&(x, _)| x)
            .filter(|&x| x != a)
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// Degree with the usual convention that a self-loop adds two on
    /// undirected graphs. For directed graphs returns (in, out).
    pub fn degree(&self, a: usize) -> usize {
        let loops = usize::from(self.self_loop[a]);
        self.out[a].len() + loops
    }

    pub fn in_out_degree(&self, a: usize) -> (usize, usize) {
        (self.inn[a].len(), self.out[a].len())
    }
}
