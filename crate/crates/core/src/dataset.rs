//! Benchmark synthesis: random graphs meeting each task's constraints,
//! uniformly drawn arguments and oracle labels, written as JSONL.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::answer::{answers_equal, AnswerTag, AnswerValue, Tolerance};
use crate::graph::{Edge, GraphInstance, GraphKind, NodeId};
use crate::oracles::{is_connected, OracleError};
use crate::tasks::{task_by_id, ArgKind, TaskKind, TaskSpec};

/// Largest edge weight; weights are drawn uniformly from `[0, MAX_WEIGHT]`.
pub const MAX_WEIGHT: f64 = 10.0;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("could not satisfy graph constraints: {0}")]
    ConstraintUnsatisfiable(String),
    #[error("invalid generation config: {0}")]
    BadConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Which size table a dataset follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Graphs of a few to 200 nodes.
    Small,
    /// Graphs of 200 to 8000 nodes.
    Large,
}

/// Edge density of the random graph model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    /// Edge probability drawn uniformly from `[lo, hi]`.
    Probability { lo: f64, hi: f64 },
    /// Target edge count drawn uniformly from `[lo, hi]` and converted to an
    /// edge probability for the chosen node count.
    EdgeCount { lo: usize, hi: usize },
}

/// Everything that determines a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub seed: u64,
    pub instances_per_task: usize,
    pub profile: Profile,
    /// Node-count buckets cycled through instance by instance; each bucket is
    /// intersected with the task's own node range.
    pub size_buckets: Vec<(usize, usize)>,
    pub density: Density,
    /// For the regularity tasks, draw half of the graphs from regular
    /// families so both answers occur.
    pub regular_mix: bool,
    /// Connectivity rejection attempts before a spanning tree is added.
    pub connect_attempts: usize,
    /// Argument draws per graph before the instance is skipped.
    pub arg_attempts: usize,
}

impl GenerationConfig {
    pub fn small(seed: u64, instances_per_task: usize) -> Self {
        Self {
            seed,
            instances_per_task,
            profile: Profile::Small,
            size_buckets: vec![(2, 20), (21, 60), (61, 200)],
            density: Density::Probability { lo: 0.02, hi: 0.6 },
            regular_mix: true,
            connect_attempts: 20,
            arg_attempts: 20,
        }
    }

    pub fn large(seed: u64, instances_per_task: usize) -> Self {
        Self {
            seed,
            instances_per_task,
            profile: Profile::Large,
            size_buckets: vec![
                (200, 1000),
                (1001, 3000),
                (3001, 4999),
                (5000, 5000),
                (8000, 8000),
            ],
            density: Density::EdgeCount {
                lo: 5_400,
                hi: 300_000,
            },
            regular_mix: true,
            connect_attempts: 20,
            arg_attempts: 20,
        }
    }

    fn validate(&self) -> Result<(), GenerationError> {
        if self.size_buckets.is_empty() {
            return Err(GenerationError::BadConfig("no size buckets".into()));
        }
        if self.size_buckets.iter().any(|&(lo, hi)| lo > hi || lo == 0) {
            return Err(GenerationError::BadConfig("size bucket bounds".into()));
        }
        match self.density {
            Density::Probability { lo, hi }
                if !(0.0..=1.0).contains(&lo) || hi < lo || hi > 1.0 =>
            {
                Err(GenerationError::BadConfig("edge probability range".into()))
            }
            Density::EdgeCount { lo, hi } if hi < lo => {
                Err(GenerationError::BadConfig("edge count range".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Shape requirements for one random graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphRequest {
    pub directed: bool,
    pub weighted: bool,
    pub connected: bool,
    pub nodes: (usize, usize),
    pub density: Density,
    pub connect_attempts: usize,
}

/// Generation metadata stored with every record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub n: usize,
    pub m: usize,
    pub directed: bool,
    pub weighted: bool,
    pub seed: u64,
    pub profile: Profile,
    pub answer_type: AnswerTag,
}

/// One benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub task_id: String,
    pub description: String,
    pub directed: bool,
    pub weighted: bool,
    pub edges: Vec<Edge>,
    pub args: BTreeMap<String, Value>,
    /// The answer in plain JSON; `meta.answer_type` gives its shape.
    pub label: Value,
    pub meta: RecordMeta,
}

impl DatasetRecord {
    /// The instance graph (nodes are the edge endpoints) with its arguments.
    pub fn graph(&self) -> GraphInstance {
        let mut g = GraphInstance::from_edges(
            GraphKind::new(self.directed, self.weighted),
            self.edges.clone(),
            [],
        );
        g.args = self.args.clone();
        g
    }

    pub fn label_value(&self) -> AnswerValue {
        AnswerValue::from_json(&self.label, Some(self.meta.answer_type))
    }
}

/// Deterministic 64-bit mixing (splitmix64 finaliser).
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for instance `index` of `task_id` under `master`.
pub fn instance_seed(master: u64, task_id: &str, index: usize) -> u64 {
    // FNV-1a over the task id keeps seeds stable across registry reorderings
    let task_hash = task_id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    });
    mix(mix(master ^ task_hash) ^ index as u64)
}

fn round_weight(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn edge_probability(density: Density, n: usize, directed: bool, rng: &mut impl Rng) -> f64 {
    let pairs = if directed {
        n * (n - 1)
    } else {
        n * (n - 1) / 2
    };
    match density {
        Density::Probability { lo, hi } => {
            if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        }
        Density::EdgeCount { lo, hi } => {
            if pairs == 0 {
                return 0.0;
            }
            let m = rng.random_range(lo..=hi.max(lo));
            (m as f64 / pairs as f64).min(1.0)
        }
    }
}

/// Erdős–Rényi G(n, p) via geometric skips over the pair index, so the cost
/// is proportional to the number of edges rather than n².
fn erdos_renyi(n: usize, p: f64, directed: bool, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n < 2 || p <= 0.0 {
        return Vec::new();
    }
    // pairs in row-major order: (u, v) with v != u (directed) or v > u
    let row_len = |u: usize| if directed { n - 1 } else { n - 1 - u };
    let column = |u: usize, offset: usize| {
        if directed {
            if offset >= u {
                offset + 1
            } else {
                offset
            }
        } else {
            u + 1 + offset
        }
    };
    let total: usize = (0..n).map(row_len).sum();
    let mut out = Vec::new();
    if p >= 1.0 {
        for u in 0..n {
            out.extend((0..row_len(u)).map(|o| (u, column(u, o))));
        }
        return out;
    }
    let log_q = (1.0 - p).ln();
    let (mut u, mut row_start) = (0usize, 0usize);
    let mut k: usize = 0;
    let mut first = true;
    loop {
        let r: f64 = rng.random::<f64>();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if !skip.is_finite() || skip >= total as f64 {
            break;
        }
        k = if first {
            skip as usize
        } else {
            k + skip as usize + 1
        };
        first = false;
        if k >= total {
            break;
        }
        while k >= row_start + row_len(u) {
            row_start += row_len(u);
            u += 1;
        }
        out.push((u, column(u, k - row_start)));
    }
    out
}

fn weak_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}

fn is_weakly_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let roots = weak_components(n, edges);
    roots.iter().all(|&r| r == roots[0])
}

/// Give every isolated node one incident edge. Instances travel as edge
/// lists only, so an isolated node would silently vanish from the graph a
/// solver rebuilds.
fn attach_isolated(n: usize, edges: &mut Vec<(usize, usize)>, directed: bool, rng: &mut impl Rng) {
    let mut touched = vec![false; n];
    for &(a, b) in edges.iter() {
        touched[a] = true;
        touched[b] = true;
    }
    for a in 0..n {
        if touched[a] {
            continue;
        }
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let e = if directed && rng.random_bool(0.5) {
            (b, a)
        } else {
            (a, b)
        };
        edges.push(e);
        touched[a] = true;
        touched[b] = true;
    }
}

/// Add the edges of a uniformly shuffled random recursive spanning tree.
fn add_spanning_tree(
    n: usize,
    edges: &mut Vec<(usize, usize)>,
    directed: bool,
    rng: &mut impl Rng,
) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present: BTreeSet<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| {
            if directed {
                (a, b)
            } else {
                (a.min(b), a.max(b))
            }
        })
        .collect();
    for i in 1..n {
        let a = order[i];
        let b = order[rng.random_range(0..i)];
        let e = if directed && rng.random_bool(0.5) {
            (b, a)
        } else {
            (a, b)
        };
        let key = if directed {
            e
        } else {
            (e.0.min(e.1), e.0.max(e.1))
        };
        let reverse_present = directed && present.contains(&(e.1, e.0));
        if !present.contains(&key) && !reverse_present {
            present.insert(key);
            edges.push(e);
        }
    }
}

fn assemble(
    n: usize,
    pairs: Vec<(usize, usize)>,
    directed: bool,
    weighted: bool,
    rng: &mut impl Rng,
) -> GraphInstance {
    // random relabelling hides the generation order from node ids
    let mut label: Vec<NodeId> = (0..n as NodeId).collect();
    label.shuffle(rng);
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(a, b)| {
            let (u, v) = (label[a], label[b]);
            if weighted {
                Edge::weighted(u, v, round_weight(rng.random_range(0.0..=MAX_WEIGHT)))
            } else {
                Edge::new(u, v)
            }
        })
        .collect();
    GraphInstance::from_edges(GraphKind::new(directed, weighted), edges, 0..n as NodeId)
}

fn pick_nodes(range: (usize, usize), rng: &mut impl Rng) -> usize {
    rng.random_range(range.0..=range.1)
}

/// Draw a random graph meeting `req`: G(n, p) with n uniform in the node
/// range, connectivity repaired by rejection and then a spanning-tree union,
/// isolated nodes attached, weights uniform in `[0, 10]` at one decimal.
pub fn generate_graph(
    req: &GraphRequest,
    rng: &mut impl Rng,
) -> Result<GraphInstance, GenerationError> {
    let (lo, hi) = req.nodes;
    if lo == 0 || lo > hi {
        return Err(GenerationError::ConstraintUnsatisfiable(format!(
            "empty node range {lo}..={hi}"
        )));
    }
    let n = pick_nodes(req.nodes, rng);
    let mut pairs = Vec::new();
    let mut connected = false;
    for _ in 0..req.connect_attempts.max(1) {
        let p = edge_probability(req.density, n, req.directed, rng);
        pairs = erdos_renyi(n, p, req.directed, rng);
        connected = is_weakly_connected(n, &pairs);
        if !req.connected || connected {
            break;
        }
    }
    if req.connected && !connected {
        add_spanning_tree(n, &mut pairs, req.directed, rng);
    }
    if n >= 2 {
        attach_isolated(n, &mut pairs, req.directed, rng);
    }
    Ok(assemble(n, pairs, req.directed, req.weighted, rng))
}

/// A graph from a structured regular (or nearly regular) family, used to
/// balance the answers of the regularity tasks.
fn regular_family_graph(range: (usize, usize), rng: &mut impl Rng) -> GraphInstance {
    let n = pick_nodes((range.0.max(3), range.1.max(3)), rng);
    let cycle = |n: usize, offset: usize| -> Vec<(usize, usize)> {
        (0..n).map(|i| (offset + i, offset + (i + 1) % n)).collect()
    };
    let family = rng.random_range(0..6);
    let pairs: Vec<(usize, usize)> = match family {
        0 => cycle(n, 0),
        1 if n <= 600 => (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect(),
        2 if n >= 4 && n % 2 == 0 && n <= 800 => {
            let h = n / 2;
            (0..h).flat_map(|a| (h..n).map(move |b| (a, b))).collect()
        }
        3 if n >= 6 => (0..n)
            .flat_map(|i| [(i, (i + 1) % n), (i, (i + 2) % n)])
            .collect(),
        4 if n >= 6 => {
            let h = n / 2;
            let mut p = cycle(h, 0);
            p.extend(cycle(n - h, h));
            p
        }
        _ => {
            // a cycle with one chord: regular everywhere except two nodes
            let mut p = cycle(n, 0);
            if n >= 5 {
                p.push((0, n / 2));
            }
            p
        }
    };
    assemble(n, pairs, false, false, rng)
}

fn node_range(spec: &TaskSpec, profile: Profile) -> Option<(usize, usize)> {
    match profile {
        Profile::Small => Some(spec.constraints.small_nodes),
        Profile::Large => spec.constraints.large_nodes,
    }
}

/// Density actually used for a task. The clique tasks are NP-hard, so the
/// generator keeps them in regimes where exact search stays fast: sparse to
/// medium graphs for clique, dense graphs (sparse complements) for
/// independent set.
fn task_density(spec: &TaskSpec, config: &GenerationConfig) -> Density {
    match (spec.kind, config.profile) {
        (TaskKind::MaxIndependentSet, Profile::Small) => Density::Probability { lo: 0.5, hi: 0.95 },
        (TaskKind::MaxIndependentSet, Profile::Large) => Density::Probability { lo: 0.75, hi: 0.9 },
        (TaskKind::MaxClique, _) => match config.density {
            Density::Probability { lo, hi } => Density::Probability {
                lo: lo.min(0.5),
                hi: hi.min(0.5),
            },
            other => other,
        },
        _ => config.density,
    }
}

/// Bucket for instance `index`, clipped to the task's range; falls back to
/// the whole task range when no bucket overlaps it.
fn bucket_range(task: (usize, usize), buckets: &[(usize, usize)], index: usize) -> (usize, usize) {
    let overlapping: Vec<(usize, usize)> = buckets
        .iter()
        .map(|&(lo, hi)| (lo.max(task.0), hi.min(task.1)))
        .filter(|&(lo, hi)| lo <= hi)
        .collect();
    if overlapping.is_empty() {
        return task;
    }
    overlapping[index % overlapping.len()]
}

fn draw_args(spec: &TaskSpec, g: &GraphInstance, rng: &mut impl Rng) -> BTreeMap<String, Value> {
    let nodes: Vec<NodeId> = g.nodes.iter().copied().collect();
    let mut used: Vec<NodeId> = Vec::new();
    let mut args = BTreeMap::new();
    for arg in spec.args {
        let value = match arg.kind {
            ArgKind::Node => {
                let mut v = nodes[rng.random_range(0..nodes.len())];
                if spec.distinct_nodes && nodes.len() > used.len() {
                    while used.contains(&v) {
                        v = nodes[rng.random_range(0..nodes.len())];
                    }
                }
                used.push(v);
                Value::from(v)
            }
            ArgKind::Count => Value::from(rng.random_range(1..=nodes.len().clamp(1, 10))),
        };
        args.insert(arg.name.to_string(), value);
    }
    args
}

/// Draw arguments for `graph` and label it. Arguments for which the oracle
/// is undefined (e.g. no path) are redrawn up to `arg_attempts` times;
/// `Ok(None)` means the instance is skipped.
pub fn make_record(
    spec: &TaskSpec,
    graph: &GraphInstance,
    rng: &mut impl Rng,
    arg_attempts: usize,
    id: String,
    seed: u64,
    profile: Profile,
) -> Result<Option<DatasetRecord>, OracleError> {
    let mut last_err = None;
    for _ in 0..arg_attempts.max(1) {
        let mut g = graph.clone();
        g.args = draw_args(spec, graph, rng);
        match spec.label(&g) {
            Ok(label) => {
                return Ok(Some(DatasetRecord {
                    id,
                    task_id: spec.task_id.to_string(),
                    description: spec.description.to_string(),
                    directed: g.directed,
                    weighted: g.weighted,
                    meta: RecordMeta {
                        n: g.node_count(),
                        m: g.edges.len(),
                        directed: g.directed,
                        weighted: g.weighted,
                        seed,
                        profile,
                        answer_type: spec.answer_tag,
                    },
                    edges: g.edges,
                    args: g.args,
                    label: label.to_json(),
                }))
            }
            Err(OracleError::KindMismatch { op, expected }) => {
                return Err(OracleError::KindMismatch { op, expected })
            }
            Err(e) => last_err = Some(e),
        }
        if spec.args.is_empty() {
            break;
        }
    }
    tracing::debug!(task = spec.task_id, error = ?last_err, "instance skipped");
    Ok(None)
}

/// Generate the records of one task.
pub fn generate_task(
    spec: &TaskSpec,
    config: &GenerationConfig,
) -> Result<Vec<DatasetRecord>, GenerationError> {
    config.validate()?;
    let Some(range) = node_range(spec, config.profile) else {
        tracing::warn!(task = spec.task_id, "task has no graphs in this profile");
        return Ok(Vec::new());
    };
    let density = task_density(spec, config);
    let mut records = Vec::with_capacity(config.instances_per_task);
    // skipped instances are replaced, within a bounded number of draws
    let max_draws = config
        .instances_per_task
        .saturating_mul(10)
        .max(config.instances_per_task);
    let mut draw = 0;
    while records.len() < config.instances_per_task && draw < max_draws {
        let seed = instance_seed(config.seed, spec.task_id, draw);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = bucket_range(range, &config.size_buckets, records.len());
        let structured = config.regular_mix
            && matches!(spec.kind, TaskKind::Regular | TaskKind::DistanceRegular)
            && rng.random_bool(0.5);
        let graph = if structured {
            regular_family_graph(nodes, &mut rng)
        } else {
            let req = GraphRequest {
                directed: spec.constraints.directed,
                weighted: spec.constraints.weighted,
                connected: spec.constraints.connected,
                nodes,
                density,
                connect_attempts: config.connect_attempts,
            };
            generate_graph(&req, &mut rng)?
        };
        let id = format!("{}-{:05}", spec.task_id, records.len());
        let record = make_record(
            spec,
            &graph,
            &mut rng,
            config.arg_attempts,
            id,
            seed,
            config.profile,
        )
        .map_err(|e| GenerationError::ConstraintUnsatisfiable(e.to_string()))?;
        if let Some(record) = record {
            records.push(record);
        }
        draw += 1;
    }
    if records.len() < config.instances_per_task {
        tracing::warn!(
            task = spec.task_id,
            produced = records.len(),
            wanted = config.instances_per_task,
            "fewer instances than requested"
        );
    }
    Ok(records)
}

/// Generate every task's records, tasks in parallel, output in task order.
pub fn generate_dataset(
    specs: &[&TaskSpec],
    config: &GenerationConfig,
) -> Result<Vec<DatasetRecord>, GenerationError> {
    let per_task: Vec<Result<Vec<DatasetRecord>, GenerationError>> = specs
        .par_iter()
        .map(|spec| generate_task(spec, config))
        .collect();
    let mut out = Vec::new();
    for records in per_task {
        out.extend(records?);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(records: &[DatasetRecord], mut out: W) -> Result<(), GenerationError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<DatasetRecord>, GenerationError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| GenerationError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(out)
}

/// Why a record failed re-verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("graph kind differs from the task's constraints")]
    KindMismatch,
    #[error("{0} nodes is outside the profile range {1:?}")]
    NodeCount(usize, Option<(usize, usize)>),
    #[error("edge weight {0} outside [0, 10]")]
    Weight(f64),
    #[error("graph must be connected")]
    NotConnected,
    #[error("metadata disagrees with the instance")]
    Meta,
    #[error("oracle failed: {0}")]
    Oracle(String),
    #[error("stored label {stored} differs from recomputed {recomputed}")]
    Label { stored: Value, recomputed: Value },
}

/// Check a record against its task: graph constraints, weight range,
/// metadata, and the label recomputed by the oracle.
pub fn verify_record(record: &DatasetRecord) -> Result<(), VerifyError> {
    let spec = task_by_id(&record.task_id)
        .map_err(|_| VerifyError::UnknownTask(record.task_id.clone()))?;
    if record.directed != spec.constraints.directed || record.weighted != spec.constraints.weighted
    {
        return Err(VerifyError::KindMismatch);
    }
    let g = record.graph();
    g.validate().map_err(|_| VerifyError::KindMismatch)?;
    let range = node_range(spec, record.meta.profile);
    let n = g.node_count();
    if !range.is_some_and(|(lo, hi)| (lo..=hi).contains(&n)) {
        return Err(VerifyError::NodeCount(n, range));
    }
    for e in &g.edges {
        if let Some(w) = e.w {
            if !(0.0..=MAX_WEIGHT).contains(&w) {
                return Err(VerifyError::Weight(w));
            }
        }
    }
    if spec.constraints.connected && !is_connected(&g).unwrap_or(false) {
        return Err(VerifyError::NotConnected);
    }
    if record.meta.n != n
        || record.meta.m != g.edges.len()
        || record.meta.directed != record.directed
        || record.meta.weighted != record.weighted
        || record.meta.answer_type != spec.answer_tag
    {
        return Err(VerifyError::Meta);
    }
    let recomputed = spec
        .label(&g)
        .map_err(|e| VerifyError::Oracle(e.to_string()))?;
    let tight = Tolerance {
        abs: 1e-9,
        rel: 1e-12,
    };
    if !answers_equal(&record.label_value(), &recomputed, &tight) {
        return Err(VerifyError::Label {
            stored: record.label.clone(),
            recomputed: recomputed.to_json(),
        });
    }
    Ok(())
}
