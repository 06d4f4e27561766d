//! Layer-wise retrieval over a documentation tree: expand the selected
//! chapters one layer at a time, let a judge keep the relevant children,
//! then run a per-entry yes/no filter over the surviving entries.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use graphcode_core::eval::Purpose;
use serde::Serialize;
use thiserror::Error;
use tracing::warn;

use crate::doctree::{DocNode, DocTree};
use crate::gateway::{ChatRequest, Gateway, GatewayError};
use crate::parse::{parse_string_list, parse_yes_no};
use crate::prompts;
use crate::tfidf::token_set;

pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskQuery {
    pub description: String,
    pub directed: Option<bool>,
    pub weighted: Option<bool>,
}

impl TaskQuery {
    pub fn new(description: impl Into<String>) -> Self {
        Self {
            description: description.into(),
            directed: None,
            weighted: None,
        }
    }

    pub fn with_kind(mut self, directed: bool, weighted: bool) -> Self {
        self.directed = Some(directed);
        self.weighted = Some(weighted);
        self
    }

    /// The query as shown to a model: the description plus the graph type
    /// when known.
    pub fn prompt_text(&self) -> String {
        match (self.directed, self.weighted) {
            (Some(d), Some(w)) => format!(
                "{}\nGraph type: {}, {}.",
                self.description,
                if d { "directed" } else { "undirected" },
                if w { "weighted" } else { "unweighted" }
            ),
            _ => self.description.clone(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JudgeError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("could not parse judge output: {0}")]
    Unparseable(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RetrievalError {
    #[error("judge failed: {0}")]
    Judge(#[from] JudgeError),
    #[error("query description is empty")]
    EmptyQuery,
}

/// Decides which documentation nodes matter for a query.
pub trait RelevanceJudge: Send + Sync {
    /// Ids of the relevant candidates, best first. One call covers a whole
    /// layer. Ids outside `candidates` are tolerated and dropped by the caller.
    fn select(
        &self,
        q: &TaskQuery,
        candidates: &[&DocNode],
        top_k: Option<usize>,
    ) -> Result<Vec<String>, JudgeError>;

    /// Final yes/no on a single entry.
    fn is_relevant(&self, q: &TaskQuery, leaf: &DocNode) -> Result<bool, JudgeError>;
}

/// Keep the judge's choices that are real, distinct candidates, capped at
/// `top_k`. Unparseable output yields an empty selection and a warning.
pub fn select_relevant(
    q: &TaskQuery,
    candidates: &[&DocNode],
    judge: &dyn RelevanceJudge,
    top_k: Option<usize>,
) -> Result<(Vec<String>, Option<String>), JudgeError> {
    if candidates.is_empty() {
        return Ok((Vec::new(), None));
    }
    let picked = match judge.select(q, candidates, top_k) {
        Ok(p) => p,
        Err(JudgeError::Unparseable(msg)) => {
            warn!(%msg, "unparseable relevance output; selecting nothing");
            return Ok((
                Vec::new(),
                Some(format!("unparseable relevance output: {msg}")),
            ));
        }
        Err(e) => return Err(e),
    };
    let mut out: Vec<String> = Vec::new();
    let mut dropped = Vec::new();
    for id in picked {
        if !candidates.iter().any(|c| c.id == id) {
            dropped.push(id);
        } else if !out.contains(&id) {
            out.push(id);
        }
    }
    if let Some(k) = top_k {
        out.truncate(k);
    }
    let warning = (!dropped.is_empty()).then(|| format!("dropped unknown keys {dropped:?}"));
    Ok((out, warning))
}

/// Children of the selected internal nodes, in order, followed by the
/// selected leaves themselves (carried forward unchanged).
pub fn candidate_children<'t>(tree: &'t DocTree, selected: &[&str]) -> Vec<&'t DocNode> {
    let mut out: Vec<&DocNode> = Vec::new();
    let mut seen = BTreeSet::new();
    for id in selected {
        let Some(n) = tree.node(id) else { continue };
        if n.is_leaf() {
            continue;
        }
        for c in &n.children {
            if seen.insert(c.as_str()) {
                out.push(tree.node(c).expect("validated tree"));
            }
        }
    }
    for id in selected {
        if let Some(n) = tree.node(id) {
            if n.is_leaf() && seen.insert(n.id.as_str()) {
                out.push(n);
            }
        }
    }
    out
}

/// Per-entry yes/no; a failed judgment counts as "no".
pub fn global_filter(
    q: &TaskQuery,
    leaves: &[&DocNode],
    judge: &dyn RelevanceJudge,
) -> Vec<String> {
    leaves
        .iter()
        .filter(|leaf| match judge.is_relevant(q, leaf) {
            Ok(yes) => yes,
            Err(e) => {
                warn!(leaf = %leaf.id, error = %e, "filter judgment failed; treating as no");
                false
            }
        })
        .map(|leaf| leaf.id.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalConfig {
    /// Per-layer cap on selected nodes; `None` means unbounded.
    pub top_k: Option<usize>,
    pub global_filter: bool,
    /// When false, `wall_time` is reported as zero so traces are reproducible.
    pub record_timing: bool,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            top_k: Some(DEFAULT_TOP_K),
            global_filter: true,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerTrace {
    pub layer: usize,
    /// Nodes judged at this layer.
    pub candidates: Vec<String>,
    pub selected: Vec<String>,
    /// Entries reached earlier that pass through without being judged again.
    pub carried: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalResult {
    pub selected_leaf_ids: BTreeSet<String>,
    pub layer_trace: Vec<LayerTrace>,
    /// Entries that reached the final filter.
    pub pre_filter_leaf_ids: Vec<String>,
    pub judged_node_count: usize,
    #[serde(rename = "wall_time_ms", serialize_with = "as_millis")]
    pub wall_time: Duration,
    pub warnings: Vec<String>,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl RetrievalResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }
}

/// Top-down traversal from the root, one judged layer at a time, then the
/// global filter over the entries that survive.
pub fn retrieve(
    q: &TaskQuery,
    tree: &DocTree,
    judge: &dyn RelevanceJudge,
    config: &RetrievalConfig,
) -> Result<RetrievalResult, RetrievalError> {
    if q.description.trim().is_empty() {
        return Err(RetrievalError::EmptyQuery);
    }
    let started = Instant::now();
    let mut frontier: Vec<String> = vec![tree.root_id().to_string()];
    let mut trace = Vec::new();
    let mut judged = 0;
    let mut warnings = Vec::new();
    for layer in 1..=tree.depth() {
        let carried: Vec<String> = frontier
            .iter()
            .filter(|id| tree.node(id).is_some_and(DocNode::is_leaf))
            .cloned()
            .collect();
        let internal: Vec<&str> = frontier
            .iter()
            .filter(|id| !carried.contains(id))
            .map(String::as_str)
            .collect();
        if internal.is_empty() {
            break;
        }
        let candidates = candidate_children(tree, &internal);
        judged += candidates.len();
        let (selected, warning) = select_relevant(q, &candidates, judge, config.top_k)?;
        warnings.extend(warning.map(|w| format!("layer {layer}: {w}")));
        trace.push(LayerTrace {
            layer,
            candidates: candidates.iter().map(|c| c.id.clone()).collect(),
            selected: selected.clone(),
            carried: carried.clone(),
        });
        frontier = selected;
        frontier.extend(carried);
    }
    let leaves: Vec<&DocNode> = frontier
        .iter()
        .filter_map(|id| tree.node(id))
        .filter(|n| n.is_leaf())
        .collect();
    let selected: BTreeSet<String> = if config.global_filter {
        judged += leaves.len();
        global_filter(q, &leaves, judge).into_iter().collect()
    } else {
        leaves.iter().map(|n| n.id.clone()).collect()
    };
    Ok(RetrievalResult {
        selected_leaf_ids: selected,
        layer_trace: trace,
        pre_filter_leaf_ids: leaves.iter().map(|n| n.id.clone()).collect(),
        judged_node_count: judged,
        wall_time: if config.record_timing {
            started.elapsed()
        } else {
            Duration::ZERO
        },
        warnings,
    })
}

/// Judge backed by a chat model using the relevance and filter prompts.
pub struct LlmJudge<'g> {
    pub gateway: &'g Gateway,
    /// Task id used for cost attribution.
    pub task_id: String,
}

impl<'g> LlmJudge<'g> {
    pub fn new(gateway: &'g Gateway, task_id: impl Into<String>) -> Self {
        Self {
            gateway,
            task_id: task_id.into(),
        }
    }
}

/// `{"key": "description", ...}` with keys in candidate order.
pub fn chapter_dict(candidates: &[&DocNode]) -> String {
    let lines: Vec<String> = candidates
        .iter()
        .map(|c| {
            let desc = format!("{}: {}", c.title, c.summary);
            format!(
                "  {}: {}",
                serde_json::to_string(&c.id).expect("string"),
                serde_json::to_string(&desc).expect("string")
            )
        })
        .collect();
    format!("{{\n{}\n}}", lines.join(",\n"))
}

/// The relevance prompt for one layer.
pub fn relevance_prompt(q: &TaskQuery, candidates: &[&DocNode], top_k: Option<usize>) -> String {
    let k = top_k.unwrap_or(candidates.len()).to_string();
    let unique = format!("up to {k} unique");
    prompts::render(
        prompts::RELEVANCE,
        &[
            ("query", &q.prompt_text()),
            ("chapter_dict", &chapter_dict(candidates)),
            ("unique", &unique),
            ("top_k", &k),
        ],
    )
}

/// The user message for the final filter of one entry.
pub fn filter_message(q: &TaskQuery, leaf: &DocNode) -> String {
    format!(
        "User Query:\n{}\n\nFunction documentation:\n{}",
        q.prompt_text(),
        leaf.full_text()
    )
}

impl RelevanceJudge for LlmJudge<'_> {
    fn select(
        &self,
        q: &TaskQuery,
        candidates: &[&DocNode],
        top_k: Option<usize>,
    ) -> Result<Vec<String>, JudgeError> {
        let req = ChatRequest::new(
            Purpose::Relevance,
            prompts::SYSTEM,
            relevance_prompt(q, candidates, top_k),
        )
        .for_task(&self.task_id);
        let resp = self.gateway.complete(&req)?;
        parse_string_list(&resp.text).map_err(|e| JudgeError::Unparseable(e.to_string()))
    }

    fn is_relevant(&self, q: &TaskQuery, leaf: &DocNode) -> Result<bool, JudgeError> {
        let req = ChatRequest::new(
            Purpose::GlobalFilter,
            prompts::GLOBAL_FILTER.trim_end(),
            filter_message(q, leaf),
        )
        .for_task(&self.task_id);
        Ok(parse_yes_no(&self.gateway.complete(&req)?.text))
    }
}

/// Words too common to signal relevance.
const STOPWORDS: &[&str] = &[
    "a",
    "an",
    "and",
    "are",
    "as",
    "at",
    "be",
    "by",
    "for",
    "from",
    "given",
    "graph",
    "graphs",
    "if",
    "in",
    "is",
    "it",
    "its",
    "of",
    "on",
    "or",
    "return",
    "returns",
    "the",
    "this",
    "to",
    "with",
    "that",
    "which",
    "node",
    "nodes",
    "edge",
    "edges",
    "networkx",
    "function",
    "functions",
    "whether",
    "all",
    "each",
    "type",
    "directed",
    "undirected",
    "weighted",
    "unweighted",
];

/// Content words of `text`.
pub fn keywords(text: &str) -> BTreeSet<String> {
    token_set(text)
        .into_iter()
        .filter(|t| !STOPWORDS.contains(&t.as_str()))
        .collect()
}

/// Rule-based judge: a node is relevant when its id, title or summary shares
/// a content word with the query.
#[derive(Debug, Clone, Default)]
pub struct KeywordJudge;

impl KeywordJudge {
    fn overlap(q: &TaskQuery, node: &DocNode) -> usize {
        let qk = keywords(&q.description);
        let nk = keywords(&format!("{} {} {}", node.id, node.title, node.summary));
        qk.intersection(&nk).count()
    }
}

impl RelevanceJudge for KeywordJudge {
    fn select(
        &self,
        q: &TaskQuery,
        candidates: &[&DocNode],
        _top_k: Option<usize>,
    ) -> Result<Vec<String>, JudgeError> {
        Ok(candidates
            .iter()
            .filter(|c| Self::overlap(q, c) > 0)
            .map(|c| c.id.clone())
            .collect())
    }

    fn is_relevant(&self, q: &TaskQuery, leaf: &DocNode) -> Result<bool, JudgeError> {
        Ok(Self::overlap(q, leaf) > 0)
    }
}

/// Judge that knows the answer: a node is relevant iff its subtree contains
/// a gold entry.
pub struct PerfectSubtreeJudge<'t> {
    pub tree: &'t DocTree,
    pub gold: BTreeSet<String>,
}

impl RelevanceJudge for PerfectSubtreeJudge<'_> {
    fn select(
        &self,
        _q: &TaskQuery,
        candidates: &[&DocNode],
        _top_k: Option<usize>,
    ) -> Result<Vec<String>, JudgeError> {
        Ok(candidates
            .iter()
            .filter(|c| {
                self.gold
                    .iter()
                    .any(|g| self.tree.is_ancestor_or_self(&c.id, g))
            })
            .map(|c| c.id.clone())
            .collect())
    }

    fn is_relevant(&self, _q: &TaskQuery, leaf: &DocNode) -> Result<bool, JudgeError> {
        Ok(self.gold.contains(&leaf.id))
    }
}

type SelectFn = dyn Fn(&[&DocNode]) -> Result<Vec<String>, JudgeError> + Send + Sync;
type FilterFn = dyn Fn(&DocNode) -> Result<bool, JudgeError> + Send + Sync;

/// Judge driven by closures, for tests and fixtures.
pub struct ScriptedJudge {
    select: Box<SelectFn>,
    filter: Box<FilterFn>,
}

impl ScriptedJudge {
    pub fn new(
        select: impl Fn(&[&DocNode]) -> Result<Vec<String>, JudgeError> + Send + Sync + 'static,
        filter: impl Fn(&DocNode) -> Result<bool, JudgeError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            select: Box::new(select),
            filter: Box::new(filter),
        }
    }

    /// Selects every candidate and says yes to every entry.
    pub fn accept_all() -> Self {
        Self::new(
            |c| Ok(c.iter().map(|n| n.id.clone()).collect()),
            |_| Ok(true),
        )
    }

    /// Selects nothing.
    pub fn reject_all() -> Self {
        Self::new(|_| Ok(Vec::new()), |_| Ok(false))
    }
}

impl RelevanceJudge for ScriptedJudge {
    fn select(
        &self,
        _q: &TaskQuery,
        candidates: &[&DocNode],
        _top_k: Option<usize>,
    ) -> Result<Vec<String>, JudgeError> {
        (self.select)(candidates)
    }

    fn is_relevant(&self, _q: &TaskQuery, leaf: &DocNode) -> Result<bool, JudgeError> {
        (self.filter)(leaf)
    }
}
