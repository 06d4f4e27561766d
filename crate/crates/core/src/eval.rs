//! Benchmark metrics: task accuracy, retrieval precision/recall/F1 and a
//! per-task cost breakdown, with JSON and plain-text reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::answer::{answers_equal, AnswerValue, Tolerance};

/// One scored prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub task_id: String,
    pub instance_id: String,
    pub predicted: AnswerValue,
    pub label: AnswerValue,
    pub matched: bool,
}

impl EvalRecord {
    /// Builds a record, deciding `matched` with the given tolerance.
    pub fn new(
        task_id: impl Into<String>,
        instance_id: impl Into<String>,
        predicted: AnswerValue,
        label: AnswerValue,
        tol: Tolerance,
    ) -> Self {
        let matched = answers_equal(&predicted, &label, &tol);
        Self {
            task_id: task_id.into(),
            instance_id: instance_id.into(),
            predicted,
            label,
            matched,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskAccuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub per_task: BTreeMap<String, TaskAccuracy>,
    /// Mean of the per-task accuracies; `None` when no task has instances.
    pub macro_accuracy: Option<f64>,
    /// Fraction of all instances answered correctly.
    pub micro_accuracy: Option<f64>,
    /// Declared tasks left out because they have no instances.
    pub excluded: Vec<String>,
}

/// Per-task accuracy and its mean over tasks. Tasks listed in `declared`
/// without any record are excluded from the mean (with a warning).
pub fn accuracy<'a>(
    records: impl IntoIterator<Item = &'a EvalRecord>,
    declared: &[&str],
) -> AccuracyReport {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in records {
        let c = counts.entry(r.task_id.clone()).or_default();
        c.1 += 1;
        if r.matched {
            c.0 += 1;
        }
    }
    let excluded: Vec<String> = declared
        .iter()
        .filter(|t| !counts.contains_key(**t))
        .map(|t| t.to_string())
        .collect();
    for t in &excluded {
        warn!(task = %t, "task has no instances; excluded from accuracy");
    }
    let per_task: BTreeMap<String, TaskAccuracy> = counts
        .into_iter()
        .map(|(t, (correct, total))| {
            let accuracy = correct as f64 / total as f64;
            (
                t,
                TaskAccuracy {
                    correct,
                    total,
                    accuracy,
                },
            )
        })
        .collect();
    let macro_accuracy = (!per_task.is_empty())
        .then(|| per_task.values().map(|a| a.accuracy).sum::<f64>() / per_task.len() as f64);
    let total: usize = per_task.values().map(|a| a.total).sum();
    let micro_accuracy = (total > 0)
        .then(|| per_task.values().map(|a| a.correct).sum::<usize>() as f64 / total as f64);
    AccuracyReport {
        per_task,
        macro_accuracy,
        micro_accuracy,
        excluded,
    }
}

/// Share of required documents that were retrieved; 1 when nothing is required.
pub fn retrieval_recall(retrieved: &BTreeSet<String>, required: &BTreeSet<String>) -> f64 {
    if required.is_empty() {
        return 1.0;
    }
    retrieved.intersection(required).count() as f64 / required.len() as f64
}

/// Share of retrieved documents that are required; 0 when nothing was retrieved.
pub fn retrieval_precision(retrieved: &BTreeSet<String>, required: &BTreeSet<String>) -> f64 {
    if retrieved.is_empty() {
        return 0.0;
    }
    retrieved.intersection(required).count() as f64 / retrieved.len() as f64
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn retrieval_f1(retrieved: &BTreeSet<String>, required: &BTreeSet<String>) -> f64 {
    f1_from(
        retrieval_precision(retrieved, required),
        retrieval_recall(retrieved, required),
    )
}

fn f1_from(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RetrievalScores {
    pub fn of(retrieved: &BTreeSet<String>, required: &BTreeSet<String>) -> Self {
        let precision = retrieval_precision(retrieved, required);
        let recall = retrieval_recall(retrieved, required);
        Self {
            precision,
            recall,
            f1: f1_from(precision, recall),
        }
    }
}

/// Required and retrieved document ids for one task.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RetrievalGold {
    pub required: BTreeSet<String>,
    pub retrieved: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub per_task: BTreeMap<String, RetrievalScores>,
    /// Means over tasks.
    pub mean: Option<RetrievalScores>,
}

pub fn retrieval_report(gold: &BTreeMap<String, RetrievalGold>) -> RetrievalReport {
    let per_task: BTreeMap<String, RetrievalScores> = gold
        .iter()
        .map(|(t, g)| (t.clone(), RetrievalScores::of(&g.retrieved, &g.required)))
        .collect();
    let mean = (!per_task.is_empty()).then(|| {
        let n = per_task.len() as f64;
        RetrievalScores {
            precision: per_task.values().map(|s| s.precision).sum::<f64>() / n,
            recall: per_task.values().map(|s| s.recall).sum::<f64>() / n,
            f1: per_task.values().map(|s| s.f1).sum::<f64>() / n,
        }
    });
    RetrievalReport { per_task, mean }
}

/// Why a model call was made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Relevance,
    GlobalFilter,
    Testgen,
    Codegen,
    Refine,
}

impl Purpose {
    pub const ALL: [Purpose; 5] = [
        Purpose::Relevance,
        Purpose::GlobalFilter,
        Purpose::Testgen,
        Purpose::Codegen,
        Purpose::Refine,
    ];

    /// Relevance and filter calls belong to retrieval; the rest to coding.
    pub fn is_retrieval(self) -> bool {
        matches!(self, Purpose::Relevance | Purpose::GlobalFilter)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Purpose::Relevance => "relevance",
            Purpose::GlobalFilter => "global_filter",
            Purpose::Testgen => "testgen",
            Purpose::Codegen => "codegen",
            Purpose::Refine => "refine",
        }
    }
}

/// Per-token prices for one model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Price {
    pub prompt: f64,
    pub completion: f64,
}

/// One model call's usage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageRecord {
    pub task_id: String,
    pub purpose: Purpose,
    pub model_id: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub latency_ms: f64,
}

/// Token usage and wall time per task, with unit prices per model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub usage: Vec<UsageRecord>,
    /// Task wall-clock times in milliseconds.
    pub wall_ms: BTreeMap<String, f64>,
    pub prices: BTreeMap<String, Price>,
}

impl CostLedger {
    pub fn record(&mut self, usage: UsageRecord) {
        self.usage.push(usage);
    }

    pub fn add_wall_time(&mut self, task_id: &str, ms: f64) {
        *self.wall_ms.entry(task_id.to_string()).or_default() += ms;
    }

    pub fn merge(&mut self, other: CostLedger) {
        self.usage.extend(other.usage);
        for (t, ms) in other.wall_ms {
            *self.wall_ms.entry(t).or_default() += ms;
        }
        self.prices.extend(other.prices);
    }

    fn cost_of(&self, u: &UsageRecord) -> f64 {
        let price = self.prices.get(&u.model_id).copied().unwrap_or_default();
        price.prompt * u.prompt_tokens as f64 + price.completion * u.completion_tokens as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskCost {
    pub retrieval_cost: f64,
    pub coding_cost: f64,
    pub total_cost: f64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub calls: usize,
    /// Summed model latency in milliseconds.
    pub model_latency_ms: f64,
    pub wall_ms: f64,
    /// Cost per purpose tag; these sum to `total_cost`.
    pub by_purpose: BTreeMap<Purpose, f64>,
}

/// Per-task retrieval/coding/total cost.
pub fn cost_report(ledger: &CostLedger) -> BTreeMap<String, TaskCost> {
    let mut out: BTreeMap<String, TaskCost> = BTreeMap::new();
    for u in &ledger.usage {
        let cost = ledger.cost_of(u);
        let entry = out.entry(u.task_id.clone()).or_default();
        if u.purpose.is_retrieval() {
            entry.retrieval_cost += cost;
        } else {
            entry.coding_cost += cost;
        }
        entry.total_cost += cost;
        entry.prompt_tokens += u.prompt_tokens;
        entry.completion_tokens += u.completion_tokens;
        entry.calls += 1;
        entry.model_latency_ms += u.latency_ms;
        *entry.by_purpose.entry(u.purpose).or_default() += cost;
    }
    for (t, ms) in &ledger.wall_ms {
        out.entry(t.clone()).or_default().wall_ms = *ms;
    }
    out
}

/// All metrics of one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: AccuracyReport,
    pub retrieval: Option<RetrievalReport>,
    pub costs: BTreeMap<String, TaskCost>,
}

impl EvalReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report is serialisable")
    }

    /// Plain-text table, one row per task.
    pub fn to_text(&self) -> String {
        let mut tasks: BTreeSet<&String> = self.accuracy.per_task.keys().collect();
        if let Some(r) = &self.retrieval {
            tasks.extend(r.per_task.keys());
        }
        tasks.extend(self.costs.keys());
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<26} {:>9} {:>8} {:>7} {:>7} {:>7} {:>12} {:>12} {:>12}",
            "task", "acc", "n", "P", "R", "F1", "retr_cost", "code_cost", "total_cost"
        );
        for t in tasks {
            let acc = self.accuracy.per_task.get(t);
            let ret = self.retrieval.as_ref().and_then(|r| r.per_task.get(t));
            let cost = self.costs.get(t).cloned().unwrap_or_default();
            let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(
                s,
                "{:<26} {:>9} {:>8} {:>7} {:>7} {:>7} {:>12.6} {:>12.6} {:>12.6}",
                t,
                fmt(acc.map(|a| a.accuracy)),
                acc.map_or("-".to_string(), |a| a.total.to_string()),
                fmt(ret.map(|r| r.precision)),
                fmt(ret.map(|r| r.recall)),
                fmt(ret.map(|r| r.f1)),
                cost.retrieval_cost,
                cost.coding_cost,
                cost.total_cost,
            );
        }
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(s, "macro accuracy: {}", fmt(self.accuracy.macro_accuracy));
        let _ = writeln!(s, "micro accuracy: {}", fmt(self.accuracy.micro_accuracy));
        if let Some(mean) = self.retrieval.as_ref().and_then(|r| r.mean) {
            let _ = writeln!(
                s,
                "mean retrieval: P={:.4} R={:.4} F1={:.4}",
                mean.precision, mean.recall, mean.f1
            );
        }
        if !self.accuracy.excluded.is_empty() {
            let _ = writeln!(
                s,
                "excluded (no instances): {}",
                self.accuracy.excluded.join(", ")
            );
        }
        s
    }
}
