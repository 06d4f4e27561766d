//! The full solve-and-score pipeline. For every task in a dataset the agent
//! retrieves documentation once, runs the self-debugging loop once, and
//! executes the selected program on all of the task's instances; the
//! predictions are then scored against the dataset labels.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use graphcode_core::answer::{AnswerValue, Tolerance};
use graphcode_core::dataset::DatasetRecord;
use graphcode_core::eval::{
    accuracy, cost_report, retrieval_report, CostLedger, EvalRecord, EvalReport, Price,
    RetrievalGold, UsageRecord,
};
use graphcode_core::tasks::{task_by_id, TaskError};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::info;

use crate::coding::{run_debug_loop, CodingError, CodingTask, DebugConfig, DebugSession};
use crate::doctree::{DocNode, DocTree};
use crate::executor::{ExecStatus, Executor, HostError, SandboxLimits};
use crate::gateway::Gateway;
use crate::retrieval::{
    retrieve, LlmJudge, RetrievalConfig, RetrievalError, RetrievalResult, TaskQuery,
};
use crate::tfidf::tfidf_baseline;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Host(#[from] HostError),
}

/// How documentation reaches the coding agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RetrievalMode {
    /// Layer-wise judged descent of the documentation tree.
    Agentic,
    /// The `k` entries most similar to the query by TF-IDF.
    TfIdf { k: usize },
    /// No documentation.
    Off,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub mode: RetrievalMode,
    pub retrieval: RetrievalConfig,
    pub debug: DebugConfig,
    /// Limits for running the selected program on benchmark instances.
    pub limits: SandboxLimits,
    /// Measure wall-clock time; off for reproducible outputs.
    pub record_timing: bool,
    pub tolerance: Tolerance,
    pub prices: BTreeMap<String, Price>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: RetrievalMode::Agentic,
            retrieval: RetrievalConfig::default(),
            debug: DebugConfig::default(),
            limits: SandboxLimits::small(),
            record_timing: true,
            tolerance: Tolerance::default(),
            prices: BTreeMap::new(),
        }
    }
}

impl PipelineConfig {
    /// Settings whose outputs depend only on the inputs.
    pub fn reproducible(mut self) -> Self {
        self.record_timing = false;
        self.retrieval.record_timing = false;
        self
    }
}

/// The answer given on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub task_id: String,
    pub instance_id: String,
    /// `null` when the program failed on the instance.
    pub predicted: AnswerValue,
    pub status: ExecStatus,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub error: String,
}

/// Documents retrieved for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedDocs {
    pub task_id: String,
    pub doc_ids: Vec<String>,
}

/// Everything produced while solving one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRun {
    pub task_id: String,
    pub query: String,
    /// Present in agentic mode.
    pub retrieval: Option<RetrievalResult>,
    pub doc_ids: Vec<String>,
    pub session: DebugSession,
    pub predictions: Vec<Prediction>,
    #[serde(skip)]
    pub usage: Vec<UsageRecord>,
    pub wall_ms: f64,
}

/// A solved dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutput {
    pub runs: Vec<TaskRun>,
}

impl SolveOutput {
    pub fn predictions(&self) -> impl Iterator<Item = &Prediction> {
        self.runs.iter().flat_map(|r| &r.predictions)
    }

    pub fn retrieved(&self) -> Vec<RetrievedDocs> {
        self.runs
            .iter()
            .map(|r| RetrievedDocs {
                task_id: r.task_id.clone(),
                doc_ids: r.doc_ids.clone(),
            })
            .collect()
    }

    pub fn ledger(&self, prices: &BTreeMap<String, Price>) -> CostLedger {
        let mut ledger = CostLedger {
            prices: prices.clone(),
            ..CostLedger::default()
        };
        for r in &self.runs {
            for u in &r.usage {
                ledger.record(u.clone());
            }
            ledger.add_wall_time(&r.task_id, r.wall_ms);
        }
        ledger
    }
}

/// Leaf ids to hand to the coding agent for `query`.
pub fn retrieve_docs(
    query: &TaskQuery,
    task_id: &str,
    tree: &DocTree,
    gateway: &Gateway,
    config: &PipelineConfig,
) -> Result<(Vec<String>, Option<RetrievalResult>), PipelineError> {
    Ok(match config.mode {
        RetrievalMode::Agentic => {
            let judge = LlmJudge {
                gateway,
                task_id: task_id.to_string(),
            };
            let result = retrieve(query, tree, &judge, &config.retrieval)?;
            (
                result.selected_leaf_ids.iter().cloned().collect(),
                Some(result),
            )
        }
        RetrievalMode::TfIdf { k } => (tfidf_baseline(&query.prompt_text(), tree, k), None),
        RetrievalMode::Off => (Vec::new(), None),
    })
}

/// Solve one task and answer each of its `records`.
pub fn solve_task(
    task_id: &str,
    records: &[&DatasetRecord],
    tree: &DocTree,
    gateway: &Gateway,
    executor: &dyn Executor,
    config: &PipelineConfig,
) -> Result<TaskRun, PipelineError> {
    let start = Instant::now();
    let spec = task_by_id(task_id)?;
    let query = TaskQuery::new(spec.description)
        .with_kind(spec.constraints.directed, spec.constraints.weighted);
    let (doc_ids, retrieval) = retrieve_docs(&query, task_id, tree, gateway, config)?;
    let docs: Vec<&DocNode> = doc_ids.iter().filter_map(|id| tree.node(id)).collect();
    let session = run_debug_loop(
        &CodingTask::from_spec(spec),
        &docs,
        gateway,
        executor,
        &config.debug,
    )?;
    let graphs: Vec<_> = records.iter().map(|r| r.graph()).collect();
    let outcomes = executor.execute_batch(
        &session.final_code().source,
        &graphs,
        Some(spec.answer_tag),
        config.limits,
    )?;
    let predictions = records
        .iter()
        .zip(outcomes)
        .map(|(rec, out)| Prediction {
            task_id: task_id.to_string(),
            instance_id: rec.id.clone(),
            predicted: match out.status {
                ExecStatus::Success => out.answer.unwrap_or(AnswerValue::Null),
                _ => AnswerValue::Null,
            },
            status: out.status,
            error: out.stderr_tail,
        })
        .collect();
    let wall_ms = if config.record_timing {
        start.elapsed().as_secs_f64() * 1000.0
    } else {
        0.0
    };
    info!(
        task = task_id,
        iterations = session.iterations.len(),
        "task solved"
    );
    Ok(TaskRun {
        task_id: task_id.to_string(),
        query: query.prompt_text(),
        retrieval,
        doc_ids,
        session,
        predictions,
        usage: gateway.take_usage(),
        wall_ms,
    })
}

/// Solve every task of `records`, in task-id order.
pub fn solve_dataset(
    records: &[DatasetRecord],
    tree: &DocTree,
    gateway: &Gateway,
    executor: &dyn Executor,
    config: &PipelineConfig,
) -> Result<SolveOutput, PipelineError> {
    let mut by_task: BTreeMap<&str, Vec<&DatasetRecord>> = BTreeMap::new();
    for r in records {
        by_task.entry(r.task_id.as_str()).or_default().push(r);
    }
    // usage left over from earlier calls is not this run's
    gateway.take_usage();
    let runs = by_task
        .into_iter()
        .map(|(task, recs)| solve_task(task, &recs, tree, gateway, executor, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolveOutput { runs })
}

/// Score predictions against the labels of `records`. Instances without a
/// prediction count as wrong; retrieval is scored against each task's
/// required documentation when `retrieved` is given.
pub fn evaluate(
    records: &[DatasetRecord],
    predictions: &[Prediction],
    retrieved: Option<&[RetrievedDocs]>,
    ledger: &CostLedger,
    tolerance: Tolerance,
) -> Result<EvalReport, PipelineError> {
    let by_id: BTreeMap<(&str, &str), &Prediction> = predictions
        .iter()
        .map(|p| ((p.task_id.as_str(), p.instance_id.as_str()), p))
        .collect();
    let evals: Vec<EvalRecord> = records
        .iter()
        .map(|r| {
            let predicted = by_id
                .get(&(r.task_id.as_str(), r.id.as_str()))
                .map_or(AnswerValue::Null, |p| p.predicted.clone());
            EvalRecord::new(&r.task_id, &r.id, predicted, r.label_value(), tolerance)
        })
        .collect();
    let declared: BTreeSet<&str> = records.iter().map(|r| r.task_id.as_str()).collect();
    let declared: Vec<&str> = declared.into_iter().collect();
    let retrieval = match retrieved {
        Some(docs) => {
            let mut gold = BTreeMap::new();
            for d in docs {
                let spec = task_by_id(&d.task_id)?;
                gold.insert(
                    d.task_id.clone(),
                    RetrievalGold {
                        required: spec.required_docs.iter().map(|s| s.to_string()).collect(),
                        retrieved: d.doc_ids.iter().cloned().collect(),
                    },
                );
            }
            Some(retrieval_report(&gold))
        }
        None => None,
    };
    Ok(EvalReport {
        accuracy: accuracy(&evals, &declared),
        retrieval,
        costs: cost_report(ledger),
    })
}
