//! Self-debugging code generation: the agent writes its own small labelled
//! test suite, drafts a program from the retrieved documentation, runs it on
//! the suite, and refines it from the failures until it passes or the
//! refinement budget runs out. The best-scoring draft is kept.

use graphcode_core::answer::{answers_equal, AnswerTag, AnswerValue, Tolerance};
use graphcode_core::eval::Purpose;
use graphcode_core::graph::{Edge, GraphKind};
use graphcode_core::tasks::{ArgKind, TaskSpec};
use graphcode_core::GraphInstance;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;
use tracing::{debug, warn};

use crate::doctree::DocNode;
use crate::executor::{ExecStatus, ExecutionOutcome, Executor, HostError, SandboxLimits};
use crate::gateway::{ChatRequest, Gateway, GatewayError};
use crate::parse::{extract_code_block, find_python_list};
use crate::prompts;

pub const DEFAULT_T_MAX: usize = 3;
pub const DEFAULT_SUITE_SIZE: usize = 3;
pub const DEFAULT_FEEDBACK_CAP: usize = 3;
pub const DEFAULT_MAX_TEST_NODES: usize = 6;

#[derive(Debug, Error)]
pub enum CodingError {
    #[error("no usable test cases in the model output")]
    NoUsableCases,
    #[error("the model response contains no code")]
    EmptyCode,
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Host(#[from] HostError),
}

/// What the coding agent is asked to solve.
#[derive(Debug, Clone, Serialize)]
pub struct CodingTask {
    pub task_id: String,
    pub description: String,
    pub kind: GraphKind,
    /// Argument names and kinds, in signature order.
    pub args: Vec<(String, ArgKind)>,
    pub args_description: String,
    pub nx_graph_class: String,
    pub answer_tag: Option<AnswerTag>,
    /// Reference task, used to correct test-case labels in benchmark mode.
    #[serde(skip)]
    pub reference: Option<&'static TaskSpec>,
}

impl CodingTask {
    pub fn from_spec(spec: &'static TaskSpec) -> Self {
        Self {
            task_id: spec.task_id.to_string(),
            description: spec.description.to_string(),
            kind: spec.graph_kind(),
            args: spec
                .args
                .iter()
                .map(|a| (a.name.to_string(), a.kind))
                .collect(),
            args_description: spec.args_description(),
            nx_graph_class: spec.nx_graph_class().to_string(),
            answer_tag: Some(spec.answer_tag),
            reference: Some(spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseOrigin {
    Llm,
    OracleVerified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCase {
    /// The graph with its arguments.
    pub graph: GraphInstance,
    pub expected: AnswerValue,
    pub origin: CaseOrigin,
}

impl TestCase {
    /// `[[u, v], ...]` as the program receives it.
    pub fn edge_list_text(&self) -> String {
        serde_json::to_string(&self.graph.edges).expect("edges serialise")
    }

    /// `name = value` pairs, comma separated.
    pub fn arguments_text(&self) -> String {
        if self.graph.args.is_empty() {
            return "No additional arguments".to_string();
        }
        self.graph
            .args
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn expected_text(&self) -> String {
        self.expected.to_json().to_string()
    }

    pub fn input_text(&self) -> String {
        format!(
            "edge_list = {}\n{}",
            self.edge_list_text(),
            self.arguments_text()
        )
    }
}

#[derive(Debug, Clone)]
pub struct DebugConfig {
    /// Maximum number of refinements after the first draft.
    pub t_max: usize,
    pub suite_size: usize,
    pub feedback_cap: usize,
    pub max_test_nodes: usize,
    /// Correct generated labels with the reference oracle when one exists.
    pub benchmark_mode: bool,
    pub limits: SandboxLimits,
    pub tolerance: Tolerance,
}

impl Default for DebugConfig {
    fn default() -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            suite_size: DEFAULT_SUITE_SIZE,
            feedback_cap: DEFAULT_FEEDBACK_CAP,
            max_test_nodes: DEFAULT_MAX_TEST_NODES,
            benchmark_mode: true,
            limits: SandboxLimits::small(),
            tolerance: Tolerance::default(),
        }
    }
}

/// The user message asking for test cases.
pub fn testgen_prompt(task: &CodingTask, config: &DebugConfig) -> String {
    let task_description = format!(
        "{}\nArguments: {}\nNumber of test cases: {}",
        task.description, task.args_description, config.suite_size
    );
    let edge = if task.kind.weighted {
        "[u, v, w]"
    } else {
        "[u, v]"
    };
    let graph_type = format!(
        "{} {} graph with at most {} nodes (integer ids), given as \"edge_list\": a list of {} edges; the other input keys are the arguments by name.",
        capitalise(task.kind.directed_text()),
        task.kind.weighted_text(),
        config.max_test_nodes,
        edge
    );
    prompts::render(
        prompts::TESTGEN,
        &[
            ("task_description", &task_description),
            ("graph_type_description", &graph_type),
        ],
    )
}

fn capitalise(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Interpret one `{"input": ..., "expected_output": ...}` entry.
fn parse_case(entry: &Value, task: &CodingTask, max_nodes: usize) -> Option<TestCase> {
    let obj = entry.as_object()?;
    let input = obj.get("input")?.as_object()?;
    let expected = obj.get("expected_output")?;
    let edges_json = ["edge_list", "edges", "graph"]
        .iter()
        .find_map(|k| input.get(*k))?
        .as_array()?;
    let mut edges = Vec::with_capacity(edges_json.len());
    for e in edges_json {
        let e = e.as_array()?;
        let u = e.first()?.as_i64()?;
        let v = e.get(1)?.as_i64()?;
        let edge = if task.kind.weighted {
            let w = e.get(2)?.as_f64()?;
            if !(w.is_finite() && w >= 0.0) {
                return None;
            }
            Edge::weighted(u, v, w)
        } else {
            Edge::new(u, v)
        };
        edges.push(edge);
    }
    if edges.is_empty() {
        return None;
    }
    let mut graph = GraphInstance::from_edges(task.kind, edges, []);
    if graph.node_count() > max_nodes {
        return None;
    }
    for (name, kind) in &task.args {
        let value = input.get(name)?;
        let n = value.as_i64()?;
        match kind {
            ArgKind::Node if !graph.nodes.contains(&n) => return None,
            ArgKind::Count if n < 1 => return None,
            _ => {}
        }
        graph = graph.with_arg(name, n);
    }
    let expected = AnswerValue::from_json(expected, task.answer_tag);
    Some(TestCase {
        graph,
        expected,
        origin: CaseOrigin::Llm,
    })
}

/// Parse a test-generation response. Malformed entries are dropped; in
/// benchmark mode labels are checked against the reference oracle and
/// replaced when wrong (cases the oracle cannot label are dropped).
pub fn parse_test_cases(
    text: &str,
    task: &CodingTask,
    config: &DebugConfig,
) -> Result<Vec<TestCase>, CodingError> {
    let list = find_python_list(text).map_err(|_| CodingError::NoUsableCases)?;
    let entries = list.as_array().cloned().unwrap_or_default();
    let mut cases = Vec::new();
    for entry in &entries {
        let Some(mut case) = parse_case(entry, task, config.max_test_nodes) else {
            debug!(task = %task.task_id, "dropping malformed test case");
            continue;
        };
        if config.benchmark_mode {
            if let Some(spec) = task.reference {
                match spec.label(&case.graph) {
                    Ok(label) => {
                        if !answers_equal(&case.expected, &label, &config.tolerance) {
                            debug!(task = %task.task_id, "correcting a generated label");
                        }
                        case.expected = label;
                        case.origin = CaseOrigin::OracleVerified;
                    }
                    Err(_) => continue,
                }
            }
        }
        cases.push(case);
    }
    if cases.is_empty() {
        return Err(CodingError::NoUsableCases);
    }
    Ok(cases)
}

pub fn generate_test_cases(
    task: &CodingTask,
    gateway: &Gateway,
    config: &DebugConfig,
) -> Result<Vec<TestCase>, CodingError> {
    let req = ChatRequest::new(
        Purpose::Testgen,
        prompts::SYSTEM,
        testgen_prompt(task, config),
    )
    .for_task(&task.task_id);
    let resp = gateway.complete(&req)?;
    parse_test_cases(&resp.text, task, config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateCode {
    pub source: String,
    pub iteration: usize,
}

/// Documentation section of the code-generation prompt.
pub fn docs_section(docs: &[&DocNode]) -> String {
    docs.iter()
        .map(|d| {
            let mut s = format!("### {}\n{}", d.title, d.summary);
            if let Some(b) = d.body.as_deref().filter(|b| !b.is_empty()) {
                s.push('\n');
                s.push_str(b);
            }
            s
        })
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// The program in a model response. Unfenced text counts as code only when
/// it defines a function; a prose-only answer is [`CodingError::EmptyCode`].
pub fn code_from_response(text: &str) -> Result<String, CodingError> {
    let code = extract_code_block(text).map_err(|_| CodingError::EmptyCode)?;
    if !text.contains("```") && !code.lines().any(|l| l.trim_start().starts_with("def ")) {
        return Err(CodingError::EmptyCode);
    }
    Ok(code)
}

pub fn codegen_prompt(task: &CodingTask, docs: &[&DocNode], example: Option<&TestCase>) -> String {
    let (edges, args, answer) = match example {
        Some(c) => (
            format!("edge_list = {}", c.edge_list_text()),
            c.arguments_text(),
            c.expected_text(),
        ),
        None => (
            "(no example available)".into(),
            String::new(),
            "(unknown)".into(),
        ),
    };
    prompts::render(
        prompts::CODEGEN,
        &[
            ("docs_section", &docs_section(docs)),
            ("question_text", &task.description),
            ("directed_text", task.kind.directed_text()),
            ("weighted_text", task.kind.weighted_text()),
            ("args_desc", &task.args_description),
            ("nx_graph_class", &task.nx_graph_class),
            ("Edge List", &edges),
            ("Arguments", &args),
            ("Answer", &answer),
        ],
    )
}

pub fn generate_code(
    task: &CodingTask,
    docs: &[&DocNode],
    example: Option<&TestCase>,
    gateway: &Gateway,
) -> Result<CandidateCode, CodingError> {
    let req = ChatRequest::new(
        Purpose::Codegen,
        prompts::SYSTEM,
        codegen_prompt(task, docs, example),
    )
    .for_task(&task.task_id);
    let source = code_from_response(&gateway.complete(&req)?.text)?;
    Ok(CandidateCode {
        source,
        iteration: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Pass,
    RuntimeError,
    LogicalError,
}

/// Pass when the run succeeded with the expected answer, logical error when
/// it succeeded with another answer (including `None`), runtime error when
/// it raised, crashed or timed out.
pub fn classify_outcome(
    outcome: &ExecutionOutcome,
    expected: &AnswerValue,
    tol: &Tolerance,
) -> OutcomeClass {
    match (outcome.status, &outcome.answer) {
        (ExecStatus::Success, Some(a)) if answers_equal(a, expected, tol) => OutcomeClass::Pass,
        (ExecStatus::Success, _) => OutcomeClass::LogicalError,
        (ExecStatus::RuntimeError | ExecStatus::Timeout, _) => OutcomeClass::RuntimeError,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseOutcome {
    pub case: usize,
    pub class: OutcomeClass,
    pub status: ExecStatus,
    pub answer: Option<AnswerValue>,
    pub expected: AnswerValue,
    pub error: String,
}

/// Fraction of cases passed, and the per-case outcomes.
pub fn score_candidate(
    code: &CandidateCode,
    suite: &[TestCase],
    task: &CodingTask,
    executor: &dyn Executor,
    config: &DebugConfig,
) -> Result<(f64, Vec<CaseOutcome>), HostError> {
    let graphs: Vec<GraphInstance> = suite.iter().map(|c| c.graph.clone()).collect();
    let runs = executor.execute_batch(&code.source, &graphs, task.answer_tag, config.limits)?;
    let outcomes: Vec<CaseOutcome> = runs
        .into_iter()
        .zip(suite)
        .enumerate()
        .map(|(i, (run, case))| CaseOutcome {
            case: i,
            class: classify_outcome(&run, &case.expected, &config.tolerance),
            status: run.status,
            answer: run.answer,
            expected: case.expected.clone(),
            error: run.stderr_tail,
        })
        .collect();
    Ok((accuracy_of(&outcomes, suite.len()), outcomes))
}

fn accuracy_of(outcomes: &[CaseOutcome], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    outcomes
        .iter()
        .filter(|o| o.class == OutcomeClass::Pass)
        .count() as f64
        / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackItem {
    pub case: usize,
    pub input: String,
    pub expected: String,
    /// The wrong answer, or the error text.
    pub actual: String,
    pub class: OutcomeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct FeedbackBundle {
    pub items: Vec<FeedbackItem>,
}

impl FeedbackBundle {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn render(&self) -> String {
        self.items
            .iter()
            .map(|f| {
                let label = match f.class {
                    OutcomeClass::RuntimeError => "Error",
                    _ => "Actual output",
                };
                format!(
                    "Input:\n{}\nExpected output: {}\n{label}: {}",
                    f.input, f.expected, f.actual
                )
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

/// The first `cap` failing cases.
pub fn build_feedback(outcomes: &[CaseOutcome], suite: &[TestCase], cap: usize) -> FeedbackBundle {
    FeedbackBundle {
        items: outcomes
            .iter()
            .filter(|o| o.class != OutcomeClass::Pass)
            .take(cap)
            .map(|o| FeedbackItem {
                case: o.case,
                input: suite[o.case].input_text(),
                expected: suite[o.case].expected_text(),
                actual: match o.class {
                    OutcomeClass::RuntimeError => o.error.clone(),
                    _ => o
                        .answer
                        .as_ref()
                        .map(|a| a.to_json().to_string())
                        .unwrap_or_else(|| "None".into()),
                },
                class: o.class,
            })
            .collect(),
    }
}

pub fn refine_prompt(
    task: &CodingTask,
    code: &str,
    feedback: &FeedbackBundle,
    suite: &[TestCase],
) -> String {
    let first = feedback
        .items
        .first()
        .map(|f| f.case)
        .and_then(|i| suite.get(i));
    let (input, answer) = match first {
        Some(c) => (c.input_text(), c.expected_text()),
        None => ("(none)".into(), "(unknown)".into()),
    };
    prompts::render(
        prompts::REFINE,
        &[
            ("original_query", &task.description),
            ("error_code", code),
            ("error_output", &feedback.render()),
            ("test_input_str", &input),
            ("Answer", &answer),
        ],
    )
}

pub fn refine_code(
    task: &CodingTask,
    code: &CandidateCode,
    feedback: &FeedbackBundle,
    suite: &[TestCase],
    gateway: &Gateway,
) -> Result<CandidateCode, CodingError> {
    let req = ChatRequest::new(
        Purpose::Refine,
        prompts::SYSTEM,
        refine_prompt(task, &code.source, feedback, suite),
    )
    .for_task(&task.task_id);
    let source = code_from_response(&gateway.complete(&req)?.text)?;
    Ok(CandidateCode {
        source,
        iteration: code.iteration + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    AllPassed,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iteration {
    pub code: CandidateCode,
    pub outcomes: Vec<CaseOutcome>,
    /// `None` when the suite is empty and nothing could be scored.
    pub acc_test: Option<f64>,
    /// Why the iteration produced no usable program, if it did not.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebugSession {
    pub task_id: String,
    pub query: String,
    pub doc_ids: Vec<String>,
    pub suite: Vec<TestCase>,
    pub iterations: Vec<Iteration>,
    /// Index into `iterations` of the selected program.
    pub final_iteration: usize,
    pub status: SessionStatus,
}

impl DebugSession {
    pub fn final_code(&self) -> &CandidateCode {
        &self.iterations[self.final_iteration].code
    }

    pub fn final_acc(&self) -> Option<f64> {
        self.iterations[self.final_iteration].acc_test
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session serialises")
    }
}

/// Index of the best-scoring iteration; the earliest wins ties.
pub fn select_best(iterations: &[Iteration]) -> usize {
    let mut best = 0;
    for (i, it) in iterations.iter().enumerate() {
        if it.acc_test.unwrap_or(-1.0) > iterations[best].acc_test.unwrap_or(-1.0) {
            best = i;
        }
    }
    best
}

fn scored_iteration(
    code: Result<CandidateCode, CodingError>,
    iteration: usize,
    suite: &[TestCase],
    task: &CodingTask,
    executor: &dyn Executor,
    config: &DebugConfig,
) -> Result<Iteration, CodingError> {
    match code {
        Ok(code) => {
            let (acc, outcomes) = score_candidate(&code, suite, task, executor, config)?;
            Ok(Iteration {
                code,
                outcomes,
                acc_test: Some(acc),
                note: None,
            })
        }
        Err(CodingError::EmptyCode) => {
            let outcomes = suite
                .iter()
                .enumerate()
                .map(|(i, c)| CaseOutcome {
                    case: i,
                    class: OutcomeClass::RuntimeError,
                    status: ExecStatus::RuntimeError,
                    answer: None,
                    expected: c.expected.clone(),
                    error: "the response contained no code".into(),
                })
                .collect();
            Ok(Iteration {
                code: CandidateCode {
                    source: String::new(),
                    iteration,
                },
                outcomes,
                acc_test: Some(0.0),
                note: Some("no code in the model response".into()),
            })
        }
        Err(e) => Err(e),
    }
}

/// Generate a suite, draft a program, and refine it while it fails and the
/// budget lasts. Returns the whole trace; the selected program is the one
/// with the highest suite accuracy.
pub fn run_debug_loop(
    task: &CodingTask,
    docs: &[&DocNode],
    gateway: &Gateway,
    executor: &dyn Executor,
    config: &DebugConfig,
) -> Result<DebugSession, CodingError> {
    let suite = match generate_test_cases(task, gateway, config) {
        Ok(s) => s,
        Err(CodingError::NoUsableCases) => {
            warn!(task = %task.task_id, "no usable test cases; returning the first draft unscored");
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    let doc_ids = docs.iter().map(|d| d.id.clone()).collect();
    let draft = generate_code(task, docs, suite.first(), gateway);
    if suite.is_empty() {
        let (code, note) = match draft {
            Ok(c) => (c, None),
            Err(CodingError::EmptyCode) => (
                CandidateCode {
                    source: String::new(),
                    iteration: 0,
                },
                Some("no code in the model response".to_string()),
            ),
            Err(e) => return Err(e),
        };
        return Ok(DebugSession {
            task_id: task.task_id.clone(),
            query: task.description.clone(),
            doc_ids,
            suite,
            iterations: vec![Iteration {
                code,
                outcomes: Vec::new(),
                acc_test: None,
                note,
            }],
            final_iteration: 0,
            status: SessionStatus::BudgetExhausted,
        });
    }

    let mut iterations = vec![scored_iteration(draft, 0, &suite, task, executor, config)?];
    // the latest program with text, which refinement starts from
    let mut base = iterations[0].code.clone();
    while iterations.last().and_then(|it| it.acc_test).unwrap_or(0.0) < 1.0
        && iterations.len() <= config.t_max
    {
        let last = iterations.last().expect("at least one iteration");
        let feedback = build_feedback(&last.outcomes, &suite, config.feedback_cap);
        let next = iterations.len();
        let mut from = base.clone();
        from.iteration = next - 1;
        let refined = refine_code(task, &from, &feedback, &suite, gateway);
        let it = scored_iteration(refined, next, &suite, task, executor, config)?;
        if !it.code.source.is_empty() {
            base = it.code.clone();
        }
        iterations.push(it);
    }
    let final_iteration = select_best(&iterations);
    let status = if iterations[final_iteration].acc_test == Some(1.0) {
        SessionStatus::AllPassed
    } else {
        SessionStatus::BudgetExhausted
    };
    Ok(DebugSession {
        task_id: task.task_id.clone(),
        query: task.description.clone(),
        doc_ids,
        suite,
        iterations,
        final_iteration,
        status,
    })
}
