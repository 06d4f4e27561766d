//! `graphcode`: build documentation trees, generate labelled datasets, run
//! retrieval, solve datasets with the coding agent and score the results.
//!
//! Errors are printed to stderr as a JSON object; usage errors exit with 2,
//! runtime failures with 1.

mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use graphcode_agent::coding::{DebugConfig, DEFAULT_SUITE_SIZE, DEFAULT_T_MAX};
use graphcode_agent::doctree::DocTree;
use graphcode_agent::executor::{
    ExecStatus, Executor, SandboxLimits, StubExecutor, SubprocessExecutor, PYTHON_ENV, RUNNER_ENV,
};
use graphcode_agent::gateway::{Gateway, HttpBackend, Transcript};
use graphcode_agent::mock::MockBackend;
use graphcode_agent::pipeline::{
    evaluate, solve_dataset, PipelineConfig, Prediction, RetrievalMode, RetrievedDocs,
};
use graphcode_agent::retrieval::{retrieve, LlmJudge, RetrievalConfig, TaskQuery, DEFAULT_TOP_K};
use graphcode_agent::tfidf::TfIdfIndex;
use graphcode_core::answer::Tolerance;
use graphcode_core::dataset::{
    generate_dataset, read_jsonl, write_jsonl, DatasetRecord, GenerationConfig,
};
use graphcode_core::eval::{CostLedger, Price, RetrievalScores, UsageRecord};
use graphcode_core::tasks::{all_tasks, task_by_id};
use serde_json::json;
use tracing::info;
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(
    name = "graphcode",
    version,
    about = "Documentation-guided graph reasoning agent"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Turn a directory of markdown files into a documentation tree JSON.
    BuildDoctree(BuildDoctree),
    /// Generate a labelled benchmark dataset as JSON lines.
    GenDataset(GenDataset),
    /// Retrieve documentation for a query or a task.
    Retrieve(RetrieveCmd),
    /// Solve every task of a dataset and write predictions and traces.
    Solve(Solve),
    /// Score predictions against dataset labels.
    Evaluate(Evaluate),
}

#[derive(Debug, Args)]
struct BuildDoctree {
    /// Directory whose folders are chapters and files entries.
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Read further settings from a `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Small,
    Large,
}

#[derive(Debug, Args)]
struct GenDataset {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Small)]
    profile: ProfileArg,
    /// Instances per task.
    #[arg(long, default_value_t = 10)]
    instances: usize,
    /// Comma-separated task ids; every task when omitted.
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    /// Node-count buckets such as `4-18,20-60`, overriding the profile's.
    #[arg(long, value_delimiter = ',', value_parser = parse_bucket)]
    buckets: Vec<(usize, usize)>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GatewayArg {
    /// The HTTP chat endpoint named by LLM_API_BASE.
    Live,
    /// The built-in offline model.
    Mock,
    /// Answers from a recorded transcript only.
    Replay,
}

#[derive(Debug, Args)]
struct GatewayOpts {
    #[arg(long, value_enum, default_value_t = GatewayArg::Mock)]
    gateway: GatewayArg,
    #[arg(long, default_value = "mock")]
    model: String,
    /// Transcript to answer from in replay mode.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Write every model exchange to this transcript (live and mock modes).
    #[arg(long)]
    record: Option<PathBuf>,
    /// Per-request timeout of the live endpoint, in seconds.
    #[arg(long, default_value_t = 120)]
    request_timeout: u64,
}

#[derive(Debug, Args)]
struct RetrievalOpts {
    /// Per-layer cap on selected entries; 0 means unbounded.
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
    /// Skip the final per-entry relevance check.
    #[arg(long)]
    no_global_filter: bool,
}

impl RetrievalOpts {
    fn config(&self, record_timing: bool) -> RetrievalConfig {
        RetrievalConfig {
            top_k: (self.top_k > 0).then_some(self.top_k),
            global_filter: !self.no_global_filter,
            record_timing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Agentic,
    Tfidf,
    Off,
}

#[derive(Debug, Args)]
struct RetrieveCmd {
    /// Documentation tree JSON; the bundled NetworkX tree when omitted.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Free-text query.
    #[arg(long, conflicts_with = "task", required_unless_present = "task")]
    query: Option<String>,
    /// Use a task's description and score against its required documents.
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weighted: bool,
    #[arg(long, value_enum, default_value_t = MethodArg::Agentic)]
    method: MethodArg,
    /// Number of entries returned by the TF-IDF method.
    #[arg(long, default_value_t = 5)]
    tfidf_k: usize,
    #[command(flatten)]
    retrieval: RetrievalOpts,
    #[command(flatten)]
    gateway: GatewayOpts,
    /// Zero all wall-clock measurements.
    #[arg(long)]
    deterministic: bool,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExecutorArg {
    /// Run candidate programs in a Python subprocess via the runner shim.
    Python,
    /// Interpret stub directives in the program text without Python.
    Stub,
}

#[derive(Debug, Args)]
struct Solve {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Only solve these task ids.
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Agentic)]
    retrieval: MethodArg,
    #[arg(long, default_value_t = 5)]
    tfidf_k: usize,
    #[command(flatten)]
    retrieval_opts: RetrievalOpts,
    #[command(flatten)]
    gateway: GatewayOpts,
    /// Maximum refinements after the first draft.
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    t_max: usize,
    /// Test cases requested per task.
    #[arg(long, default_value_t = DEFAULT_SUITE_SIZE)]
    suite_size: usize,
    #[arg(long, value_enum, default_value_t = ExecutorArg::Python)]
    executor: ExecutorArg,
    /// Runner shim for the Python executor; defaults to $GRAPHCODE_RUNNER.
    #[arg(long)]
    runner: Option<PathBuf>,
    /// Interpreter for the Python executor; defaults to $GRAPHCODE_PYTHON or python3.
    #[arg(long)]
    python: Option<String>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Wall-clock limit per program run, in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout_secs: f64,
    /// Address-space limit per program run, in MiB; 0 means unlimited.
    #[arg(long, default_value_t = 2048)]
    memory_mb: u64,
    /// Unit prices as `model=prompt:completion` (per token).
    #[arg(long, value_parser = parse_price)]
    price: Vec<(String, Price)>,
    /// Zero all wall-clock measurements so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Evaluate {
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory of a `solve` run.
    #[arg(long, required_unless_present = "predictions")]
    run: Option<PathBuf>,
    /// Predictions JSON lines, overriding the run directory's.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Retrieved documents JSON lines, overriding the run directory's.
    #[arg(long)]
    retrieved: Option<PathBuf>,
    /// Model usage JSON lines, overriding the run directory's.
    #[arg(long)]
    usage: Option<PathBuf>,
    #[arg(long, value_parser = parse_price)]
    price: Vec<(String, Price)>,
    #[arg(long, default_value_t = Tolerance::default().abs)]
    abs_tol: f64,
    #[arg(long, default_value_t = Tolerance::default().rel)]
    rel_tol: f64,
    /// Write report.json and report.txt here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_bucket(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once('-')
        .ok_or_else(|| format!("bucket `{s}` is not `lo-hi`"))?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|e| format!("bucket `{s}`: {e}"))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|e| format!("bucket `{s}`: {e}"))?;
    Ok((lo, hi))
}

fn parse_price(s: &str) -> Result<(String, Price), String> {
    let (model, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("price `{s}` is not `model=prompt:completion`"))?;
    let (p, c) = rest
        .split_once(':')
        .ok_or_else(|| format!("price `{s}` is not `model=prompt:completion`"))?;
    let prompt = p.trim().parse().map_err(|e| format!("price `{s}`: {e}"))?;
    let completion = c.trim().parse().map_err(|e| format!("price `{s}`: {e}"))?;
    Ok((model.trim().to_string(), Price { prompt, completion }))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn jsonl<T: serde::Serialize>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|i| serde_json::to_string(&i).expect("serialisable") + "\n")
        .collect()
}

fn read_jsonl_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .with_context(|| format!("{} line {}", path.display(), i + 1))?,
        );
    }
    Ok(out)
}

fn load_dataset(path: &Path) -> Result<Vec<DatasetRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_jsonl(BufReader::new(file)).with_context(|| format!("reading dataset {}", path.display()))
}

fn load_corpus(path: Option<&Path>) -> Result<DocTree> {
    match path {
        Some(p) => DocTree::load(p).with_context(|| format!("loading corpus {}", p.display())),
        None => Ok(DocTree::bundled()),
    }
}

fn make_gateway(opts: &GatewayOpts) -> Result<Gateway> {
    let gateway = match opts.gateway {
        GatewayArg::Replay => {
            let path = opts
                .transcript
                .as_ref()
                .ok_or_else(|| anyhow!("--transcript is required with --gateway replay"))?;
            let file = File::open(path)
                .with_context(|| format!("opening transcript {}", path.display()))?;
            let entries = Transcript::read_jsonl(BufReader::new(file))?;
            Gateway::replaying(entries, &opts.model)
        }
        GatewayArg::Mock => Gateway::recording(Arc::new(MockBackend), &opts.model),
        GatewayArg::Live => {
            let backend = HttpBackend::from_env(Duration::from_secs(opts.request_timeout))?;
            Gateway::recording(Arc::new(backend), &opts.model)
        }
    };
    if opts.record.is_some() && opts.gateway == GatewayArg::Replay {
        bail!("--record cannot be combined with --gateway replay");
    }
    Ok(gateway)
}

fn save_transcript(opts: &GatewayOpts, gateway: &Gateway) -> Result<()> {
    if let Some(path) = &opts.record {
        let mut bytes = Vec::new();
        Transcript::write_jsonl(&gateway.transcript().entries, &mut bytes)?;
        write_file(path, bytes)?;
    }
    Ok(())
}

fn build_doctree(args: BuildDoctree) -> Result<()> {
    let tree = DocTree::build_from_directory(&args.source)
        .with_context(|| format!("building tree from {}", args.source.display()))?;
    write_file(&args.out, tree.to_json() + "\n")?;
    let summary = json!({
        "nodes": tree.len(),
        "leaves": tree.leaves().len(),
        "depth": tree.depth(),
        "out": args.out,
    });
    println!("{summary}");
    Ok(())
}

fn gen_dataset(args: GenDataset) -> Result<()> {
    let specs = if args.tasks.is_empty() {
        all_tasks().collect()
    } else {
        args.tasks
            .iter()
            .map(|t| task_by_id(t))
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut config = match args.profile {
        ProfileArg::Small => GenerationConfig::small(args.seed, args.instances),
        ProfileArg::Large => GenerationConfig::large(args.seed, args.instances),
    };
    if !args.buckets.is_empty() {
        config.size_buckets = args.buckets.clone();
    }
    let records = generate_dataset(&specs, &config)?;
    let mut bytes = Vec::new();
    write_jsonl(&records, &mut bytes)?;
    write_file(&args.out, bytes)?;
    let tasks: BTreeSet<&str> = records.iter().map(|r| r.task_id.as_str()).collect();
    println!(
        "{}",
        json!({ "records": records.len(), "tasks": tasks, "out": args.out })
    );
    Ok(())
}

fn retrieve_cmd(args: RetrieveCmd) -> Result<()> {
    let tree = load_corpus(args.corpus.as_deref())?;
    let (query, task_id, required) = match &args.task {
        Some(id) => {
            let spec = task_by_id(id)?;
            let q = TaskQuery::new(spec.description)
                .with_kind(spec.constraints.directed, spec.constraints.weighted);
            let required: BTreeSet<String> =
                spec.required_docs.iter().map(|s| s.to_string()).collect();
            (q, id.clone(), Some(required))
        }
        None => {
            let text = args.query.clone().unwrap_or_default();
            (
                TaskQuery::new(text).with_kind(args.directed, args.weighted),
                String::new(),
                None,
            )
        }
    };
    let gateway = make_gateway(&args.gateway)?;
    let (doc_ids, mut result) = match args.method {
        MethodArg::Agentic => {
            let judge = LlmJudge::new(&gateway, task_id.clone());
            let r = retrieve(
                &query,
                &tree,
                &judge,
                &args.retrieval.config(!args.deterministic),
            )?;
            let ids: Vec<String> = r.selected_leaf_ids.iter().cloned().collect();
            (ids, json!({ "method": "agentic", "trace": r }))
        }
        MethodArg::Tfidf => {
            let ranked = TfIdfIndex::from_tree(&tree).top_k(&query.prompt_text(), args.tfidf_k);
            let ids = ranked.iter().map(|(id, _)| id.clone()).collect();
            let scores: Vec<_> = ranked
                .iter()
                .map(|(id, s)| json!({ "id": id, "score": s }))
                .collect();
            (ids, json!({ "method": "tfidf", "ranking": scores }))
        }
        MethodArg::Off => (Vec::new(), json!({ "method": "off" })),
    };
    result["doc_ids"] = json!(doc_ids);
    if let Some(required) = required {
        let retrieved: BTreeSet<String> = doc_ids.into_iter().collect();
        result["task_id"] = json!(task_id);
        result["scores"] = json!(RetrievalScores::of(&retrieved, &required));
    }
    save_transcript(&args.gateway, &gateway)?;
    let text = serde_json::to_string_pretty(&result)? + "\n";
    match &args.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn make_executor(args: &Solve) -> Result<Box<dyn Executor>> {
    Ok(match args.executor {
        ExecutorArg::Stub => Box::new(StubExecutor),
        ExecutorArg::Python => {
            let runner = match &args.runner {
                Some(p) => p.clone(),
                None => std::env::var_os(RUNNER_ENV)
                    .map(PathBuf::from)
                    .ok_or_else(|| anyhow!("no runner shim: pass --runner or set {RUNNER_ENV}"))?,
            };
            let python = args
                .python
                .clone()
                .or_else(|| std::env::var(PYTHON_ENV).ok())
                .unwrap_or_else(|| "python3".to_string());
            Box::new(SubprocessExecutor::with_runner_file(
                &python,
                &runner,
                args.workers,
            )?)
        }
    })
}

fn solve(args: Solve, argv: &[OsString]) -> Result<()> {
    let mut records = load_dataset(&args.dataset)?;
    if !args.tasks.is_empty() {
        let keep: BTreeSet<&str> = args.tasks.iter().map(String::as_str).collect();
        records.retain(|r| keep.contains(r.task_id.as_str()));
    }
    let tree = load_corpus(args.corpus.as_deref())?;
    let gateway = make_gateway(&args.gateway)?;
    let executor = make_executor(&args)?;

    let limits = SandboxLimits {
        wall_time: Duration::from_secs_f64(args.timeout_secs.max(0.0)),
        memory_bytes: (args.memory_mb > 0).then_some(args.memory_mb << 20),
    };
    let mut config = PipelineConfig {
        mode: match args.retrieval {
            MethodArg::Agentic => RetrievalMode::Agentic,
            MethodArg::Tfidf => RetrievalMode::TfIdf { k: args.tfidf_k },
            MethodArg::Off => RetrievalMode::Off,
        },
        retrieval: args.retrieval_opts.config(true),
        debug: DebugConfig {
            t_max: args.t_max,
            suite_size: args.suite_size,
            limits,
            ..DebugConfig::default()
        },
        limits,
        prices: args.price.iter().cloned().collect(),
        ..PipelineConfig::default()
    };
    if args.deterministic {
        config = config.reproducible();
    }

    info!(records = records.len(), "solving");
    let output = solve_dataset(&records, &tree, &gateway, executor.as_ref(), &config)?;
    let ledger = output.ledger(&config.prices);

    let out = &args.out;
    write_file(
        &out.join("trace.json"),
        serde_json::to_string_pretty(&output)? + "\n",
    )?;
    write_file(&out.join("predictions.jsonl"), jsonl(output.predictions()))?;
    write_file(&out.join("retrieved.jsonl"), jsonl(output.retrieved()))?;
    write_file(&out.join("usage.jsonl"), jsonl(&ledger.usage))?;
    write_file(
        &out.join("wall_ms.json"),
        serde_json::to_string_pretty(&ledger.wall_ms)? + "\n",
    )?;
    save_transcript(&args.gateway, &gateway)?;

    let seeds: BTreeSet<u64> = records.iter().map(|r| r.meta.seed).collect();
    let tasks: BTreeSet<&str> = records.iter().map(|r| r.task_id.as_str()).collect();
    let manifest = json!({
        "tool": "graphcode",
        "version": env!("CARGO_PKG_VERSION"),
        "args": argv.iter().skip(1).map(|a| a.to_string_lossy()).collect::<Vec<_>>(),
        "dataset": { "path": args.dataset, "records": records.len(), "tasks": tasks, "instance_seeds": seeds },
        "model_id": args.gateway.model,
        "gateway": format!("{:?}", args.gateway.gateway).to_lowercase(),
        "executor": format!("{:?}", args.executor).to_lowercase(),
        "retrieval": config.mode,
        "top_k": config.retrieval.top_k,
        "global_filter": config.retrieval.global_filter,
        "t_max": config.debug.t_max,
        "suite_size": config.debug.suite_size,
        "feedback_cap": config.debug.feedback_cap,
        "max_test_nodes": config.debug.max_test_nodes,
        "limits": config.limits,
        "deterministic": args.deterministic,
        "prices": config.prices,
    });
    write_file(
        &out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;

    let correct = output
        .predictions()
        .filter(|p| p.status == ExecStatus::Success)
        .count();
    println!(
        "{}",
        json!({ "tasks": output.runs.len(), "instances": records.len(), "successful_runs": correct, "out": out })
    );
    Ok(())
}

fn evaluate_cmd(args: Evaluate) -> Result<()> {
    let records = load_dataset(&args.dataset)?;
    let from_run = |name: &str| args.run.as_ref().map(|d| d.join(name));
    let pred_path = args
        .predictions
        .clone()
        .or_else(|| from_run("predictions.jsonl"))
        .ok_or_else(|| anyhow!("pass --run or --predictions"))?;
    let predictions: Vec<Prediction> = read_jsonl_file(&pred_path)?;

    let optional = |explicit: &Option<PathBuf>, name: &str| -> Option<PathBuf> {
        explicit
            .clone()
            .or_else(|| from_run(name).filter(|p| p.exists()))
    };
    let retrieved: Option<Vec<RetrievedDocs>> = optional(&args.retrieved, "retrieved.jsonl")
        .map(|p| read_jsonl_file(&p))
        .transpose()?;
    let mut ledger = CostLedger {
        prices: args.price.iter().cloned().collect(),
        ..CostLedger::default()
    };
    if let Some(path) = optional(&args.usage, "usage.jsonl") {
        for u in read_jsonl_file::<UsageRecord>(&path)? {
            ledger.record(u);
        }
    }
    if let Some(path) = from_run("wall_ms.json").filter(|p| p.exists()) {
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let wall: BTreeMap<String, f64> = serde_json::from_str(&text)?;
        for (task, ms) in wall {
            ledger.add_wall_time(&task, ms);
        }
    }
    let tolerance = Tolerance {
        abs: args.abs_tol,
        rel: args.rel_tol,
    };
    let report = evaluate(
        &records,
        &predictions,
        retrieved.as_deref(),
        &ledger,
        tolerance,
    )?;
    let text = report.to_text();
    if let Some(dir) = &args.out {
        write_file(
            &dir.join("report.json"),
            serde_json::to_string_pretty(&report.to_json())? + "\n",
        )?;
        write_file(&dir.join("report.txt"), &text)?;
    }
    print!("{text}");
    Ok(())
}

fn run(cli: Cli, argv: &[OsString]) -> Result<()> {
    match cli.command {
        Cmd::BuildDoctree(a) => build_doctree(a),
        Cmd::GenDataset(a) => gen_dataset(a),
        Cmd::Retrieve(a) => retrieve_cmd(a),
        Cmd::Solve(a) => solve(a, argv),
        Cmd::Evaluate(a) => evaluate_cmd(a),
    }
}

fn error_json(kind: &str, err: &anyhow::Error) -> serde_json::Value {
    let causes: Vec<String> = err.chain().skip(1).map(|c| c.to_string()).collect();
    json!({ "error": { "kind": kind, "message": err.to_string(), "causes": causes } })
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();

    let cmd = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    let argv = match config::merge_config(&cmd, std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", error_json("config", &e));
            return ExitCode::from(2);
        }
    };
    let matches = match cmd.try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.render().to_string();
            let body = json!({ "error": { "kind": "usage", "message": message.trim_end() } });
            eprintln!("{body}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": { "kind": "usage", "message": e.to_string() } })
            );
            return ExitCode::from(2);
        }
    };
    match run(cli, &argv) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_json("runtime", &e));
            ExitCode::FAILURE
        }
    }
}
