//! The 30-instance mini-benchmark and its recorded model transcript.
//!
//! Set `GRAPHCODE_BLESS=1` to rewrite the shipped fixtures from the current
//! generator and mock model.

#![allow(dead_code)]

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::Arc;

use graphcode_agent::doctree::DocTree;
use graphcode_agent::executor::StubExecutor;
use graphcode_agent::gateway::{Gateway, Transcript, TranscriptEntry};
use graphcode_agent::mock::MockBackend;
use graphcode_agent::pipeline::{solve_dataset, PipelineConfig, SolveOutput};
use graphcode_core::dataset::{
    generate_dataset, read_jsonl, write_jsonl, DatasetRecord, GenerationConfig,
};
use graphcode_core::tasks::task_by_id;

pub const MODEL: &str = "mock";
pub const SEED: u64 = 7;
pub const TASKS: [&str; 10] = [
    "gcc",
    "sp",
    "mf",
    "mis",
    "cn",
    "cc",
    "clustering_shortest_path",
    "pair_tightness",
    "bridge_hub",
    "component_diameter",
];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/mini")
        .join(name)
}

pub fn corpus() -> DocTree {
    DocTree::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/corpus/networkx.json"))
        .unwrap()
}

pub fn blessing() -> bool {
    std::env::var_os("GRAPHCODE_BLESS").is_some()
}

pub fn generate() -> Vec<DatasetRecord> {
    let specs: Vec<_> = TASKS.iter().map(|t| task_by_id(t).unwrap()).collect();
    let mut config = GenerationConfig::small(SEED, 3);
    config.size_buckets = vec![(4, 18)];
    generate_dataset(&specs, &config).unwrap()
}

pub fn dataset_bytes(records: &[DatasetRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(records, &mut out).unwrap();
    out
}

pub fn shipped_dataset() -> Vec<DatasetRecord> {
    read_jsonl(BufReader::new(
        fs::File::open(fixture("dataset.jsonl")).unwrap(),
    ))
    .unwrap()
}

pub fn config() -> PipelineConfig {
    PipelineConfig::default().reproducible()
}

/// Solve with the mock model, recording every exchange.
pub fn record(records: &[DatasetRecord]) -> (SolveOutput, Vec<TranscriptEntry>) {
    let gw = Gateway::recording(Arc::new(MockBackend), MODEL);
    let out = solve_dataset(records, &corpus(), &gw, &StubExecutor, &config()).unwrap();
    (out, gw.transcript().entries)
}

pub fn transcript_bytes(entries: &[TranscriptEntry]) -> Vec<u8> {
    let mut out = Vec::new();
    Transcript::write_jsonl(entries, &mut out).unwrap();
    out
}

pub fn shipped_transcript() -> Vec<TranscriptEntry> {
    Transcript::read_jsonl(BufReader::new(
        fs::File::open(fixture("transcript.jsonl")).unwrap(),
    ))
    .unwrap()
}

/// Solve from the shipped transcript alone.
pub fn replay(records: &[DatasetRecord]) -> SolveOutput {
    let gw = Gateway::replaying(shipped_transcript(), MODEL);
    solve_dataset(records, &corpus(), &gw, &StubExecutor, &config()).unwrap()
}

/// Every artifact of a run, as the bytes that would be written to disk:
/// the solve trace, the predictions and the evaluation report.
pub fn artifacts(records: &[DatasetRecord], out: &SolveOutput) -> (String, String, String) {
    use graphcode_agent::pipeline::evaluate;
    let trace = serde_json::to_string_pretty(out).unwrap();
    let predictions: String = out
        .predictions()
        .map(|p| serde_json::to_string(p).unwrap() + "\n")
        .collect();
    let preds: Vec<_> = out.predictions().cloned().collect();
    let cfg = config();
    let report = evaluate(
        records,
        &preds,
        Some(&out.retrieved()),
        &out.ledger(&cfg.prices),
        cfg.tolerance,
    )
    .unwrap();
    (
        trace,
        predictions,
        serde_json::to_string_pretty(&report.to_json()).unwrap(),
    )
}
