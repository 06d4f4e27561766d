//! Thirty hand-labelled programs (ten passing, ten failing to run, ten
//! answering wrongly) and the instance each one is run on.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use graphcode_agent::coding::{classify_outcome, OutcomeClass};
use graphcode_agent::executor::{ExecutionRequest, Executor, SandboxLimits, SubprocessExecutor};
use graphcode_core::answer::Tolerance;
use graphcode_core::tasks::task_by_id;
use graphcode_core::GraphInstance;

pub struct Crafted {
    pub name: String,
    pub task: String,
    pub label: OutcomeClass,
    pub code: String,
}

pub fn programs() -> Vec<Crafted> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/taxonomy");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let code = fs::read_to_string(&path).unwrap();
            let header = |key: &str| {
                code.lines()
                    .find_map(|l| l.strip_prefix(&format!("# {key}: ")))
                    .unwrap_or_else(|| panic!("{} lacks `# {key}:`", path.display()))
                    .to_string()
            };
            let label = match header("label").as_str() {
                "pass" => OutcomeClass::Pass,
                "runtime_error" => OutcomeClass::RuntimeError,
                "logical_error" => OutcomeClass::LogicalError,
                other => panic!("unknown label {other}"),
            };
            Crafted {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                task: header("task"),
                label,
                code,
            }
        })
        .collect()
}

pub fn instance(task: &str) -> GraphInstance {
    match task {
        "sp" => GraphInstance::weighted_from(true, &[(0, 1, 2.5), (1, 2, 4.8), (0, 2, 8.0)])
            .with_arg("source", 0)
            .with_arg("target", 2),
        "cn" => GraphInstance::unweighted(false, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
            .with_arg("u", 0)
            .with_arg("v", 2),
        "gcc" | "ccc" => GraphInstance::unweighted(false, &[(0, 1), (1, 2), (3, 4)]),
        other => panic!("no instance for {other}"),
    }
}

/// Run every program and return (program, label, classified outcome).
pub fn classify_all() -> Vec<(Crafted, OutcomeClass)> {
    let runner = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/runner.py");
    let exec = SubprocessExecutor::with_runner_file("python3", &runner, 1)
        .expect("python3 and the fixture runner");
    let limits = SandboxLimits::small().with_wall_time(Duration::from_secs(3));
    programs()
        .into_iter()
        .map(|p| {
            let spec = task_by_id(&p.task).unwrap();
            let graph = instance(&p.task);
            let expected = spec.label(&graph).unwrap();
            let req = ExecutionRequest {
                code: p.code.clone(),
                graph,
                answer_tag: Some(spec.answer_tag),
                limits,
            };
            let outcome = exec.execute(&req).unwrap();
            let class = classify_outcome(&outcome, &expected, &Tolerance::default());
            (p, class)
        })
        .collect()
}
