//! Executor ↔ runner protocol against the fixture shim and a real interpreter.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Duration;

use graphcode_agent::executor::{
    ExecStatus, ExecutionRequest, Executor, HostError, SandboxLimits, SubprocessExecutor, SENTINEL,
};
use graphcode_core::answer::{AnswerTag, AnswerValue};
use graphcode_core::GraphInstance;

fn runner_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/runner.py")
}

fn executor() -> SubprocessExecutor {
    SubprocessExecutor::with_runner_file("python3", &runner_path(), 3)
        .expect("python3 and the fixture runner")
}

fn sp_fixture() -> GraphInstance {
    GraphInstance::weighted_from(true, &[(0, 1, 2.5), (1, 2, 4.8), (0, 2, 8.0)])
        .with_arg("source", 0)
        .with_arg("target", 2)
}

const SP_CODE: &str = r#"
import networkx as nx

def shortest_path_length(edge_list, source, target):
    try:
        G = nx.DiGraph()
        G.add_weighted_edges_from(edge_list)
        return nx.shortest_path_length(G, source, target, weight="weight")
    except Exception:
        return None
"#;

/// Run the shim by hand and return its raw stdout.
fn raw_run(code: &str, stdin: &str) -> String {
    let shim = std::fs::read_to_string(runner_path()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("c.py");
    std::fs::write(&script, format!("{code}\n{shim}")).unwrap();
    let mut child = Command::new("python3")
        .arg(&script)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn known_correct_program_emits_exact_result_line() {
    let payload = ExecutionRequest::new(SP_CODE, sp_fixture())
        .payload()
        .to_string();
    let out = raw_run(SP_CODE, &payload);
    assert_eq!(out, "##RESULT## {\"status\":\"ok\",\"answer\":7.3}\n");
}

#[test]
fn exceptions_and_bad_input_become_error_responses() {
    let out = raw_run(
        "def f(edges):\n    return 1 / 0\n",
        "{\"edges\": [], \"args\": {}}",
    );
    let line = out.strip_prefix(SENTINEL).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["status"], "error");
    assert!(v["error"].as_str().unwrap().contains("ZeroDivisionError"));

    let out = raw_run("def f(edges):\n    return 1\n", "{not json");
    let v: serde_json::Value =
        serde_json::from_str(out.strip_prefix(SENTINEL).unwrap().trim()).unwrap();
    assert_eq!(v["status"], "error");
    assert!(v["error"].as_str().unwrap().starts_with("bad request"));
}

#[test]
fn noisy_candidate_still_yields_one_result_line() {
    let code = "print('top level noise')\nimport sys\n\ndef f(edges):\n    print('inside', edges)\n    sys.stdout.write('##RESULT## fake\\n')\n    return {3, 1, 2}\n\nprint('more noise', len([1, 2]))\n";
    let out = raw_run(code, "{\"edges\": [[0, 1]], \"args\": {}}");
    let results: Vec<&str> = out.lines().filter(|l| l.starts_with(SENTINEL)).collect();
    assert_eq!(results.len(), 1, "{out}");
    assert_eq!(
        out.lines().last().unwrap(),
        "##RESULT## {\"status\":\"ok\",\"answer\":[1,2,3]}"
    );
}

#[test]
fn answers_are_canonicalised() {
    let code = "def f(edges):\n    return ((1, 2), frozenset({5, 4}), None, {'b': 1.5, 'a': 2})\n";
    let out = raw_run(code, "{\"edges\": [], \"args\": {}}");
    assert_eq!(
        out.trim_end(),
        "##RESULT## {\"status\":\"ok\",\"answer\":[[1,2],[4,5],null,{\"a\":2,\"b\":1.5}]}"
    );
}

#[test]
fn executor_runs_the_fixture_program() {
    let mut req = ExecutionRequest::new(SP_CODE, sp_fixture());
    req.answer_tag = Some(AnswerTag::Real);
    let out = executor().execute(&req).unwrap();
    assert_eq!(out.status, ExecStatus::Success, "{}", out.stderr_tail);
    assert_eq!(out.answer, Some(AnswerValue::Real(7.3)));
}

#[test]
fn raising_program_is_a_runtime_error_with_traceback() {
    let req = ExecutionRequest::new(
        "def f(edges, source, target):\n    raise KeyError('boom')\n",
        sp_fixture(),
    );
    let out = executor().execute(&req).unwrap();
    assert_eq!(out.status, ExecStatus::RuntimeError);
    assert!(out.answer.is_none());
    assert!(out.stderr_tail.contains("KeyError"), "{}", out.stderr_tail);

    let broken = ExecutionRequest::new("def f(edges:\n    pass\n", sp_fixture());
    let out = executor().execute(&broken).unwrap();
    assert_eq!(out.status, ExecStatus::RuntimeError);
    assert!(
        out.stderr_tail.contains("SyntaxError"),
        "{}",
        out.stderr_tail
    );
}

#[test]
fn hanging_program_times_out_near_the_limit() {
    let mut req = ExecutionRequest::new(
        "def f(edges, **kw):\n    while True:\n        pass\n",
        sp_fixture(),
    );
    req.limits = SandboxLimits::small().with_wall_time(Duration::from_secs(1));
    let out = executor().execute(&req).unwrap();
    assert_eq!(out.status, ExecStatus::Timeout);
    assert!(out.answer.is_none());
    assert!(
        out.duration >= Duration::from_secs(1) && out.duration < Duration::from_secs(3),
        "{:?}",
        out.duration
    );
}

#[test]
fn memory_cap_turns_huge_allocations_into_errors() {
    let mut req = ExecutionRequest::new(
        "def f(edges, **kw):\n    x = bytearray(1 << 33)\n    return len(x)\n",
        sp_fixture(),
    );
    req.limits.memory_bytes = Some(512 << 20);
    let out = executor().execute(&req).unwrap();
    assert_eq!(out.status, ExecStatus::RuntimeError);
    assert!(
        out.stderr_tail.contains("MemoryError"),
        "{}",
        out.stderr_tail
    );
}

#[test]
fn batch_preserves_order_and_isolates_failures() {
    let code = r#"
import networkx as nx

def solve(edge_list, source, target):
    try:
        G = nx.DiGraph()
        G.add_weighted_edges_from(edge_list)
        if source == 99:
            while True:
                pass
        if source == 98:
            import os
            os._exit(3)
        return nx.shortest_path_length(G, source, target, weight="weight")
    except nx.NetworkXNoPath:
        return None
"#;
    let g = sp_fixture();
    let instances = vec![
        g.clone(),
        g.clone().with_arg("source", 2).with_arg("target", 0),
        g.clone().with_arg("source", 99),
        g.clone().with_arg("source", 98),
        g.clone().with_arg("source", 1),
    ];
    let limits = SandboxLimits::small().with_wall_time(Duration::from_secs(2));
    let out = executor()
        .execute_batch(code, &instances, Some(AnswerTag::Real), limits)
        .unwrap();
    let statuses: Vec<ExecStatus> = out.iter().map(|o| o.status).collect();
    assert_eq!(
        statuses,
        [
            ExecStatus::Success,
            ExecStatus::Success,
            ExecStatus::Timeout,
            ExecStatus::RuntimeError,
            ExecStatus::Success
        ]
    );
    assert_eq!(out[0].answer, Some(AnswerValue::Real(7.3)));
    assert_eq!(out[1].answer, Some(AnswerValue::Null));
    assert_eq!(out[4].answer, Some(AnswerValue::Real(4.8)));

    assert!(executor()
        .execute_batch(code, &[], None, limits)
        .unwrap()
        .is_empty());
    let again = executor()
        .execute_batch(code, &instances[..1], Some(AnswerTag::Real), limits)
        .unwrap();
    assert_eq!(again[0].answer, out[0].answer);
}

#[test]
fn missing_interpreter_is_a_host_error() {
    let err = SubprocessExecutor::new("definitely-not-a-python", String::new(), 1)
        .err()
        .unwrap();
    assert!(matches!(err, HostError::InterpreterMissing(_)));
    let err = SubprocessExecutor::with_runner_file(
        "python3",
        std::path::Path::new("/nonexistent/runner.py"),
        1,
    )
    .err()
    .unwrap();
    assert!(matches!(err, HostError::RunnerMissing(_)));
}
