//! Running candidate programs against graph instances.
//!
//! [`SubprocessExecutor`] writes the candidate followed by the runner shim to
//! a script, starts the interpreter in its own process group with an address
//! space cap and an empty environment, sends the instance as one JSON object
//! on stdin, and reads back the single `##RESULT## ` line. This is best-effort
//! containment for well-meaning code, not a security boundary.
//!
//! [`StubExecutor`] never starts a process: it obeys `# stub:` directives in
//! the program text, which keeps the agent loop testable and reproducible
//! without an interpreter.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use graphcode_core::answer::{AnswerTag, AnswerValue};
use graphcode_core::tasks::task_by_id;
use graphcode_core::GraphInstance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use tracing::debug;
use wait_timeout::ChildExt;

/// Prefix of the one protocol line a runner writes to stdout.
pub const SENTINEL: &str = "##RESULT## ";
/// Path of the runner shim source.
pub const RUNNER_ENV: &str = "GRAPHCODE_RUNNER";
/// Interpreter override; defaults to `python3` on `PATH`.
pub const PYTHON_ENV: &str = "GRAPHCODE_PYTHON";
const STDERR_TAIL: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandboxLimits {
    #[serde(with = "secs")]
    pub wall_time: Duration,
    /// Address-space cap in bytes; `None` leaves it unlimited.
    pub memory_bytes: Option<u64>,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?.max(0.0)))
    }
}

impl SandboxLimits {
    /// 60 s and 2 GiB, for small-scale instances.
    pub fn small() -> Self {
        Self {
            wall_time: Duration::from_secs(60),
            memory_bytes: Some(2 << 30),
        }
    }

    /// 300 s and 4 GiB, for large-scale instances.
    pub fn large() -> Self {
        Self {
            wall_time: Duration::from_secs(300),
            memory_bytes: Some(4 << 30),
        }
    }

    pub fn with_wall_time(mut self, d: Duration) -> Self {
        self.wall_time = d;
        self
    }
}

impl Default for SandboxLimits {
    fn default() -> Self {
        Self::small()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionRequest {
    pub code: String,
    /// Edges, direction/weight flags and arguments.
    pub graph: GraphInstance,
    /// Shape the answer is coerced to, when known.
    pub answer_tag: Option<AnswerTag>,
    pub limits: SandboxLimits,
}

impl ExecutionRequest {
    pub fn new(code: impl Into<String>, graph: GraphInstance) -> Self {
        Self {
            code: code.into(),
            graph,
            answer_tag: None,
            limits: SandboxLimits::default(),
        }
    }

    /// The JSON object sent to the runner on stdin.
    pub fn payload(&self) -> Value {
        serde_json::json!({
            "edges": self.graph.edges,
            "directed": self.graph.directed,
            "weighted": self.graph.weighted,
            "args": self.graph.args,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecStatus {
    Success,
    RuntimeError,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionOutcome {
    pub status: ExecStatus,
    /// Present exactly when `status` is `Success`; a program that returns
    /// `None` yields `Some(Null)`.
    pub answer: Option<AnswerValue>,
    /// Error text: the runner's traceback or the tail of the process stderr.
    pub stderr_tail: String,
    #[serde(rename = "duration_ms", serialize_with = "as_millis")]
    pub duration: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl ExecutionOutcome {
    pub fn success(answer: AnswerValue, duration: Duration) -> Self {
        Self {
            status: ExecStatus::Success,
            answer: Some(answer),
            stderr_tail: String::new(),
            duration,
        }
    }

    pub fn runtime_error(text: impl Into<String>, duration: Duration) -> Self {
        Self {
            status: ExecStatus::RuntimeError,
            answer: None,
            stderr_tail: tail(&text.into(), STDERR_TAIL),
            duration,
        }
    }

    pub fn timeout(duration: Duration) -> Self {
        Self {
            status: ExecStatus::Timeout,
            answer: None,
            stderr_tail: format!("timed out after {:.1}s", duration.as_secs_f64()),
            duration,
        }
    }
}

/// Failures of the host, as opposed to failures of the candidate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HostError {
    #[error("interpreter not found: {0}")]
    InterpreterMissing(String),
    #[error("runner shim unavailable: {0}")]
    RunnerMissing(String),
    #[error("could not start the program: {0}")]
    Spawn(String),
}

/// Runs candidate programs.
pub trait Executor: Send + Sync {
    fn execute(&self, req: &ExecutionRequest) -> Result<ExecutionOutcome, HostError>;

    /// One outcome per instance, in order; a failing instance never affects
    /// the others.
    fn execute_batch(
        &self,
        code: &str,
        instances: &[GraphInstance],
        answer_tag: Option<AnswerTag>,
        limits: SandboxLimits,
    ) -> Result<Vec<ExecutionOutcome>, HostError> {
        instances
            .iter()
            .map(|g| {
                self.execute(&ExecutionRequest {
                    code: code.to_string(),
                    graph: g.clone(),
                    answer_tag,
                    limits,
                })
            })
            .collect()
    }
}

/// Last `max` bytes of `s`, cut at a character boundary.
fn tail(s: &str, max: usize) -> String {
    if s.len() <= max {
        return s.to_string();
    }
    let mut start = s.len() - max;
    while !s.is_char_boundary(start) {
        start += 1;
    }
    s[start..].to_string()
}

/// Interpret the runner's stdout: the last sentinel line carries the response.
pub fn parse_runner_output(
    stdout: &str,
    answer_tag: Option<AnswerTag>,
) -> Result<AnswerValue, String> {
    let line = stdout
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix(SENTINEL))
        .ok_or_else(|| "runner produced no result line".to_string())?;
    let resp: Value =
        serde_json::from_str(line).map_err(|e| format!("malformed result line: {e}"))?;
    match resp["status"].as_str() {
        Some("ok") => Ok(AnswerValue::from_json(&resp["answer"], answer_tag)),
        Some("error") => {
            let mut msg = resp["error"]
                .as_str()
                .unwrap_or("unknown error")
                .to_string();
            if let Some(entry) = resp.get("entry") {
                match entry.as_str() {
                    Some(name) => msg.push_str(&format!("\n(entry function: {name})")),
                    None => msg.push_str("\n(no entry function detected)"),
                }
            }
            Err(msg)
        }
        _ => Err(format!("unexpected runner response: {line}")),
    }
}

fn find_on_path(program: &str) -> Option<PathBuf> {
    if program.contains('/') {
        let p = PathBuf::from(program);
        return p.is_file().then_some(p);
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join(program))
        .find(|p| p.is_file())
}

/// Executes candidates in interpreter subprocesses.
pub struct SubprocessExecutor {
    interpreter: PathBuf,
    runner: String,
    pool: rayon::ThreadPool,
}

impl SubprocessExecutor {
    /// `interpreter` is a program name or path; `runner_source` is the shim
    /// appended after every candidate; batches use up to `workers` processes.
    pub fn new(
        interpreter: &str,
        runner_source: String,
        workers: usize,
    ) -> Result<Self, HostError> {
        let interpreter = find_on_path(interpreter)
            .ok_or_else(|| HostError::InterpreterMissing(interpreter.to_string()))?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| HostError::Spawn(e.to_string()))?;
        Ok(Self {
            interpreter,
            runner: runner_source,
            pool,
        })
    }

    /// Interpreter from `GRAPHCODE_PYTHON` (default `python3`), shim from the
    /// file named by `GRAPHCODE_RUNNER`.
    pub fn from_env(workers: usize) -> Result<Self, HostError> {
        let runner_path = std::env::var(RUNNER_ENV)
            .map_err(|_| HostError::RunnerMissing(format!("{RUNNER_ENV} is not set")))?;
        let python = std::env::var(PYTHON_ENV).unwrap_or_else(|_| "python3".to_string());
        Self::with_runner_file(&python, Path::new(&runner_path), workers)
    }

    pub fn with_runner_file(
        interpreter: &str,
        runner: &Path,
        workers: usize,
    ) -> Result<Self, HostError> {
        let source = std::fs::read_to_string(runner)
            .map_err(|e| HostError::RunnerMissing(format!("{}: {e}", runner.display())))?;
        Self::new(interpreter, source, workers)
    }

    fn spawn(&self, script: &Path, limits: &SandboxLimits) -> std::io::Result<std::process::Child> {
        let mut cmd = Command::new(&self.interpreter);
        cmd.arg("-I")
            .arg(script)
            .env_clear()
            .env("PATH", "/usr/local/bin:/usr/bin:/bin")
            .env("PYTHONHASHSEED", "0")
            .env("PYTHONDONTWRITEBYTECODE", "1")
            .env("PYTHONIOENCODING", "utf-8")
            .env("OMP_NUM_THREADS", "1")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        let memory = limits.memory_bytes;
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            // SAFETY: only async-signal-safe libc calls between fork and exec.
            unsafe {
                cmd.pre_exec(move || {
                    if libc::setsid() < 0 {
                        return Err(std::io::Error::last_os_error());
                    }
                    let no_core = libc::rlimit {
                        rlim_cur: 0,
                        rlim_max: 0,
                    };
                    libc::setrlimit(libc::RLIMIT_CORE, &no_core);
                    if let Some(bytes) = memory {
                        let cap = libc::rlimit {
                            rlim_cur: bytes as libc::rlim_t,
                            rlim_max: bytes as libc::rlim_t,
                        };
                        if libc::setrlimit(libc::RLIMIT_AS, &cap) != 0 {
                            return Err(std::io::Error::last_os_error());
                        }
                    }
                    Ok(())
                });
            }
        }
        cmd.spawn()
    }

    fn run(&self, req: &ExecutionRequest) -> Result<ExecutionOutcome, HostError> {
        let mut script = tempfile::Builder::new()
            .prefix("candidate-")
            .suffix(".py")
            .tempfile()
            .map_err(|e| HostError::Spawn(e.to_string()))?;
        script
            .write_all(format!("{}\n{}", req.code, self.runner).as_bytes())
            .and_then(|_| script.flush())
            .map_err(|e| HostError::Spawn(e.to_string()))?;
        let payload = serde_json::to_vec(&req.payload()).expect("payload serialises");

        let started = Instant::now();
        let mut child = match self.spawn(script.path(), &req.limits) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(HostError::InterpreterMissing(
                    self.interpreter.display().to_string(),
                ))
            }
            Err(e) => return Err(HostError::Spawn(e.to_string())),
        };
        let pid = child.id();
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || {
            // the program may exit without reading; a broken pipe is fine
            let _ = stdin.write_all(&payload);
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let mut stderr = child.stderr.take().expect("piped stderr");
        let out_reader = std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stdout.read_to_end(&mut buf);
            buf
        });
        let err_reader = std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stderr.read_to_end(&mut buf);
            buf
        });

        let waited = child.wait_timeout(req.limits.wall_time);
        let timed_out = !matches!(waited, Ok(Some(_)));
        if timed_out {
            kill_group(pid);
            let _ = child.kill();
            let _ = child.wait();
        } else {
            // grandchildren left behind by the candidate
            kill_group(pid);
        }
        let duration = started.elapsed();
        let _ = writer.join();
        let out = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
        let err = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
        debug!(pid, ?duration, timed_out, "candidate finished");

        if timed_out {
            let mut o = ExecutionOutcome::timeout(duration);
            if !err.is_empty() {
                o.stderr_tail = tail(&format!("{}\n{err}", o.stderr_tail), STDERR_TAIL);
            }
            return Ok(o);
        }
        Ok(match parse_runner_output(&out, req.answer_tag) {
            Ok(answer) => ExecutionOutcome::success(answer, duration),
            Err(msg) => {
                let status = waited
                    .ok()
                    .flatten()
                    .map(|s| s.to_string())
                    .unwrap_or_default();
                let text = if err.trim().is_empty() || msg.contains("Traceback") {
                    msg
                } else {
                    format!("{msg} ({status})\n{err}")
                };
                ExecutionOutcome::runtime_error(text, duration)
            }
        })
    }
}

fn kill_group(pid: u32) {
    #[cfg(unix)]
    // SAFETY: signalling a process group we created; failure is harmless.
    unsafe {
        libc::killpg(pid as libc::pid_t, libc::SIGKILL);
    }
}

impl Executor for SubprocessExecutor {
    fn execute(&self, req: &ExecutionRequest) -> Result<ExecutionOutcome, HostError> {
        self.run(req)
    }

    fn execute_batch(
        &self,
        code: &str,
        instances: &[GraphInstance],
        answer_tag: Option<AnswerTag>,
        limits: SandboxLimits,
    ) -> Result<Vec<ExecutionOutcome>, HostError> {
        self.pool.install(|| {
            instances
                .par_iter()
                .map(|g| {
                    self.run(&ExecutionRequest {
                        code: code.to_string(),
                        graph: g.clone(),
                        answer_tag,
                        limits,
                    })
                })
                .collect()
        })
    }
}

/// A `# stub: ...` directive understood by [`StubExecutor`].
#[derive(Debug, Clone, PartialEq)]
pub enum StubDirective {
    /// Answer with the reference oracle of the named task.
    Oracle(String),
    /// Answer with a fixed JSON value.
    Const(Value),
    /// Fail as if the program raised with this message.
    Raise(String),
    /// Never finish.
    Hang,
}

/// The first directive in `code`, if any.
pub fn stub_directive(code: &str) -> Option<StubDirective> {
    code.lines().find_map(|line| {
        let rest = line
            .trim()
            .strip_prefix('#')?
            .trim()
            .strip_prefix("stub:")?
            .trim();
        if rest == "hang" {
            return Some(StubDirective::Hang);
        }
        let (key, value) = rest.split_once('=')?;
        let value = value.trim();
        match key.trim() {
            "oracle" => Some(StubDirective::Oracle(value.to_string())),
            "const" => serde_json::from_str(value).ok().map(StubDirective::Const),
            "raise" => Some(StubDirective::Raise(value.to_string())),
            _ => None,
        }
    })
}

/// Deterministic in-process executor driven by `# stub:` directives. Every
/// outcome has zero duration except timeouts, which report the wall limit.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubExecutor;

impl Executor for StubExecutor {
    fn execute(&self, req: &ExecutionRequest) -> Result<ExecutionOutcome, HostError> {
        let zero = Duration::ZERO;
        Ok(match stub_directive(&req.code) {
            Some(StubDirective::Oracle(task)) => match task_by_id(&task) {
                Ok(spec) => match spec.label(&req.graph) {
                    Ok(v) => ExecutionOutcome::success(v, zero),
                    // the generated code returns None when the computation fails
                    Err(_) => ExecutionOutcome::success(AnswerValue::Null, zero),
                },
                Err(e) => ExecutionOutcome::runtime_error(format!("NameError: {e}"), zero),
            },
            Some(StubDirective::Const(v)) => {
                ExecutionOutcome::success(AnswerValue::from_json(&v, req.answer_tag), zero)
            }
            Some(StubDirective::Raise(msg)) => ExecutionOutcome::runtime_error(
                format!("Traceback (most recent call last):\n  File \"candidate.py\"\n{msg}"),
                zero,
            ),
            Some(StubDirective::Hang) => ExecutionOutcome::timeout(req.limits.wall_time),
            None => {
                ExecutionOutcome::runtime_error("SyntaxError: program has no stub directive", zero)
            }
        })
    }
}
