//! Offline model backends.
//!
//! [`MockBackend`] imitates a capable but imperfect model by reading the
//! prompts it is sent: it ranks documentation chapters by shared keywords,
//! draws small labelled graphs for test suites, writes the reference program
//! once the right documentation is in its prompt, and otherwise drafts a
//! plausible but broken program that a refinement round repairs. Every
//! response is a pure function of the request, so runs are reproducible and
//! can be recorded as transcripts.
//!
//! [`ScriptedBackend`] plays fixed per-purpose response sequences, for tests
//! of the control flow around the model.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use graphcode_core::dataset::{generate_graph, make_record, Density, GraphRequest, Profile};
use graphcode_core::eval::Purpose;
use graphcode_core::tasks::{all_tasks, TaskSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::gateway::{estimate_tokens, ChatBackend, ChatRequest, ChatResponse, GatewayError};
use crate::retrieval::keywords;
use crate::solutions::reference_solution;
use crate::tfidf::tokenize;

/// Words that carry no topic in task statements or documentation titles.
const FILLER: &[&str] = &[
    "compute",
    "count",
    "determine",
    "find",
    "value",
    "true",
    "false",
    "otherwise",
    "result",
    "given",
    "your",
    "task",
    "such",
    "any",
    "every",
    "other",
    "than",
    "can",
    "has",
    "have",
    "not",
    "only",
    "there",
    "these",
    "those",
    "two",
    "one",
    "into",
    "also",
    "used",
    "using",
    "set",
    "sets",
    "list",
    "lists",
    "be",
    "e",
    "g",
    "u",
    "v",
    "w",
    "k",
    "i",
];

const TITLE_FILLER: &[&str] = &["is", "has", "all", "of", "to", "from", "k"];

fn topic_words(text: &str) -> BTreeSet<String> {
    keywords(text)
        .into_iter()
        .filter(|t| !FILLER.contains(&t.as_str()) && !t.chars().all(|c| c.is_ascii_digit()))
        .collect()
}

/// Loose stem match: equal, or sharing a long common prefix.
fn similar(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    let shorter = a.len().min(b.len());
    if shorter < 3 {
        return false;
    }
    let common = a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count();
    common >= shorter.min(4) && common * 4 >= shorter * 3
}

fn matches_any(word: &str, pool: &BTreeSet<String>) -> bool {
    pool.iter().any(|p| similar(word, p))
}

/// The statement of a task without its generic first sentence and the
/// appended graph-type line.
fn task_core(query: &str) -> &str {
    let query = query.split("\nGraph type:").next().unwrap_or(query);
    match query.find(". ") {
        Some(i) if query.starts_with("You are given") => &query[i + 2..],
        _ => query,
    }
}

fn between<'a>(text: &'a str, start: &str, end: &str) -> Option<&'a str> {
    let from = text.find(start)? + start.len();
    let rest = &text[from..];
    Some(rest.find(end).map_or(rest, |i| &rest[..i]))
}

fn task_for(statement: &str) -> Option<&'static TaskSpec> {
    let statement = statement.trim();
    all_tasks().find(|t| t.description == statement)
}

fn seed_of(text: &str) -> u64 {
    let d = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("eight bytes"))
}

fn python_block(code: &str) -> String {
    format!(
        "Here is the implementation.\n\n```python\n{}\n```\n",
        code.trim_end()
    )
}

/// The reference program, marked so the stub executor reproduces it.
fn reference_program(spec: &TaskSpec) -> Option<String> {
    let src = reference_solution(spec.task_id)?;
    Some(format!("# stub: oracle={}\n{src}", spec.task_id))
}

/// A first attempt that calls a function NetworkX does not have; the error
/// is swallowed, so it returns None on every input.
fn broken_program(spec: &TaskSpec) -> String {
    let mut params = vec!["edge_list".to_string()];
    params.extend(spec.args.iter().map(|a| a.name.to_string()));
    let call_args: Vec<&str> = spec.args.iter().map(|a| a.name).collect();
    let call = if call_args.is_empty() {
        "G".to_string()
    } else {
        format!("G, {}", call_args.join(", "))
    };
    let add = if spec.constraints.weighted {
        "add_weighted_edges_from"
    } else {
        "add_edges_from"
    };
    format!(
        "# stub: const=null\nimport networkx as nx\n\n\ndef solve({}):\n    try:\n        G = nx.{}()\n        G.{add}(edge_list)\n        return nx.compute_{}({call})\n    except Exception:\n        return None\n",
        params.join(", "),
        spec.nx_graph_class(),
        tokenize(spec.name).join("_"),
    )
}

const UNKNOWN_TASK_PROGRAM: &str =
    "# stub: const=null\nimport networkx as nx\n\n\ndef solve(edge_list):\n    return None\n";

/// Deterministic stand-in for a chat model; see the module documentation.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockBackend;

impl MockBackend {
    fn relevance(&self, prompt: &str) -> String {
        let query = between(prompt, "User Query\n", "\n\nInstructions").unwrap_or("");
        let want = topic_words(task_core(query));
        let top_k: usize = between(prompt, "Choose up to ", " unique")
            .and_then(|k| k.trim().parse().ok())
            .unwrap_or(usize::MAX);
        let dict = between(prompt, "(key -> description)\n", "\n\nChoose").unwrap_or("{}");
        let chapters: BTreeMap<String, String> = serde_json::from_str(dict).unwrap_or_default();
        let mut scored: Vec<(usize, &String)> = chapters
            .iter()
            .map(|(id, desc)| {
                // the description reads "title: summary"; title words count double
                let (title, summary) = desc.split_once(": ").unwrap_or((desc.as_str(), ""));
                let name = topic_words(&format!("{} {title}", id.rsplit('/').next().unwrap_or(id)));
                let body = topic_words(summary);
                let hits = |words: &BTreeSet<String>| {
                    words.iter().filter(|w| matches_any(w, &want)).count()
                };
                (2 * hits(&name) + hits(&body), id)
            })
            .filter(|(score, _)| *score > 0)
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        let keys: Vec<String> = scored
            .into_iter()
            .take(top_k)
            .map(|(_, id)| id.clone())
            .collect();
        serde_json::to_string(&keys).expect("string list")
    }

    fn global_filter(&self, message: &str) -> String {
        let query = between(message, "User Query:\n", "\n\nFunction documentation:").unwrap_or("");
        let want = topic_words(task_core(query));
        let doc = between(message, "Function documentation:\n", "\u{0}").unwrap_or("");
        let mut lines = doc.lines();
        let title = lines.next().unwrap_or("");
        let summary = topic_words(lines.next().unwrap_or(""));
        let summary_hits = summary.iter().filter(|w| matches_any(w, &want)).count();
        let parts: Vec<String> = tokenize(title)
            .into_iter()
            .filter(|t| !TITLE_FILLER.contains(&t.as_str()))
            .collect();
        let hits = parts.iter().filter(|p| matches_any(p, &want)).count();
        if (!parts.is_empty() && hits * 2 >= parts.len()) || summary_hits >= 2 {
            "Yes".into()
        } else {
            "No".into()
        }
    }

    fn testgen(&self, prompt: &str) -> String {
        let statement = between(prompt, "Task description: ", "\nArguments:").unwrap_or("");
        let Some(spec) = task_for(statement) else {
            return "[]".into();
        };
        let wanted: usize = between(prompt, "Number of test cases: ", "\n")
            .and_then(|n| n.trim().parse().ok())
            .unwrap_or(3);
        let max_nodes: usize = between(prompt, "at most ", " nodes")
            .and_then(|n| n.trim().parse().ok())
            .unwrap_or(6)
            .max(2);
        let seed = seed_of(prompt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let req = GraphRequest {
            directed: spec.constraints.directed,
            weighted: spec.constraints.weighted,
            connected: spec.constraints.connected,
            nodes: (3.min(max_nodes), max_nodes),
            density: Density::Probability { lo: 0.3, hi: 0.7 },
            connect_attempts: 20,
        };
        let mut cases = Vec::new();
        for attempt in 0..wanted * 10 {
            if cases.len() == wanted {
                break;
            }
            let Ok(graph) = generate_graph(&req, &mut rng) else {
                continue;
            };
            let Ok(Some(rec)) = make_record(
                spec,
                &graph,
                &mut rng,
                20,
                format!("case-{attempt}"),
                seed,
                Profile::Small,
            ) else {
                continue;
            };
            let mut input = Map::new();
            input.insert(
                "edge_list".into(),
                serde_json::to_value(&rec.edges).expect("edges"),
            );
            input.extend(rec.args);
            let mut case = Map::new();
            case.insert("input".into(), Value::Object(input));
            case.insert("expected_output".into(), rec.label);
            cases.push(Value::Object(case));
        }
        serde_json::to_string(&cases).expect("cases")
    }

    fn codegen(&self, prompt: &str) -> String {
        let statement = between(prompt, "Task Description\n", "\n\nGraph Properties").unwrap_or("");
        let Some(spec) = task_for(statement) else {
            return python_block(UNKNOWN_TASK_PROGRAM);
        };
        let titles: BTreeSet<&str> = prompt
            .lines()
            .filter_map(|l| l.strip_prefix("### "))
            .collect();
        let documented = spec
            .required_docs
            .iter()
            .all(|d| titles.contains(d.rsplit('/').next().unwrap_or(d)));
        // composite tasks always take one repair round
        let code = match reference_program(spec) {
            Some(code) if documented && !spec.is_composite() => code,
            _ => broken_program(spec),
        };
        python_block(&code)
    }

    fn refine(&self, prompt: &str) -> String {
        let statement = between(prompt, "Original Task:\n\n", "\n\nFailed Code").unwrap_or("");
        let code = task_for(statement)
            .and_then(reference_program)
            .unwrap_or_else(|| UNKNOWN_TASK_PROGRAM.to_string());
        python_block(&code)
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let text = match req.purpose {
            Purpose::Relevance => self.relevance(&req.user_text),
            Purpose::GlobalFilter => self.global_filter(&req.user_text),
            Purpose::Testgen => self.testgen(&req.user_text),
            Purpose::Codegen => self.codegen(&req.user_text),
            Purpose::Refine => self.refine(&req.user_text),
        };
        Ok(ChatResponse {
            prompt_tokens: estimate_tokens(&req.system_text) + estimate_tokens(&req.user_text),
            completion_tokens: estimate_tokens(&text),
            text,
            latency: Default::default(),
        })
    }
}

/// Plays a fixed response sequence per purpose; once a sequence is used up
/// its last response repeats. A purpose without a script is an error.
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    scripts: HashMap<Purpose, Vec<String>>,
    cursor: Mutex<HashMap<Purpose, usize>>,
}

impl ScriptedBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn on(
        mut self,
        purpose: Purpose,
        responses: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        self.scripts
            .insert(purpose, responses.into_iter().map(Into::into).collect());
        self
    }

    /// Responses served so far for `purpose`.
    pub fn served(&self, purpose: Purpose) -> usize {
        self.cursor
            .lock()
            .expect("cursor lock")
            .get(&purpose)
            .copied()
            .unwrap_or(0)
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let script = self
            .scripts
            .get(&req.purpose)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| {
                GatewayError::InvalidRequest(format!("no script for {}", req.purpose.as_str()))
            })?;
        let mut cursor = self.cursor.lock().expect("cursor lock");
        let i = cursor.entry(req.purpose).or_insert(0);
        let text = script[(*i).min(script.len() - 1)].clone();
        *i += 1;
        Ok(ChatResponse {
            prompt_tokens: estimate_tokens(&req.system_text) + estimate_tokens(&req.user_text),
            completion_tokens: estimate_tokens(&text),
            text,
            latency: Default::default(),
        })
    }
}
