//! Tree-structured documentation corpus: internal nodes are chapters with a
//! summary, leaves are concrete entries with a body.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Id given to the root of a tree built from a directory.
pub const DIRECTORY_ROOT_ID: &str = ".";
/// File inside a folder that carries the folder's title and summary.
pub const INDEX_FILE: &str = "_index.md";

/// The NetworkX documentation tree shipped with the crate.
pub const BUNDLED_CORPUS: &str = include_str!("../assets/corpus/networkx.json");

#[derive(Debug, Error)]
pub enum DocTreeError {
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("cycle through node {0:?}")]
    Cycle(String),
    #[error("orphan: {0}")]
    Orphan(String),
    #[error("missing summary for {0}")]
    MissingSummary(String),
    #[error("invalid tree: {0}")]
    Validation(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
}

/// One node as stored in the corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusNode {
    pub title: String,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    #[serde(default)]
    pub children: Vec<String>,
}

/// The on-disk corpus schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub root: String,
    pub nodes: BTreeMap<String, CorpusNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocNode {
    pub id: String,
    pub title: String,
    pub summary: String,
    pub body: Option<String>,
    pub children: Vec<String>,
    pub layer: usize,
}

impl DocNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Text a reader sees for this entry: title, summary and body.
    pub fn full_text(&self) -> String {
        let mut s = format!("{}\n{}", self.title, self.summary);
        if let Some(b) = &self.body {
            s.push('\n');
            s.push_str(b);
        }
        s
    }
}

/// A validated, immutable documentation tree.
#[derive(Debug, Clone, PartialEq)]
pub struct DocTree {
    nodes: BTreeMap<String, DocNode>,
    parents: BTreeMap<String, String>,
    root_id: String,
    depth: usize,
}

impl DocTree {
    /// Validate a corpus: every listed child exists, the edges form a tree
    /// rooted at `root`, every node is reachable, and there is at least one
    /// entry below the root.
    pub fn from_corpus(corpus: Corpus) -> Result<Self, DocTreeError> {
        let Corpus { root, nodes } = corpus;
        if !nodes.contains_key(&root) {
            return Err(DocTreeError::Schema(format!(
                "root {root:?} is not among the nodes"
            )));
        }
        for (id, n) in &nodes {
            for c in &n.children {
                if !nodes.contains_key(c) {
                    return Err(DocTreeError::Orphan(format!(
                        "{id:?} lists missing child {c:?}"
                    )));
                }
            }
        }
        if let Some(id) = find_cycle(&nodes) {
            return Err(DocTreeError::Cycle(id));
        }
        let mut parents: BTreeMap<String, String> = BTreeMap::new();
        for (id, n) in &nodes {
            let mut seen = BTreeSet::new();
            for c in &n.children {
                if !seen.insert(c) {
                    return Err(DocTreeError::Schema(format!(
                        "{id:?} lists child {c:?} twice"
                    )));
                }
                if *c == root {
                    return Err(DocTreeError::Schema(format!(
                        "root {root:?} is listed as a child of {id:?}"
                    )));
                }
                if let Some(p) = parents.insert(c.clone(), id.clone()) {
                    return Err(DocTreeError::Schema(format!(
                        "{c:?} has two parents: {p:?} and {id:?}"
                    )));
                }
            }
        }
        for (id, n) in &nodes {
            if !n.children.is_empty() && n.body.is_some() {
                return Err(DocTreeError::Schema(format!(
                    "internal node {id:?} carries a body"
                )));
            }
            if *id != root && n.summary.trim().is_empty() {
                return Err(DocTreeError::MissingSummary(id.clone()));
            }
        }

        let mut layers: BTreeMap<&str, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([(root.as_str(), 0usize)]);
        while let Some((id, layer)) = queue.pop_front() {
            layers.insert(id, layer);
            for c in &nodes[id].children {
                queue.push_back((c, layer + 1));
            }
        }
        if let Some(id) = nodes.keys().find(|id| !layers.contains_key(id.as_str())) {
            return Err(DocTreeError::Orphan(format!(
                "{id:?} is not reachable from the root"
            )));
        }
        let depth = layers.values().copied().max().unwrap_or(0);
        if depth == 0 {
            return Err(DocTreeError::Validation(
                "tree needs at least one entry below the root".into(),
            ));
        }
        let layers: BTreeMap<String, usize> = layers
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let nodes = nodes
            .into_iter()
            .map(|(id, n)| {
                let node = DocNode {
                    layer: layers[&id],
                    id: id.clone(),
                    title: n.title,
                    summary: n.summary,
                    body: n.body,
                    children: n.children,
                };
                (id, node)
            })
            .collect();
        Ok(Self {
            nodes,
            parents,
            root_id: root,
            depth,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, DocTreeError> {
        let corpus: Corpus =
            serde_json::from_str(text).map_err(|e| DocTreeError::Schema(e.to_string()))?;
        Self::from_corpus(corpus)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CORPUS).expect("bundled corpus is valid")
    }

    pub fn load(path: &Path) -> Result<Self, DocTreeError> {
        let text = fs::read_to_string(path).map_err(|source| DocTreeError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_corpus(&self) -> Corpus {
        Corpus {
            root: self.root_id.clone(),
            nodes: self
                .nodes
                .iter()
                .map(|(id, n)| {
                    let node = CorpusNode {
                        title: n.title.clone(),
                        summary: n.summary.clone(),
                        body: n.body.clone(),
                        children: n.children.clone(),
                    };
                    (id.clone(), node)
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_corpus()).expect("corpus serialises")
    }

    pub fn save(&self, path: &Path) -> Result<(), DocTreeError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| DocTreeError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Folders become chapters, files become entries. Each file starts with
    /// `# title`, then a summary line, then the body. A folder's own title and
    /// summary come from its `_index.md`; the top folder's index is optional.
    /// Entries are ordered by file name.
    pub fn build_from_directory(dir: &Path) -> Result<Self, DocTreeError> {
        let mut nodes = BTreeMap::new();
        let (title, summary) = match read_index(dir)? {
            Some(ts) => ts,
            None => {
                let name = dir
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                (name, String::new())
            }
        };
        let children = walk(dir, "", &mut nodes)?;
        nodes.insert(
            DIRECTORY_ROOT_ID.to_string(),
            CorpusNode {
                title,
                summary,
                body: None,
                children,
            },
        );
        Self::from_corpus(Corpus {
            root: DIRECTORY_ROOT_ID.to_string(),
            nodes,
        })
    }

    pub fn root_id(&self) -> &str {
        &self.root_id
    }

    pub fn root(&self) -> &DocNode {
        &self.nodes[&self.root_id]
    }

    /// Deepest layer; the root sits at layer 0.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&DocNode> {
        self.nodes.get(id)
    }

    pub fn get(&self, id: &str) -> Result<&DocNode, DocTreeError> {
        self.nodes
            .get(id)
            .ok_or_else(|| DocTreeError::UnknownNode(id.to_string()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &DocNode> {
        self.nodes.values()
    }

    /// Children of `id` in stored order.
    pub fn children(&self, id: &str) -> Result<Vec<&DocNode>, DocTreeError> {
        Ok(self
            .get(id)?
            .children
            .iter()
            .map(|c| &self.nodes[c])
            .collect())
    }

    pub fn parent(&self, id: &str) -> Option<&DocNode> {
        self.parents.get(id).map(|p| &self.nodes[p])
    }

    /// All entries, ordered by id.
    pub fn leaves(&self) -> Vec<&DocNode> {
        self.nodes.values().filter(|n| n.is_leaf()).collect()
    }

    /// Whether `ancestor` lies on the path from the root to `id` (inclusive).
    pub fn is_ancestor_or_self(&self, ancestor: &str, id: &str) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.parents.get(c).map(String::as_str);
        }
        false
    }
}

fn find_cycle(nodes: &BTreeMap<String, CorpusNode>) -> Option<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    for start in nodes.keys() {
        if marks.contains_key(start.as_str()) {
            continue;
        }
        // iterative DFS: (node, next child index)
        let mut stack = vec![(start.as_str(), 0usize)];
        marks.insert(start, Mark::Open);
        while let Some((id, i)) = stack.pop() {
            let children = &nodes[id].children;
            if i < children.len() {
                stack.push((id, i + 1));
                let c = children[i].as_str();
                match marks.get(c) {
                    Some(Mark::Open) => return Some(c.to_string()),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(c, Mark::Open);
                        stack.push((c, 0));
                    }
                }
            } else {
                marks.insert(id, Mark::Done);
            }
        }
    }
    None
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DocTreeError + '_ {
    move |source| DocTreeError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Split `# title` / summary / body. Missing summaries are reported against `label`.
fn parse_entry(text: &str, label: &str) -> Result<(String, String, String), DocTreeError> {
    let mut lines = text.lines();
    let first = lines.next().unwrap_or("");
    let title = first
        .strip_prefix('#')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .ok_or_else(|| DocTreeError::Schema(format!("{label}: first line must be `# title`")))?;
    let summary = lines.next().unwrap_or("").trim();
    if summary.is_empty() {
        return Err(DocTreeError::MissingSummary(label.to_string()));
    }
    let body = lines.collect::<Vec<_>>().join("\n").trim().to_string();
    Ok((title.to_string(), summary.to_string(), body))
}

fn read_index(dir: &Path) -> Result<Option<(String, String)>, DocTreeError> {
    let path = dir.join(INDEX_FILE);
    if !path.is_file() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let (title, summary, _) = parse_entry(&text, &path.display().to_string())?;
    Ok(Some((title, summary)))
}

fn walk(
    dir: &Path,
    prefix: &str,
    nodes: &mut BTreeMap<String, CorpusNode>,
) -> Result<Vec<String>, DocTreeError> {
    let mut entries: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || name == INDEX_FILE {
            continue;
        }
        entries.push((name, entry.path()));
    }
    entries.sort();
    let mut children = Vec::new();
    for (name, path) in entries {
        if path.is_dir() {
            let id = format!("{prefix}{name}");
            let (title, summary) = read_index(&path)?
                .ok_or_else(|| DocTreeError::MissingSummary(path.display().to_string()))?;
            let kids = walk(&path, &format!("{id}/"), nodes)?;
            if kids.is_empty() {
                return Err(DocTreeError::Validation(format!(
                    "folder {} has no entries",
                    path.display()
                )));
            }
            nodes.insert(
                id.clone(),
                CorpusNode {
                    title,
                    summary,
                    body: None,
                    children: kids,
                },
            );
            children.push(id);
        } else {
            let stem = Path::new(&name)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or(name.clone());
            let id = format!("{prefix}{stem}");
            if nodes.contains_key(&id) || children.contains(&id) {
                return Err(DocTreeError::Schema(format!("duplicate entry id {id:?}")));
            }
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let (title, summary, body) = parse_entry(&text, &path.display().to_string())?;
            nodes.insert(
                id.clone(),
                CorpusNode {
                    title,
                    summary,
                    body: Some(body),
                    children: Vec::new(),
                },
            );
            children.push(id);
        }
    }
    Ok(children)
}
