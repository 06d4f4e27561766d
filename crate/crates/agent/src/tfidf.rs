//! Flat TF-IDF ranking of documentation entries, used as a retrieval baseline.

use std::collections::{BTreeMap, BTreeSet};

use crate::doctree::DocTree;

/// Lowercased maximal runs of ASCII letters and digits.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_ascii_lowercase())
        .collect()
}

/// A TF-IDF index over a fixed list of documents.
#[derive(Debug, Clone)]
pub struct TfIdfIndex {
    ids: Vec<String>,
    idf: BTreeMap<String, f64>,
    vectors: Vec<BTreeMap<String, f64>>,
}

impl TfIdfIndex {
    /// `docs` is a list of (id, text). Term weights are raw counts times the
    /// smoothed idf `ln((1+N)/(1+df)) + 1`; vectors are L2-normalised.
    pub fn new(docs: &[(String, String)]) -> Self {
        let n = docs.len() as f64;
        let counts: Vec<BTreeMap<String, f64>> =
            docs.iter().map(|(_, text)| term_counts(text)).collect();
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for c in &counts {
            for t in c.keys() {
                *df.entry(t.clone()).or_default() += 1;
            }
        }
        let idf: BTreeMap<String, f64> = df
            .into_iter()
            .map(|(t, d)| (t, ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
            .collect();
        let vectors = counts.into_iter().map(|c| weigh(c, &idf)).collect();
        Self {
            ids: docs.iter().map(|(id, _)| id.clone()).collect(),
            idf,
            vectors,
        }
    }

    /// Index every leaf of `tree` over its title, summary and body.
    pub fn from_tree(tree: &DocTree) -> Self {
        let docs: Vec<(String, String)> = tree
            .leaves()
            .iter()
            .map(|l| (l.id.clone(), l.full_text()))
            .collect();
        Self::new(&docs)
    }

    /// Query vector; terms unseen in the corpus get the idf of a term with df 0.
    fn query_vector(&self, query: &str) -> BTreeMap<String, f64> {
        let n = self.ids.len() as f64;
        let unseen = (1.0 + n).ln() + 1.0;
        let counts = term_counts(query);
        let idf: BTreeMap<String, f64> = counts
            .keys()
            .map(|t| (t.clone(), self.idf.get(t).copied().unwrap_or(unseen)))
            .collect();
        weigh(counts, &idf)
    }

    /// Cosine similarity of `query` to every document, in index order.
    pub fn scores(&self, query: &str) -> Vec<(String, f64)> {
        let q = self.query_vector(query);
        self.ids
            .iter()
            .zip(&self.vectors)
            .map(|(id, v)| {
                let dot: f64 = q.iter().filter_map(|(t, w)| v.get(t).map(|x| x * w)).sum();
                (id.clone(), dot)
            })
            .collect()
    }

    /// Top `k` documents by descending score, ties broken by ascending id.
    pub fn top_k(&self, query: &str, k: usize) -> Vec<(String, f64)> {
        let mut s = self.scores(query);
        s.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        s.truncate(k);
        s
    }
}

fn term_counts(text: &str) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for t in tokenize(text) {
        *m.entry(t).or_insert(0.0) += 1.0;
    }
    m
}

fn weigh(counts: BTreeMap<String, f64>, idf: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let mut v: BTreeMap<String, f64> = counts
        .into_iter()
        .map(|(t, c)| {
            let w = c * idf[&t];
            (t, w)
        })
        .collect();
    let norm = v.values().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.values_mut() {
            *x /= norm;
        }
    }
    v
}

/// Leaf ids of `tree` ranked against `query`, best first, at most `k`.
pub fn tfidf_baseline(query: &str, tree: &DocTree, k: usize) -> Vec<String> {
    TfIdfIndex::from_tree(tree)
        .top_k(query, k)
        .into_iter()
        .map(|(id, _)| id)
        .collect()
}

/// Distinct tokens of `text`.
pub fn token_set(text: &str) -> BTreeSet<String> {
    tokenize(text).into_iter().collect()
}
