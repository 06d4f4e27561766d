//! Random and regular documentation trees for retrieval tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use graphcode_agent::doctree::{Corpus, CorpusNode, DocTree};
use rand::Rng;

fn entry(children: Vec<String>, id: &str) -> CorpusNode {
    let leaf = children.is_empty();
    CorpusNode {
        title: format!("title {id}"),
        summary: format!("summary of {id}"),
        body: leaf.then(|| format!("body of {id}")),
        children,
    }
}

/// Every internal node has `branching` children, all entries at `depth`.
/// Ids are the digit path from the root, e.g. `r.0.2.1`.
pub fn regular_tree(branching: usize, depth: usize) -> DocTree {
    let mut nodes = BTreeMap::new();
    fn grow(
        id: String,
        layer: usize,
        b: usize,
        depth: usize,
        nodes: &mut BTreeMap<String, CorpusNode>,
    ) {
        let children: Vec<String> = if layer < depth {
            (0..b).map(|i| format!("{id}.{i}")).collect()
        } else {
            Vec::new()
        };
        for c in &children {
            grow(c.clone(), layer + 1, b, depth, nodes);
        }
        let node = entry(children, &id);
        nodes.insert(id, node);
    }
    grow("r".into(), 0, branching, depth, &mut nodes);
    DocTree::from_corpus(Corpus {
        root: "r".into(),
        nodes,
    })
    .expect("regular tree is valid")
}

/// A ragged tree of depth at most `max_depth` (at least 1) where each
/// internal node has 1..=`max_branching` children.
pub fn random_tree(rng: &mut impl Rng, max_depth: usize, max_branching: usize) -> DocTree {
    let mut nodes = BTreeMap::new();
    fn grow(
        id: String,
        layer: usize,
        rng: &mut impl Rng,
        max_depth: usize,
        max_b: usize,
        nodes: &mut BTreeMap<String, CorpusNode>,
    ) {
        let internal = layer == 0 || (layer < max_depth && rng.random_bool(0.6));
        let children: Vec<String> = if internal {
            (0..rng.random_range(1..=max_b))
                .map(|i| format!("{id}.{i}"))
                .collect()
        } else {
            Vec::new()
        };
        for c in &children {
            grow(c.clone(), layer + 1, rng, max_depth, max_b, nodes);
        }
        let node = entry(children, &id);
        nodes.insert(id, node);
    }
    grow("r".into(), 0, rng, max_depth, max_branching, &mut nodes);
    DocTree::from_corpus(Corpus {
        root: "r".into(),
        nodes,
    })
    .expect("random tree is valid")
}

/// A random non-empty subset of the tree's entries.
pub fn random_gold(rng: &mut impl Rng, tree: &DocTree) -> BTreeSet<String> {
    let leaves: Vec<String> = tree.leaves().iter().map(|n| n.id.clone()).collect();
    let p = rng.random_range(0.05..0.6);
    let mut gold: BTreeSet<String> = leaves
        .iter()
        .filter(|_| rng.random_bool(p))
        .cloned()
        .collect();
    if gold.is_empty() {
        gold.insert(leaves[rng.random_range(0..leaves.len())].clone());
    }
    gold
}
