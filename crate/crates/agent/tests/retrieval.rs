//! Documentation tree building and layer-wise retrieval behaviour.

#[path = "support/trees.rs"]
mod trees;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use graphcode_agent::doctree::{Corpus, CorpusNode, DocTree, DocTreeError};
use graphcode_agent::retrieval::{
    candidate_children, global_filter, retrieve, select_relevant, JudgeError, KeywordJudge,
    PerfectSubtreeJudge, RetrievalConfig, ScriptedJudge, TaskQuery,
};
use graphcode_agent::tfidf::tfidf_baseline;
use graphcode_core::eval::{retrieval_f1, retrieval_precision, retrieval_recall};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn write(path: &Path, text: &str) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, text).unwrap();
}

fn ids(nodes: &[&graphcode_agent::doctree::DocNode]) -> Vec<String> {
    nodes.iter().map(|n| n.id.clone()).collect()
}

fn unbounded() -> RetrievalConfig {
    RetrievalConfig {
        top_k: None,
        ..RetrievalConfig::default()
    }
}

#[test]
fn directory_with_one_folder_of_two_files() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("flows/_index.md"),
        "# Flows\nMaximum flow algorithms\n",
    );
    write(
        &dir.path().join("flows/max_flow.md"),
        "# maximum_flow\nValue of a maximum flow.\nLong body\ntext",
    );
    write(
        &dir.path().join("flows/min_cut.md"),
        "# minimum_cut\nMinimum cut.\n",
    );
    let t = DocTree::build_from_directory(dir.path()).unwrap();
    assert_eq!(t.depth(), 2);
    assert_eq!(t.len() - 1, 3);
    let leaf = t.get("flows/max_flow").unwrap();
    assert_eq!(leaf.title, "maximum_flow");
    assert_eq!(leaf.summary, "Value of a maximum flow.");
    assert_eq!(leaf.body.as_deref(), Some("Long body\ntext"));
    assert_eq!(t.get("flows").unwrap().summary, "Maximum flow algorithms");
}

#[test]
fn empty_directory_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        DocTree::build_from_directory(dir.path()),
        Err(DocTreeError::Validation(_))
    ));
}

#[test]
fn nested_three_deep_has_layers_one_to_three() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("a/_index.md"), "# A\nsection a\n");
    write(&dir.path().join("a/b/_index.md"), "# B\nsection b\n");
    write(&dir.path().join("a/b/c.md"), "# C\nentry c\nbody");
    write(&dir.path().join("d.md"), "# D\nentry d\nbody");
    let t = DocTree::build_from_directory(dir.path()).unwrap();
    assert_eq!(t.depth(), 3);
    let layers: Vec<(String, usize)> = t.nodes().map(|n| (n.id.clone(), n.layer)).collect();
    assert_eq!(
        layers,
        [
            ("a".into(), 1),
            ("a/b".into(), 2),
            ("a/b/c".into(), 3),
            ("d".into(), 1),
            (".".into(), 0)
        ]
        .into_iter()
        .collect::<std::collections::BTreeMap<String, usize>>()
        .into_iter()
        .collect::<Vec<_>>()
    );
}

#[test]
fn missing_summary_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("x.md"), "# X\n\nbody");
    assert!(matches!(
        DocTree::build_from_directory(dir.path()),
        Err(DocTreeError::MissingSummary(_))
    ));
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("sub/x.md"), "# X\nsummary\nbody");
    assert!(matches!(
        DocTree::build_from_directory(dir.path()),
        Err(DocTreeError::MissingSummary(_))
    ));
}

#[test]
fn save_and_load_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = trees::random_tree(&mut rng, 4, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.json");
    t.save(&path).unwrap();
    assert_eq!(DocTree::load(&path).unwrap(), t);
}

fn node(id: &str, summary: &str, children: &[&str]) -> (String, CorpusNode) {
    (
        id.to_string(),
        CorpusNode {
            title: id.to_string(),
            summary: summary.to_string(),
            body: children.is_empty().then(|| format!("{id} body")),
            children: children.iter().map(|s| s.to_string()).collect(),
        },
    )
}

fn chapters() -> DocTree {
    DocTree::from_corpus(Corpus {
        root: "root".into(),
        nodes: [
            node("root", "", &["shortest_paths", "flow", "clique", "leafy"]),
            node(
                "shortest_paths",
                "Compute shortest paths and lengths",
                &["dijkstra", "bfs"],
            ),
            node("flow", "Maximum flow and minimum cut", &["max_flow"]),
            node("clique", "Find cliques", &["max_clique"]),
            node("leafy", "A top-level entry about cycles", &[]),
            node("dijkstra", "Weighted shortest path length", &[]),
            node("bfs", "Breadth-first traversal", &[]),
            node("max_flow", "Maximum flow value", &[]),
            node("max_clique", "Largest clique", &[]),
        ]
        .into_iter()
        .collect(),
    })
    .unwrap()
}

#[test]
fn keyword_judge_picks_matching_chapter() {
    let t = chapters();
    let cands: Vec<_> = ["shortest_paths", "flow", "clique"]
        .iter()
        .map(|id| t.get(id).unwrap())
        .collect();
    let (sel, warn) = select_relevant(
        &TaskQuery::new("shortest path"),
        &cands,
        &KeywordJudge,
        Some(5),
    )
    .unwrap();
    assert_eq!(sel, ["shortest_paths"]);
    assert!(warn.is_none());
    let (sel, _) =
        select_relevant(&TaskQuery::new("zebra"), &cands, &KeywordJudge, Some(5)).unwrap();
    assert!(sel.is_empty());
}

#[test]
fn cap_keeps_first_candidates_and_drops_unknown_keys() {
    let t = chapters();
    let cands: Vec<_> = ["shortest_paths", "flow", "clique"]
        .iter()
        .map(|id| t.get(id).unwrap())
        .collect();
    let q = TaskQuery::new("anything");
    let (sel, _) = select_relevant(&q, &cands, &ScriptedJudge::accept_all(), Some(2)).unwrap();
    assert_eq!(sel, ["shortest_paths", "flow"]);

    let hallucinating = ScriptedJudge::new(
        |_| Ok(vec!["made_up".into(), "clique".into(), "clique".into()]),
        |_| Ok(true),
    );
    let (sel, warn) = select_relevant(&q, &cands, &hallucinating, Some(5)).unwrap();
    assert_eq!(sel, ["clique"]);
    assert!(warn.unwrap().contains("made_up"));

    let garbled = ScriptedJudge::new(
        |_| Err(JudgeError::Unparseable("prose".into())),
        |_| Ok(true),
    );
    let (sel, warn) = select_relevant(&q, &cands, &garbled, Some(5)).unwrap();
    assert!(sel.is_empty() && warn.is_some());

    let broken = ScriptedJudge::new(|_| Err(JudgeError::Other("down".into())), |_| Ok(true));
    assert!(select_relevant(&q, &cands, &broken, Some(5)).is_err());
}

#[test]
fn candidate_children_carries_leaves_forward() {
    let t = chapters();
    assert_eq!(
        ids(&candidate_children(&t, &["root"])),
        ["shortest_paths", "flow", "clique", "leafy"]
    );
    assert!(candidate_children(&t, &[]).is_empty());
    assert_eq!(
        ids(&candidate_children(&t, &["shortest_paths", "leafy"])),
        ["dijkstra", "bfs", "leafy"]
    );
}

#[test]
fn global_filter_keeps_yes_and_drops_failures() {
    let t = chapters();
    let leaves = t.leaves();
    let q = TaskQuery::new("q");
    assert_eq!(
        global_filter(&q, &leaves, &ScriptedJudge::accept_all()).len(),
        leaves.len()
    );
    assert!(global_filter(&q, &leaves, &ScriptedJudge::reject_all()).is_empty());
    let three: Vec<_> = ["bfs", "dijkstra", "max_flow"]
        .iter()
        .map(|id| t.get(id).unwrap())
        .collect();
    let mixed = ScriptedJudge::new(
        |_| Ok(Vec::new()),
        |n| match n.id.as_str() {
            "bfs" => Ok(true),
            "dijkstra" => Ok(true),
            _ => Err(JudgeError::Other("timeout".into())),
        },
    );
    assert_eq!(global_filter(&q, &three, &mixed), ["bfs", "dijkstra"]);
}

#[test]
fn single_gold_in_regular_tree_costs_one_path() {
    let t = trees::regular_tree(3, 3);
    assert_eq!(t.leaves().len(), 27);
    let gold: BTreeSet<String> = ["r.2.0.1".to_string()].into();
    let judge = PerfectSubtreeJudge {
        tree: &t,
        gold: gold.clone(),
    };
    let r = retrieve(
        &TaskQuery::new("q"),
        &t,
        &judge,
        &RetrievalConfig::default(),
    )
    .unwrap();
    assert_eq!(r.selected_leaf_ids, gold);
    let per_layer: usize = r.layer_trace.iter().map(|l| l.candidates.len()).sum();
    assert_eq!(per_layer, 9);
    assert_eq!(r.judged_node_count, 10);
    assert_eq!(
        r.layer_trace
            .iter()
            .map(|l| l.selected.len())
            .collect::<Vec<_>>(),
        [1, 1, 1]
    );
}

#[test]
fn rejecting_everything_prunes_at_layer_one() {
    let t = trees::regular_tree(3, 3);
    let r = retrieve(
        &TaskQuery::new("q"),
        &t,
        &ScriptedJudge::reject_all(),
        &RetrievalConfig::default(),
    )
    .unwrap();
    assert!(r.selected_leaf_ids.is_empty());
    assert_eq!(r.layer_trace.len(), 1);
    assert_eq!(r.layer_trace[0].layer, 1);
    assert!(r.layer_trace[0].selected.is_empty());
}

#[test]
fn gold_in_two_branches_is_retained() {
    let t = trees::regular_tree(3, 3);
    let gold: BTreeSet<String> = ["r.0.1.2".to_string(), "r.2.2.0".to_string()].into();
    let judge = PerfectSubtreeJudge {
        tree: &t,
        gold: gold.clone(),
    };
    let r = retrieve(
        &TaskQuery::new("q"),
        &t,
        &judge,
        &RetrievalConfig::default(),
    )
    .unwrap();
    assert_eq!(r.selected_leaf_ids, gold);
}

#[test]
fn ragged_tree_carries_early_leaf_without_rejudging() {
    let t = chapters();
    let judge = ScriptedJudge::new(
        |c| {
            Ok(c.iter()
                .filter(|n| ["shortest_paths", "leafy", "dijkstra"].contains(&n.id.as_str()))
                .map(|n| n.id.clone())
                .collect())
        },
        |_| Ok(true),
    );
    let r = retrieve(
        &TaskQuery::new("q"),
        &t,
        &judge,
        &RetrievalConfig::default(),
    )
    .unwrap();
    let expected: BTreeSet<String> = ["dijkstra".to_string(), "leafy".to_string()].into();
    assert_eq!(r.selected_leaf_ids, expected);
    assert_eq!(r.layer_trace[1].carried, ["leafy"]);
    assert_eq!(r.layer_trace[1].candidates, ["dijkstra", "bfs"]);
    assert_eq!(r.judged_node_count, 4 + 2 + 2);
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert!(json["layer_trace"].is_array() && json["wall_time_ms"].is_number());
}

#[test]
fn tfidf_baseline_examples() {
    let t = chapters();
    let leaf = t.get("max_flow").unwrap();
    assert_eq!(tfidf_baseline(&leaf.full_text(), &t, 1), ["max_flow"]);
    assert_eq!(tfidf_baseline("flow", &t, 100).len(), t.leaves().len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perfect_judge_recovers_gold_exactly(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = trees::random_tree(&mut rng, 4, 5);
        let gold = trees::random_gold(&mut rng, &t);
        let judge = PerfectSubtreeJudge { tree: &t, gold: gold.clone() };
        let r = retrieve(&TaskQuery::new("q"), &t, &judge, &unbounded()).unwrap();
        prop_assert_eq!(&r.selected_leaf_ids, &gold);
        prop_assert_eq!(retrieval_precision(&r.selected_leaf_ids, &gold), 1.0);
        prop_assert_eq!(retrieval_recall(&r.selected_leaf_ids, &gold), 1.0);
        prop_assert_eq!(retrieval_f1(&r.selected_leaf_ids, &gold), 1.0);
        let per_layer: usize = r.layer_trace.iter().map(|l| l.candidates.len()).sum();
        prop_assert_eq!(r.judged_node_count, per_layer + r.pre_filter_leaf_ids.len());
    }

    #[test]
    fn pruned_branches_never_surface(seed in any::<u64>(), reject_bits in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = trees::random_tree(&mut rng, 4, 4);
        let rejected = move |id: &str| {
            let h = id.bytes().fold(reject_bits, |a, b| a.rotate_left(5) ^ b as u64);
            h % 3 == 0
        };
        let judge = ScriptedJudge::new(
            move |c| Ok(c.iter().filter(|n| !rejected(&n.id)).map(|n| n.id.clone()).collect()),
            |_| Ok(true),
        );
        let r = retrieve(&TaskQuery::new("q"), &t, &judge, &unbounded()).unwrap();
        let leaf_ids: BTreeSet<String> = t.leaves().iter().map(|n| n.id.clone()).collect();
        for id in &r.selected_leaf_ids {
            prop_assert!(leaf_ids.contains(id));
            let mut cur = Some(id.as_str());
            while let Some(c) = cur {
                if c != t.root_id() {
                    prop_assert!(!rejected(c), "{} survived although {} was rejected", id, c);
                }
                cur = t.parent(c).map(|p| p.id.as_str());
            }
        }
    }

    #[test]
    fn children_count_is_nodes_minus_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = trees::random_tree(&mut rng, 4, 5);
        let edges: usize = t.nodes().map(|n| n.children.len()).sum();
        prop_assert_eq!(edges, t.len() - 1);
        for leaf in t.leaves() {
            let mut steps = 0;
            let mut cur = leaf.id.as_str();
            while let Some(p) = t.parent(cur) {
                cur = p.id.as_str();
                steps += 1;
            }
            prop_assert_eq!(cur, t.root_id());
            prop_assert_eq!(steps, leaf.layer);
        }
        prop_assert_eq!(DocTree::from_json(&t.to_json()).unwrap(), t);
    }
}
