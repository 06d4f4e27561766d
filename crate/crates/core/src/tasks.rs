//! Benchmark task registry: what each task asks, which graphs it runs on,
//! its arguments, answer shape, reference oracle and the documentation
//! entries a reference solution relies on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::answer::{AnswerTag, AnswerValue};
use crate::composite::{self, CompositePattern};
use crate::graph::{GraphInstance, GraphKind, NodeId};
use crate::oracles::{self, OracleError, OracleResult};

/// Kind of a task argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgKind {
    /// A node id present in the graph.
    Node,
    /// A positive integer (e.g. `k` of a top-k query).
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArgSpec {
    pub name: &'static str,
    pub kind: ArgKind,
    pub description: &'static str,
}

/// Graph shapes a task is generated on and defined for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphConstraints {
    pub directed: bool,
    pub weighted: bool,
    /// Generated graphs must be connected (weakly, when directed).
    pub connected: bool,
    /// Node-count range of the small-scale profile.
    pub small_nodes: (usize, usize),
    /// Node-count range of the large-scale profile; `None` when the task is
    /// not part of it.
    pub large_nodes: Option<(usize, usize)>,
}

impl GraphConstraints {
    pub fn kind(&self) -> GraphKind {
        GraphKind::new(self.directed, self.weighted)
    }
}

/// Which reference oracle labels a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Connectivity,
    ComponentCount,
    SccCount,
    ShortestPath,
    EulerianPath,
    Bipartite,
    Diameter,
    Regular,
    DistanceRegular,
    MaxFlow,
    MaxClique,
    MaxIndependentSet,
    Clustering,
    CommonNeighbors,
    ClusteringOnShortestPath,
    SccDiameters,
    SccFlowClustering,
    PairTightness,
    BridgeHubs,
    EndpointAwareFlow,
    EulerianOrClustering,
    ComponentDiameter,
    SccEulerian,
}

/// A benchmark task definition.
#[derive(Debug, Clone, Serialize)]
pub struct TaskSpec {
    pub task_id: &'static str,
    pub name: &'static str,
    pub kind: TaskKind,
    /// Natural-language task statement shown to solvers.
    pub description: &'static str,
    pub pattern: Option<CompositePattern>,
    /// Primitive task ids a composite task is built from.
    pub primitives: &'static [&'static str],
    pub constraints: GraphConstraints,
    pub args: &'static [ArgSpec],
    /// Node arguments that must name distinct nodes.
    pub distinct_nodes: bool,
    pub answer_tag: AnswerTag,
    /// Documentation leaves a reference solution uses (retrieval gold set).
    pub required_docs: &'static [&'static str],
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaskError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("no composite task combines {subtasks:?} with the {pattern:?} pattern")]
    IncoherentComposition {
        subtasks: Vec<String>,
        pattern: CompositePattern,
    },
}

impl TaskSpec {
    pub fn is_composite(&self) -> bool {
        self.pattern.is_some()
    }

    pub fn graph_kind(&self) -> GraphKind {
        self.constraints.kind()
    }

    /// NetworkX class name matching the task's graph kind.
    pub fn nx_graph_class(&self) -> &'static str {
        if self.constraints.directed {
            "DiGraph"
        } else {
            "Graph"
        }
    }

    /// One line per argument, `name` (kind): meaning.
    pub fn args_description(&self) -> String {
        if self.args.is_empty() {
            return "No additional arguments.".to_string();
        }
        self.args
            .iter()
            .map(|a| {
                let kind = match a.kind {
                    ArgKind::Node => "int node id",
                    ArgKind::Count => "positive int",
                };
                format!("`{}` ({kind}): {}", a.name, a.description)
            })
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Reference answer for `g` (arguments are read from `g.args`).
    pub fn label(&self, g: &GraphInstance) -> OracleResult<AnswerValue> {
        use AnswerValue as A;
        let node = |name: &str| -> OracleResult<NodeId> {
            g.arg_node(name)
                .ok_or_else(|| OracleError::MissingArg(name.to_string()))
        };
        Ok(match self.kind {
            TaskKind::Connectivity => A::Boolean(oracles::is_connected(g)?),
            TaskKind::ComponentCount => A::Integer(oracles::count_components(g)?),
            TaskKind::SccCount => A::Integer(oracles::count_scc(g)?),
            TaskKind::ShortestPath => A::Real(oracles::shortest_path_length(
                g,
                node("source")?,
                node("target")?,
            )?),
            TaskKind::EulerianPath => A::Boolean(oracles::has_eulerian_path(g)?),
            TaskKind::Bipartite => A::Boolean(oracles::is_bipartite(g)?),
            TaskKind::Diameter => A::Integer(oracles::diameter(g)?),
            TaskKind::Regular => A::Boolean(oracles::is_regular(g)?),
            TaskKind::DistanceRegular => A::Boolean(oracles::is_distance_regular(g)?),
            TaskKind::MaxFlow => A::Real(oracles::max_flow_value(
                g,
                node("source")?,
                node("target")?,
            )?),
            TaskKind::MaxClique => A::Integer(oracles::max_clique_size(g)?),
            TaskKind::MaxIndependentSet => A::Integer(oracles::max_independent_set_size(g)?),
            TaskKind::Clustering => A::Real(oracles::local_clustering(g, node("node")?)?),
            TaskKind::CommonNeighbors => {
                A::Integer(oracles::common_neighbors(g, node("u")?, node("v")?)?)
            }
            TaskKind::ClusteringOnShortestPath => {
                let (best, coeffs) =
                    composite::clustering_on_shortest_path(g, node("source")?, node("target")?)?;
                A::Tuple(vec![A::NodeId(best), A::RealList(coeffs)])
            }
            TaskKind::SccDiameters => A::RealList(
                composite::scc_diameters(g)?
                    .into_iter()
                    .map(|d| d as f64)
                    .collect(),
            ),
            TaskKind::SccFlowClustering => {
                A::node_set(composite::scc_flow_clustering_best(g, node("target")?)?)
            }
            TaskKind::PairTightness => A::Real(composite::pair_tightness(
                g,
                node("source")?,
                node("target")?,
            )?),
            TaskKind::BridgeHubs => {
                let k = g
                    .arg_usize("k")
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| OracleError::MissingArg("k".into()))?;
                A::LabeledMap(
                    composite::bridge_hubs(g, k)?
                        .into_iter()
                        .map(|(v, s)| (v.to_string(), s))
                        .collect(),
                )
            }
            TaskKind::EndpointAwareFlow => A::Real(composite::endpoint_aware_flow(
                g,
                node("source")?,
                node("target")?,
            )?),
            TaskKind::EulerianOrClustering => A::Real(composite::eulerian_or_clustering(
                g,
                node("source")?,
                node("target")?,
            )?),
            TaskKind::ComponentDiameter => {
                A::Integer(composite::connectivity_component_diameter(g)?)
            }
            TaskKind::SccEulerian => A::Integer(composite::scc_eulerian_score(g)?),
        })
    }
}

const SOURCE: ArgSpec = ArgSpec {
    name: "source",
    kind: ArgKind::Node,
    description: "the source node",
};
const TARGET: ArgSpec = ArgSpec {
    name: "target",
    kind: ArgKind::Node,
    description: "the target node",
};
const SINK: ArgSpec = ArgSpec {
    name: "target",
    kind: ArgKind::Node,
    description: "the sink node",
};
const NODE: ArgSpec = ArgSpec {
    name: "node",
    kind: ArgKind::Node,
    description: "the node whose coefficient is requested",
};
const PAIR_U: ArgSpec = ArgSpec {
    name: "u",
    kind: ArgKind::Node,
    description: "the first node",
};
const PAIR_V: ArgSpec = ArgSpec {
    name: "v",
    kind: ArgKind::Node,
    description: "the second node",
};
const TOP_K: ArgSpec = ArgSpec {
    name: "k",
    kind: ArgKind::Count,
    description: "how many top-ranked nodes to return",
};

const fn constraints(
    directed: bool,
    weighted: bool,
    connected: bool,
    small_nodes: (usize, usize),
    large_nodes: Option<(usize, usize)>,
) -> GraphConstraints {
    GraphConstraints {
        directed,
        weighted,
        connected,
        small_nodes,
        large_nodes,
    }
}

const LARGE: Option<(usize, usize)> = Some((200, 8000));
const LARGE_DENSE: Option<(usize, usize)> = Some((200, 1800));

static PRIMITIVES: [TaskSpec; 14] = [
    TaskSpec {
        task_id: "gcc",
        name: "Graph Connectivity Check",
        kind: TaskKind::Connectivity,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Determine whether the graph is connected, that is, whether every node can be reached from every other node. Return True if the graph is connected and False otherwise.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Boolean,
        required_docs: &["algorithms/components/is_connected"],
    },
    TaskSpec {
        task_id: "ccc",
        name: "Connected Components Counting",
        kind: TaskKind::ComponentCount,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Count the number of connected components of the graph. Return the count as an integer.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &["algorithms/components/number_connected_components"],
    },
    TaskSpec {
        task_id: "sccc",
        name: "Strongly Connected Components Counting",
        kind: TaskKind::SccCount,
        description: "You are given a directed, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a directed connection from node u to node v. Count the number of strongly connected components of the graph, where a strongly connected component is a maximal set of nodes in which every node can reach every other node along directed edges. Return the count as an integer.",
        pattern: None,
        primitives: &[],
        constraints: constraints(true, false, false, (4, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &["algorithms/components/number_strongly_connected_components"],
    },
    TaskSpec {
        task_id: "sp",
        name: "Shortest Path",
        kind: TaskKind::ShortestPath,
        description: "You are given a directed, weighted graph represented by an edge list, where each edge is a triple (u, v, w) indicating a directed connection from node u to node v with weight w. Given a source node source and a target node target, your task is to compute the shortest path from source to target. The shortest path is defined as a path that minimizes the sum of edge weights among all possible directed paths connecting the two nodes in the graph. Return only the length of the shortest path as a floating-point value.",
        pattern: None,
        primitives: &[],
        constraints: constraints(true, true, false, (2, 200), LARGE),
        args: &[SOURCE, TARGET],
        distinct_nodes: true,
        answer_tag: AnswerTag::Real,
        required_docs: &["algorithms/shortest_paths/shortest_path_length"],
    },
    TaskSpec {
        task_id: "epc",
        name: "Eulerian Path Check",
        kind: TaskKind::EulerianPath,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Determine whether the graph has an Eulerian path, that is, a trail that traverses every edge of the graph exactly once. Return True if such a path exists and False otherwise.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Boolean,
        required_docs: &["algorithms/euler/has_eulerian_path"],
    },
    TaskSpec {
        task_id: "gb",
        name: "Graph Bipartiteness",
        kind: TaskKind::Bipartite,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Determine whether the graph is bipartite, that is, whether its nodes can be split into two sets such that every edge joins nodes from different sets. Return True if the graph is bipartite and False otherwise.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Boolean,
        required_docs: &["algorithms/bipartite/is_bipartite"],
    },
    TaskSpec {
        task_id: "gd",
        name: "Graph Diameter",
        kind: TaskKind::Diameter,
        description: "You are given a connected, undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Compute the diameter of the graph, defined as the maximum number of edges on a shortest path between any two nodes. Return the diameter as an integer.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, true, (2, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &["algorithms/distance_measures/diameter"],
    },
    TaskSpec {
        task_id: "rc",
        name: "Regularity Check",
        kind: TaskKind::Regular,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Determine whether the graph is regular, that is, whether every node has the same degree. Return True if the graph is regular and False otherwise.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Boolean,
        required_docs: &["algorithms/regular/is_regular"],
    },
    TaskSpec {
        task_id: "drc",
        name: "Distance Regularity Check",
        kind: TaskKind::DistanceRegular,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Determine whether the graph is distance-regular: it must be connected and regular, and for any two nodes at distance i, the number of neighbours of the second node at distance i-1 and at distance i+1 from the first node must depend only on i. Return True if the graph is distance-regular and False otherwise.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (3, 200), LARGE),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Boolean,
        required_docs: &["algorithms/distance_regular/is_distance_regular"],
    },
    TaskSpec {
        task_id: "mf",
        name: "Maximum Flow",
        kind: TaskKind::MaxFlow,
        description: "You are given a directed, weighted graph represented by an edge list, where each edge is a triple (u, v, w) indicating a directed connection from node u to node v whose capacity is w. Given a source node source and a sink node target, compute the value of the maximum flow that can be sent from source to target without exceeding any edge capacity. Return the maximum flow value as a floating-point number.",
        pattern: None,
        primitives: &[],
        constraints: constraints(true, true, false, (2, 200), LARGE),
        args: &[SOURCE, SINK],
        distinct_nodes: true,
        answer_tag: AnswerTag::Real,
        required_docs: &["algorithms/flows/maximum_flow_value"],
    },
    TaskSpec {
        task_id: "mc",
        name: "Maximum Clique",
        kind: TaskKind::MaxClique,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Find the size of a maximum clique, that is, the largest set of nodes in which every two nodes are adjacent. Return the size as an integer.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), None),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &["algorithms/clique/max_weight_clique"],
    },
    TaskSpec {
        task_id: "mis",
        name: "Maximum Independent Set",
        kind: TaskKind::MaxIndependentSet,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Find the size of a maximum independent set, that is, the largest set of nodes no two of which are adjacent. Return the size as an integer.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (2, 200), Some((200, 400))),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &["operators/complement", "algorithms/clique/max_weight_clique"],
    },
    TaskSpec {
        task_id: "cc",
        name: "Clustering Coefficient",
        kind: TaskKind::Clustering,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Given a node node, compute its local clustering coefficient: the fraction of pairs of its neighbours that are themselves connected by an edge (0 when the node has fewer than two neighbours). Return the coefficient as a floating-point value.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (13, 200), LARGE),
        args: &[NODE],
        distinct_nodes: false,
        answer_tag: AnswerTag::Real,
        required_docs: &["algorithms/cluster/clustering"],
    },
    TaskSpec {
        task_id: "cn",
        name: "Common Neighbors",
        kind: TaskKind::CommonNeighbors,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. Given two nodes u and v, count the nodes that are adjacent to both u and v. Return the count as an integer.",
        pattern: None,
        primitives: &[],
        constraints: constraints(false, false, false, (16, 200), LARGE_DENSE),
        args: &[PAIR_U, PAIR_V],
        distinct_nodes: true,
        answer_tag: AnswerTag::Integer,
        required_docs: &["functions/common_neighbors"],
    },
];

static COMPOSITES: [TaskSpec; 9] = [
    TaskSpec {
        task_id: "clustering_shortest_path",
        name: "Clustering on a Shortest Path",
        kind: TaskKind::ClusteringOnShortestPath,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v, together with two nodes source and target. Take the shortest path from source to target that is lexicographically smallest as a sequence of node ids. For every node on this path compute its local clustering coefficient, and identify the node on the path with the highest coefficient, breaking ties in favour of the node closer to source along the path. Return a pair (node, coefficients) where coefficients lists the clustering coefficient of every node on the path in path order.",
        pattern: Some(CompositePattern::Sequential),
        primitives: &["sp", "cc"],
        constraints: constraints(false, false, false, (2, 200), None),
        args: &[SOURCE, TARGET],
        distinct_nodes: true,
        answer_tag: AnswerTag::Tuple,
        required_docs: &["algorithms/shortest_paths/shortest_path", "algorithms/cluster/clustering"],
    },
    TaskSpec {
        task_id: "scc_diameter",
        name: "Strongly Connected Component Diameters",
        kind: TaskKind::SccDiameters,
        description: "You are given a directed, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a directed connection from node u to node v. Compute all strongly connected components of the graph. For each component, take the subgraph induced by its nodes, treat it as an undirected graph, and compute its diameter (a component with a single node has diameter 0). Return the list of diameters, ordering the components by their smallest node id.",
        pattern: Some(CompositePattern::Sequential),
        primitives: &["sccc", "gd"],
        constraints: constraints(true, false, false, (4, 200), None),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::RealList,
        required_docs: &[
            "algorithms/components/strongly_connected_components",
            "operators/to_undirected",
            "algorithms/distance_measures/diameter",
        ],
    },
    TaskSpec {
        task_id: "scc_flow_clustering",
        name: "Component Flow and Clustering Score",
        kind: TaskKind::SccFlowClustering,
        description: "You are given a directed, weighted graph represented by an edge list, where each edge is a triple (u, v, w) indicating a directed connection from node u to node v with capacity w, and a sink node target. For every strongly connected component C, let s_C be the node of C with the smallest id, compute the maximum flow value from s_C to target (zero when s_C is target), and compute the local clustering coefficient of s_C in the undirected version of the graph. Score the component as flow * (1 + clustering). Return the nodes of the component with the highest score as a list; on equal scores prefer the component whose smallest node id is smaller.",
        pattern: Some(CompositePattern::Sequential),
        primitives: &["sccc", "mf", "cc"],
        constraints: constraints(true, true, false, (2, 200), None),
        args: &[SINK],
        distinct_nodes: false,
        answer_tag: AnswerTag::NodeSet,
        required_docs: &[
            "algorithms/components/strongly_connected_components",
            "algorithms/flows/maximum_flow_value",
            "algorithms/cluster/clustering",
            "operators/to_undirected",
        ],
    },
    TaskSpec {
        task_id: "pair_tightness",
        name: "Pair Tightness Score",
        kind: TaskKind::PairTightness,
        description: "You are given an undirected, weighted graph represented by an edge list, where each edge is a triple (u, v, w) indicating a connection between node u and node v with weight w, and two nodes source and target. Compute the weighted shortest-path distance d between source and target, the number of common neighbours N of the two nodes, and their local clustering coefficients C(source) and C(target) (ignoring weights). Return the tightness score (N + (C(source) + C(target)) / 2) / (1 + d) as a floating-point value.",
        pattern: Some(CompositePattern::Parallel),
        primitives: &["sp", "cn", "cc"],
        constraints: constraints(false, true, false, (3, 200), None),
        args: &[SOURCE, TARGET],
        distinct_nodes: true,
        answer_tag: AnswerTag::Real,
        required_docs: &[
            "algorithms/shortest_paths/shortest_path_length",
            "functions/common_neighbors",
            "algorithms/cluster/clustering",
        ],
    },
    TaskSpec {
        task_id: "bridge_hub",
        name: "Bridge Hub Identification",
        kind: TaskKind::BridgeHubs,
        description: "You are given a connected, undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v, and an integer k. For every node v compute its local clustering coefficient C(v) and the average shortest-path distance (number of edges) from v to all other nodes, and define the bridge-hub score S(v) = (1 - C(v)) / average distance. Return the k nodes with the highest scores (ties in favour of smaller node ids) as a list of (node, score) pairs.",
        pattern: Some(CompositePattern::Parallel),
        primitives: &["cc", "sp"],
        constraints: constraints(false, false, true, (2, 200), None),
        args: &[TOP_K],
        distinct_nodes: false,
        answer_tag: AnswerTag::LabeledMap,
        required_docs: &[
            "algorithms/cluster/clustering",
            "algorithms/shortest_paths/single_source_shortest_path_length",
        ],
    },
    TaskSpec {
        task_id: "endpoint_aware_flow",
        name: "Endpoint-Aware Flow",
        kind: TaskKind::EndpointAwareFlow,
        description: "You are given a directed, weighted graph represented by an edge list, where each edge is a triple (u, v, w) indicating a directed connection from node u to node v with capacity w, a source node source and a sink node target. Compute the maximum flow value F from source to target and the local clustering coefficients C(source) and C(target) in the undirected version of the graph. Return the endpoint-aware flow score F * (1 + (C(source) + C(target)) / 2) as a floating-point value.",
        pattern: Some(CompositePattern::Parallel),
        primitives: &["mf", "cc"],
        constraints: constraints(true, true, false, (8, 198), None),
        args: &[SOURCE, SINK],
        distinct_nodes: true,
        answer_tag: AnswerTag::Real,
        required_docs: &[
            "algorithms/flows/maximum_flow_value",
            "algorithms/cluster/clustering",
            "operators/to_undirected",
        ],
    },
    TaskSpec {
        task_id: "eulerian_diameter",
        name: "Eulerian Path then Diameter",
        kind: TaskKind::EulerianOrClustering,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v, and two nodes source and target. If the graph has an Eulerian path (a trail using every edge exactly once, which requires the graph to be connected), return the diameter of the graph. Otherwise return the larger of the local clustering coefficients of source and target. Return the result as a floating-point value.",
        pattern: Some(CompositePattern::Conditional),
        primitives: &["epc", "gd", "cc"],
        constraints: constraints(false, false, false, (2, 200), None),
        args: &[SOURCE, TARGET],
        distinct_nodes: true,
        answer_tag: AnswerTag::Real,
        required_docs: &[
            "algorithms/euler/has_eulerian_path",
            "algorithms/distance_measures/diameter",
            "algorithms/cluster/clustering",
        ],
    },
    TaskSpec {
        task_id: "component_diameter",
        name: "Connectivity then Component Diameter",
        kind: TaskKind::ComponentDiameter,
        description: "You are given an undirected, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a connection between node u and node v. If the graph is connected, return its diameter. Otherwise find the largest connected component by number of nodes (on ties, the one containing the smallest node id) and return the diameter of that component only. Return the diameter as an integer.",
        pattern: Some(CompositePattern::Conditional),
        primitives: &["gcc", "ccc", "gd"],
        constraints: constraints(false, false, false, (2, 200), None),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &[
            "algorithms/components/is_connected",
            "algorithms/components/connected_components",
            "algorithms/distance_measures/diameter",
        ],
    },
    TaskSpec {
        task_id: "scc_eulerian",
        name: "Strongly Connected Components and Eulerian Check",
        kind: TaskKind::SccEulerian,
        description: "You are given a directed, unweighted graph represented by an edge list, where each edge is a pair (u, v) indicating a directed connection from node u to node v. An Eulerian path is a directed trail that traverses every edge of the graph exactly once. A strongly connected component is a maximal set of nodes such that any two nodes in it can reach each other along directed paths. If the graph admits an Eulerian path, the score is the number of nodes in the largest strongly connected component; otherwise the score is the total number of strongly connected components. Return the score as an integer.",
        pattern: Some(CompositePattern::Conditional),
        primitives: &["epc", "sccc"],
        constraints: constraints(true, false, false, (4, 200), None),
        args: &[],
        distinct_nodes: false,
        answer_tag: AnswerTag::Integer,
        required_docs: &[
            "algorithms/euler/has_eulerian_path",
            "algorithms/components/strongly_connected_components",
        ],
    },
];

/// The fourteen primitive tasks.
pub fn primitive_tasks() -> &'static [TaskSpec] {
    &PRIMITIVES
}

/// The nine composite tasks.
pub fn composite_tasks() -> &'static [TaskSpec] {
    &COMPOSITES
}

/// Every task, primitives first.
pub fn all_tasks() -> impl Iterator<Item = &'static TaskSpec> {
    PRIMITIVES.iter().chain(COMPOSITES.iter())
}

pub fn task_by_id(task_id: &str) -> Result<&'static TaskSpec, TaskError> {
    all_tasks()
        .find(|t| t.task_id == task_id)
        .ok_or_else(|| TaskError::UnknownTask(task_id.to_string()))
}

/// The composite task that combines exactly `subtasks` (in any order) with
/// `pattern`.
pub fn compose_task(
    subtasks: &[&str],
    pattern: CompositePattern,
) -> Result<&'static TaskSpec, TaskError> {
    for id in subtasks {
        if !PRIMITIVES.iter().any(|t| t.task_id == *id) {
            return Err(TaskError::UnknownTask(id.to_string()));
        }
    }
    let mut wanted: Vec<&str> = subtasks.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    COMPOSITES
        .iter()
        .find(|t| {
            let mut have: Vec<&str> = t.primitives.to_vec();
            have.sort_unstable();
            t.pattern == Some(pattern) && have == wanted
        })
        .ok_or_else(|| TaskError::IncoherentComposition {
            subtasks: subtasks.iter().map(|s| s.to_string()).collect(),
            pattern,
        })
}
