//! Reference NetworkX programs, one per benchmark task. They are what a
//! competent coder is expected to write and back the mock model and the
//! end-to-end tests.

const SOLUTIONS: &[(&str, &str)] = &[
    (
        "bridge_hub",
        include_str!("../assets/solutions/bridge_hub.py"),
    ),
    ("cc", include_str!("../assets/solutions/cc.py")),
    ("ccc", include_str!("../assets/solutions/ccc.py")),
    (
        "clustering_shortest_path",
        include_str!("../assets/solutions/clustering_shortest_path.py"),
    ),
    ("cn", include_str!("../assets/solutions/cn.py")),
    (
        "component_diameter",
        include_str!("../assets/solutions/component_diameter.py"),
    ),
    ("drc", include_str!("../assets/solutions/drc.py")),
    (
        "endpoint_aware_flow",
        include_str!("../assets/solutions/endpoint_aware_flow.py"),
    ),
    ("epc", include_str!("../assets/solutions/epc.py")),
    (
        "eulerian_diameter",
        include_str!("../assets/solutions/eulerian_diameter.py"),
    ),
    ("gb", include_str!("../assets/solutions/gb.py")),
    ("gcc", include_str!("../assets/solutions/gcc.py")),
    ("gd", include_str!("../assets/solutions/gd.py")),
    ("mc", include_str!("../assets/solutions/mc.py")),
    ("mf", include_str!("../assets/solutions/mf.py")),
    ("mis", include_str!("../assets/solutions/mis.py")),
    (
        "pair_tightness",
        include_str!("../assets/solutions/pair_tightness.py"),
    ),
    ("rc", include_str!("../assets/solutions/rc.py")),
    (
        "scc_diameter",
        include_str!("../assets/solutions/scc_diameter.py"),
    ),
    (
        "scc_eulerian",
        include_str!("../assets/solutions/scc_eulerian.py"),
    ),
    (
        "scc_flow_clustering",
        include_str!("../assets/solutions/scc_flow_clustering.py"),
    ),
    ("sccc", include_str!("../assets/solutions/sccc.py")),
    ("sp", include_str!("../assets/solutions/sp.py")),
];

/// Reference program of `task_id`.
pub fn reference_solution(task_id: &str) -> Option<&'static str> {
    SOLUTIONS
        .iter()
        .find(|(id, _)| *id == task_id)
        .map(|(_, src)| *src)
}

/// Task ids with a reference program, in id order.
pub fn solution_task_ids() -> impl Iterator<Item = &'static str> {
    SOLUTIONS.iter().map(|(id, _)| *id)
}
