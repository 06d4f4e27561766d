//! Graph model, exact reference oracles, benchmark generation and metrics.

pub mod answer;
pub mod composite;
pub mod dataset;
pub mod eval;
pub mod graph;
pub mod oracles;
pub mod tasks;

pub use answer::{answers_equal, AnswerTag, AnswerValue, Tolerance};
pub use graph::{Edge, GraphError, GraphInstance, GraphKind, Indexed, NodeId};
