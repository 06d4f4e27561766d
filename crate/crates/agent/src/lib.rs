//! Agent side of the pipeline: model gateway, documentation tree and its
//! retrieval agent, the self-debugging coding agent, and sandboxed execution
//! of generated programs.

pub mod coding;
pub mod doctree;
pub mod executor;
pub mod gateway;
pub mod mock;
pub mod parse;
pub mod pipeline;
pub mod prompts;
pub mod retrieval;
pub mod solutions;
pub mod tfidf;
