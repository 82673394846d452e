//! The λ-calculus sector: terms, their encoding as λ-graphs, graph
//! reduction, readback, and a substitution-based reference evaluator.

pub mod church;
mod encode;
mod readback;
mod reduce;
mod term;

pub use encode::{encode_term, is_lambda_graph, LambdaGraphReport, LambdaViolation, ROOT_LEAF};
pub use readback::readback;
pub use reduce::{reduce_graph, GraphReduction};
pub use term::{
    alpha_eq, normal_order_step, parse_term, reference_eval, reference_eval_counted, substitute,
    LambdaTerm, ReduceStatus,
};

use thiserror::Error;

/// Default β-step budget for graph reduction.
pub const DEFAULT_FUEL: u64 = 10_000;

use crate::moves::MoveError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("not a λ-graph: {0}")]
    NotALambdaGraph(String),
    #[error("readback failed: {0}")]
    Readback(String),
    #[error("reduction is stuck: {0}")]
    Stuck(String),
    #[error(transparent)]
    Move(#[from] MoveError),
}

impl From<crate::graph::GraphError> for LambdaError {
    fn from(e: crate::graph::GraphError) -> Self {
        LambdaError::Move(MoveError::Graph(e))
    }
}
