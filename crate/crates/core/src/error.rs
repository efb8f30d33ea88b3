use std::fmt;

use thiserror::Error;

use crate::graph::EdgeId;

/// A failure scenario: either the loss of one vulnerable edge, or the
/// nominal case used when an instance has no vulnerable edges at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    Nominal,
    Edge(EdgeId),
}

impl Scenario {
    pub fn edge(self) -> Option<EdgeId> {
        match self {
            Scenario::Nominal => None,
            Scenario::Edge(e) => Some(e),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Nominal => f.write_str("nominal"),
            Scenario::Edge(e) => write!(f, "e{e}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum RapError {
    #[error("not balanced: {n_r} R-nodes vs {n_t} T-nodes")]
    NotBalanced { n_r: usize, n_t: usize },

    #[error("apply balanced_completion first: instance has {n_r} R-nodes and {n_t} T-nodes")]
    NeedsCompletion { n_r: usize, n_t: usize },

    #[error("no perfect matching")]
    NoPerfectMatching,

    #[error("infeasible at scenario {0}")]
    InfeasibleAt(Scenario),

    #[error("instance is infeasible (infeasible at scenario {0})")]
    InfeasibleInstance(Scenario),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("LP infeasible")]
    LpInfeasible,

    #[error("LP unbounded")]
    LpUnbounded,

    #[error("iteration limit reached after {0} iterations")]
    IterationLimit(usize),

    #[error("support has no perfect matching (remaining mass {remaining:.3e})")]
    SupportNoPerfectMatching { remaining: f64 },

    #[error("instance too large for exact solver: {edges} edges exceeds limit {limit}")]
    TooLarge { edges: usize, limit: usize },

    #[error("exact search aborted: {0}")]
    SearchLimit(String),

    #[error("component is not matching-covered")]
    NotMatchingCovered,

    #[error("reduction violated: {0}")]
    ReductionViolated(String),

    #[error("could not generate feasible instance after {0} attempts")]
    GenerationFailed(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = RapError> = std::result::Result<T, E>;
