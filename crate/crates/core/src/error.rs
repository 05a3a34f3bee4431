use thiserror::Error;

/// Errors raised while building, parsing or transforming machines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown timer `{0}`")]
    UnknownTimer(String),
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("unknown output `{0}`")]
    UnknownOutput(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("name `{0}` is used both as a state and as a timer")]
    NameClash(String),
    #[error("state `{state}` has two transitions on `{action}`")]
    Nondeterministic { state: String, action: String },
    #[error("update of timer `{timer}` must use a positive constant")]
    ZeroConstant { timer: String },
    #[error("timeout at position {position} has no preceding start")]
    UncausedTimeout { position: usize },
    #[error("machine is not complete: state `{state}` lacks `{action}`")]
    Incomplete { state: String, action: String },
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Errors raised by the observation tree when the teacher misbehaves or a
/// precondition is violated.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("node {node} already has a transition on {action}")]
    EdgeExists { node: usize, action: String },
    #[error("parent of node {0} is not explored")]
    ParentNotExplored(usize),
    #[error("teacher contract violated: {0}")]
    TeacherContract(String),
}

/// Errors raised by the learner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no equivalent hypothesis after {rounds} rounds")]
    RoundLimit {
        rounds: usize,
        stats: crate::teacher::QueryStats,
    },
    #[error("observation tree exceeded the depth bound {0}")]
    DepthLimit(usize),
    #[error("learner made no progress: {0}")]
    Stuck(String),
}
