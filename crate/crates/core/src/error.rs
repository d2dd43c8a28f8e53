use thiserror::Error;

/// Errors raised while reading or building a problem instance.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown {kind} id `{id}` referenced by {context}")]
    UnknownId {
        kind: &'static str,
        id: String,
        context: String,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("negative value {value} for {field}")]
    Negative { field: String, value: f64 },
    #[error("self-loop on algorithm `{0}`")]
    SelfLoop(String),
    #[error("invalid option {field}: {reason}")]
    BadOption { field: &'static str, reason: String },
}

/// Errors raised by the graph layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("cycle detected among {0:?}")]
    Cycle(Vec<String>),
    #[error("flow explosion: {count} execution flows exceed the cap of {cap}")]
    FlowExplosion { count: u128, cap: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unreachable pair: no declared path from `{from}` to `{to}`")]
    Unreachable { from: String, to: String },
}

/// Top-level error for solver operations.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Comm(#[from] CommError),
    #[error("instance is not admissible:\n{0}")]
    Invalid(String),
    #[error("infeasible placement: {0}")]
    Infeasible(String),
    #[error("enumeration of {count} placements exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("step partition stalled with {remaining} algorithms left")]
    PartitionStall { remaining: usize },
}

impl SolveError {
    /// Whether the error stems from a configured size cap.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            SolveError::CapExceeded { .. } | SolveError::Lattice(LatticeError::FlowExplosion { .. })
        )
    }
}
