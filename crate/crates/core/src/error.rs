use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("not a bijection: {0}")]
    NotABijection(String),
    #[error("trigger set is empty")]
    EmptyTriggers,
    #[error("base point {0} is not in the base set")]
    BasePointOutsideBase(usize),
    #[error("malformed input at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Search budget exhaustion. Never reported as a negative answer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetExceeded {
    #[error("search node budget of {0} exceeded")]
    Nodes(u64),
    #[error("search time budget of {0} ms exceeded")]
    Time(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("forced pairs are not a partial bijection at ({0}, {1})")]
    NotPartialBijection(usize, usize),
    #[error("pair ({0}, {1}) is both forced and forbidden")]
    ForcedAndForbidden(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("recursion depth {depth} exceeded on a {n}-vertex subproblem above the oracle fallback size")]
    DepthExhausted { depth: usize, n: usize },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl EngineError {
    pub fn is_resource_exhaustion(&self) -> bool {
        matches!(self, EngineError::DepthExhausted { .. } | EngineError::Budget(_))
    }
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("proven implication violated on {graph6}: {what}")]
    LemmaViolation { graph6: String, what: String },
    #[error("unknown conjecture id {0}")]
    UnknownConjecture(u8),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

impl From<OracleError> for EngineError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget(b) => EngineError::Budget(b),
            OracleError::Constraint(c) => EngineError::Constraint(c),
        }
    }
}

impl From<OracleError> for LabError {
    fn from(e: OracleError) -> Self {
        LabError::Engine(e.into())
    }
}
