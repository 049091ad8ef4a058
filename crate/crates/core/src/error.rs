use thiserror::Error;

/// Errors raised while building or validating hypergraphs and colorings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("edge {edge} has {found} vertices, expected {expected}")]
    WrongEdgeSize {
        edge: usize,
        expected: usize,
        found: usize,
    },
    #[error("edge {edge} repeats vertex {vertex}")]
    DuplicateVertexInEdge { edge: usize, vertex: usize },
    #[error("edge {edge} is not sorted ascending")]
    UnsortedEdge { edge: usize },
    #[error("edge {edge} contains vertex {vertex} outside [0, {vertex_count})")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("edges {first} and {second} are equal")]
    DuplicateEdge { first: usize, second: usize },
    #[error("uniformity must be positive")]
    ZeroUniformity,
    #[error("coloring covers {found} vertices, hypergraph has {expected}")]
    ColoringLength { expected: usize, found: usize },
    #[error("vertex {vertex} has color {color}, only {color_count} colors available")]
    ColorOutOfRange {
        vertex: usize,
        color: u32,
        color_count: u32,
    },
    #[error("trimming makes edges {first} and {second} coincide")]
    TrimCollision { first: usize, second: usize },
    #[error("cannot trim a {uniformity}-uniform hypergraph {rounds} times")]
    TrimTooDeep { uniformity: usize, rounds: usize },
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] HypergraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("gave up after {attempts} attempts of {rejections} consecutive rejections; best attempt placed {accepted} of {target} edges")]
    TooDense {
        rejections: u64,
        attempts: u32,
        accepted: usize,
        target: usize,
    },
    #[error("complete hypergraph would have {0} edges, limit is 1000000")]
    TooLarge(u128),
}

/// Failures of the witness-tree machinery. A `StructuralViolation` means a
/// property that must hold for every h-tree did not, which is a bug either in
/// the engine or in the tree code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("trace succeeded, there is no failure witness")]
    NoWitness,
    #[error("edge {0} is not monochromatic in the final coloring")]
    NotMonochromatic(usize),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("structural violation ({property}): {detail}")]
    StructuralViolation {
        property: &'static str,
        detail: String,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl WitnessError {
    pub(crate) fn violation(property: &'static str, detail: impl Into<String>) -> Self {
        WitnessError::StructuralViolation {
            property,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
    #[error("edge {0} has a single vertex, no proper coloring exists")]
    Uncolorable(usize),
    #[error("need at least 1 color")]
    NoColors,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("invalid certificate parameters: {0}")]
    InvalidParams(String),
    #[error("no certified n found below {0}")]
    SearchExhausted(u64),
}
