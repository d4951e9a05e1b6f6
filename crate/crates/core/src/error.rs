use std::path::PathBuf;

use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arrival of {got} out of order: next vertex id must be {expected}")]
    NonContiguousVertex { expected: VertexId, got: VertexId },

    #[error("edge ({vertex}, {endpoint}) points forward: endpoints must precede the arriving vertex")]
    ForwardEdge { vertex: VertexId, endpoint: VertexId },

    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),

    #[error("edge ({u}, {v}) references a vertex outside 0..{vertex_count}")]
    EndpointOutOfRange {
        u: VertexId,
        v: VertexId,
        vertex_count: usize,
    },

    #[error("edge ({0}, {1}) joins two already-present vertices and cannot ride on an arrival")]
    EdgeBetweenExisting(VertexId, VertexId),

    #[error("vertex {0} is isolated and cannot be a cascade target")]
    IsolatedTarget(VertexId),

    #[error("step size is undefined for an empty influenced set")]
    EmptyInfluence,

    #[error("influenced set is invalid: {0}")]
    InvalidInfluenced(String),

    #[error("embedding dimension {k} needs at least {} vertices, graph has {vertices}", k + 1)]
    DimensionTooLarge { k: usize, vertices: usize },

    #[error("requested {requested} eigenpairs from a {size}x{size} operator")]
    BadEigenCount { requested: usize, size: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("classifier needs at least two classes in the training labels")]
    SingleClass,

    #[error("cannot form {clusters} clusters from {points} points")]
    TooManyClusters { clusters: usize, points: usize },

    #[error("{path}, line {line}: {message}", path = path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: file contains no edges")]
    EmptyFile(PathBuf),

    #[error("vertex {0} has no label")]
    MissingLabel(String),

    #[error("label file names unknown vertex {0}")]
    UnknownVertex(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for data problems, 3 for numerical failure.
    /// Usage errors (exit 1) are produced by the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } => 3,
            Error::Config(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonContiguousVertex { .. } => "non_contiguous_vertex",
            Error::ForwardEdge { .. } => "forward_edge",
            Error::SelfLoop(_) => "self_loop",
            Error::DuplicateEdge(..) => "duplicate_edge",
            Error::EndpointOutOfRange { .. } => "endpoint_out_of_range",
            Error::EdgeBetweenExisting(..) => "edge_between_existing",
            Error::IsolatedTarget(_) => "isolated_target",
            Error::EmptyInfluence => "empty_influence",
            Error::InvalidInfluenced(_) => "invalid_influenced",
            Error::DimensionTooLarge { .. } => "dimension_too_large",
            Error::BadEigenCount { .. } => "bad_eigen_count",
            Error::NoConvergence { .. } => "no_convergence",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::SingleClass => "single_class",
            Error::TooManyClusters { .. } => "too_many_clusters",
            Error::Parse { .. } => "parse",
            Error::EmptyFile(_) => "empty_file",
            Error::MissingLabel(_) => "missing_label",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
