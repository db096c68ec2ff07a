use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed adjacency matrix: {0}")]
    MalformedMatrix(String),
    #[error("vertex {vertex} out of range (graph has {num_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("edge {edge} out of range (graph has {num_edges} edges)")]
    EdgeOutOfRange { edge: usize, num_edges: usize },
    #[error("edge {0} is a loop")]
    LoopEdge(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("edges must be distinct")]
    SameEdge,
    #[error("half-edges {0} and {1} are the two halves of one edge")]
    PartnerHalfEdges(usize, usize),
    #[error("half-edges must be distinct")]
    SameHalfEdge,
    #[error("half-edges {0} and {1} sit at the same vertex")]
    SameVertex(usize, usize),
    #[error("half-edge {half_edge} out of range (graph has {num_half_edges} half-edges)")]
    HalfEdgeOutOfRange { half_edge: usize, num_half_edges: usize },
    #[error("not an isomorphism: {0}")]
    InvalidIsomorphism(String),
    #[error("size bound exceeded: {0}")]
    SizeBound(String),
    #[error("degree {degree} out of range for rank {rank} (expected 2..={max})")]
    DegreeOutOfRange { rank: usize, degree: usize, max: usize },
    #[error("rank {0} is not supported (minimum is 2)")]
    RankOutOfRange(usize),
    #[error("prime {p} is too small for entries of magnitude {max_entry}")]
    PrimeTooSmall { p: u64, max_entry: u64 },
    #[error("input has a cut vertex")]
    HasCutVertex,
    #[error("input has no cut vertex")]
    NoCutVertex,
    #[error("input has a separating edge")]
    HasBridge,
    #[error("input is zero in the graph complex")]
    ZeroGraph,
    #[error("graph is missing from the target basis: {0}")]
    MissingBasisElement(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
