use thiserror::Error;

/// Mesh validation failures, each naming the offending element.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeshError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("triangle {triangle} references vertex {vertex} but only {count} vertices exist")]
    IndexOutOfRange { triangle: usize, vertex: usize, count: usize },
    #[error("surface is not closed: {} boundary edge(s) {:?}", boundary_edges.len(), boundary_edges)]
    OpenSurface { boundary_edges: Vec<(usize, usize)> },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("inconsistent orientation across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),
    #[error("triangle {index} is degenerate (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("vertex {index} is off the unit sphere (norm {norm})")]
    VertexOffSphere { index: usize, norm: f64 },
    #[error("vertex {index} lies outside the fundamental domain")]
    VertexOutsideDomain { index: usize },
    #[error("triangle {index} unwraps to diameter {diameter}, must stay below {limit}; use a finer mesh")]
    TorusTriangleTooLarge { index: usize, diameter: f64, limit: f64 },
    #[error("vertex {index} has {found} coordinates, ambient chart needs {expected}")]
    WrongDimension { index: usize, found: usize, expected: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("flow stopped at t = {time}: {reason}")]
    FlowStopped { time: f64, reason: String },
    #[error("configuration error in `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
