use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("triangle {triangle} has non-positive signed area {area:e}")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("vertex index {index} out of range in triangle {triangle}")]
    VertexOutOfRange { triangle: usize, index: usize },

    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),

    #[error("mark for triangle {triangle} is invalid: {reason}")]
    InvalidMark {
        triangle: usize,
        reason: &'static str,
    },

    #[error("all error indicators vanish; nothing to mark")]
    ZeroIndicators,

    #[error("linear solve failed: {reason} (best relative residual {residual:e})")]
    Solve { reason: String, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
