use thiserror::Error;

use crate::feasibility::Certificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a torus: {0}")]
    NonTorus(String),
    #[error("side {side} of face {face} is not glued to anything")]
    UnpairedSide { face: usize, side: u8 },
    #[error("side {side} of face {face} appears in more than one gluing")]
    SideGluedTwice { face: usize, side: u8 },
    #[error("corner label {0} is used more than once")]
    DuplicateLabel(u32),
    #[error("corner label {0} is outside 1..=3m")]
    LabelOutOfRange(u32),
    #[error("face index {0} out of range")]
    FaceOutOfRange(usize),
    #[error("invalid transverse path: {0}")]
    InvalidPath(String),
    #[error("path is not closed")]
    NonClosedPath,
    #[error("meridian class ({0}, {1}) is not primitive")]
    NonPrimitiveMeridian(i64, i64),
    #[error("invalid angle data: {0}")]
    InvalidAngle(String),
    #[error("system is inconsistent (residual {residual:e}); the vertex-sum condition is violated")]
    InconsistentSystem { residual: f64 },
    #[error("kernel basis has rank {rank}, expected {expected}")]
    DegenerateBasis { rank: usize, expected: usize },
    #[error("symplectic relation violated: {0}")]
    NzViolation(String),
    #[error("arrow set is unbalanced at vertex {0}")]
    UnbalancedVertex(usize),
    #[error("volume maximization approached the boundary at face {face}")]
    BoundaryCollapse { face: usize },
    #[error("developing map does not close around vertex {vertex} (deviation {deviation:e})")]
    NonClosing { vertex: usize, deviation: f64 },
    #[error("no positive angle structure: {}", .0.summary())]
    Infeasible(Box<Certificate>),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
