use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),

    #[error("total degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("polynomial rings differ: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contraction of a degree-0 form")]
    DegreeZero,

    #[error("supported section and bundle map have different base maps")]
    BaseMapMismatch,

    #[error("algebroid mismatch: {0}")]
    AlgebroidMismatch(String),

    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),

    #[error("operation needs a single-piece homotopy, got {0} pieces")]
    MultiPiece(usize),

    #[error("invalid structure data: {0}")]
    InvalidStructure(String),

    #[error("basis expansion failed: residual {0:e}")]
    BasisExpansion(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
