use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("state cap exceeded: machine would need more than {cap} states")]
    StateCapExceeded { cap: usize },

    #[error("point cap exceeded: level {level} of the {degree}-ary tree has {points} points (cap {cap})")]
    PointCapExceeded {
        degree: usize,
        level: usize,
        points: u128,
        cap: usize,
    },

    #[error("vertex entry {entry} out of range 1..{degree}")]
    VertexOutOfRange { entry: usize, degree: usize },

    #[error("vertex {vertex} is not above level {level}")]
    VertexTooDeep { vertex: String, level: usize },

    #[error("level {inner} exceeds level {outer}")]
    LevelOrder { inner: usize, outer: usize },

    #[error("permutation does not preserve the block structure of the {arity}-ary tree of depth {depth}")]
    NotTreeAutomorphism { arity: usize, depth: usize },

    #[error("{what} is not contained in the ambient group")]
    NotInAmbient { what: String },

    #[error("not a subgroup: generator {index} of the second group is not in the first")]
    NotASubgroup { index: usize },

    #[error("point {point} out of range 1..{degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("{pos}: {message}")]
    Parse { pos: Pos, message: String },

    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdentifier { pos: Pos, name: String },

    #[error("unknown name `{0}`")]
    UnresolvedName(String),

    #[error("lower central series index must be at least 1")]
    GammaIndexZero,

    #[error("element moves the first level")]
    MovesFirstLevel,

    #[error("operation requires the binary tree, found degree {0}")]
    NotBinary(usize),

    #[error("theorem check requires L-generators for hypotheses (iv) and (v)")]
    MissingLGenerators,

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(pos: Pos, message: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            message: message.into(),
        }
    }
}
