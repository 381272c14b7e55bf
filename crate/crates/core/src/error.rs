use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity {n} outside supported range 1..={max}")]
    Arity { n: usize, max: usize },
    #[error("coordinate {i} out of range 1..={n}")]
    Coordinate { i: usize, n: usize },
    #[error("value {value} outside codomain of size {codomain}")]
    Codomain { value: u32, codomain: u32 },
    #[error("invalid restriction: {0}")]
    Restriction(String),
    #[error("invalid local function: {0}")]
    LocalFunction(String),
    #[error("invalid composition: {0}")]
    Composition(String),
    #[error("outer function undefined on inner-output vector {key}")]
    UnmappedKey { key: String },
    #[error("inner-output map does not refine target fibers: {x} and {y} collide")]
    Conflict { x: String, y: String },
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("invalid branching program: {0}")]
    BranchingProgram(String),
    #[error("sizing limit exceeded: {0}")]
    Sizing(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("reduction infeasible: {0}")]
    Infeasible(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
