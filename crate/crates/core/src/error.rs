use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("cyclotomic order must be positive, got {0}")]
    InvalidOrder(usize),
    #[error("order {order} needs {order} coefficients, got {got}")]
    CoeffCount { order: usize, got: usize },
    #[error("cannot promote order {from} to order {to}")]
    BadPromotion { from: usize, to: usize },
    #[error("ring order {order} exceeds the limit of {limit}")]
    OrderTooLarge { order: usize, limit: usize },

    #[error("sequences must have at least one entry")]
    EmptySequence,
    #[error("sequence sets must contain at least one sequence")]
    EmptySet,
    #[error("sequence families must contain at least one set")]
    EmptyFamily,
    #[error("exact and approximate scalars mixed in {0}")]
    ModeMismatch(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("set size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("canonical form search supports at most {limit} columns, got {n}")]
    SearchBudget { n: usize, limit: usize },

    #[error("Walsh-Hadamard matrices need a power-of-two dimension, got {0}")]
    NotPowerOfTwo(usize),
    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, got: usize },
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("matrix is not unitary-like: inner product of rows {row} and {other} is {value}")]
    NotUnitaryLike { row: usize, other: usize, value: String },
    #[error("matrix is not unitary-like: inner product of columns {col} and {other} is {value}")]
    NotUnitaryLikeColumns { col: usize, other: usize, value: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("cell {cell} has {expected} members but its matrix or sub-family has size {got}")]
    DimensionMismatch { cell: usize, expected: usize, got: usize },
    #[error("cell {cell} mixes sequences of lengths {first} and {other}")]
    LengthInconsistentCell { cell: usize, first: usize, other: usize },
    #[error("cell {cell}: sequences {a} and {b} have different energies ({ea} vs {eb})")]
    EnergyMismatch {
        cell: usize,
        a: usize,
        b: usize,
        ea: String,
        eb: String,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("length {target} cannot be built by this framework for N = {n}: {reason}")]
    Unconstructible { n: usize, target: usize, reason: String },
    #[error(
        "targets {targets:?} need first factors summing to {needed} > N = {n}; jointly constructible subset: {feasible:?}"
    )]
    JointlyUnconstructible {
        n: usize,
        targets: Vec<usize>,
        needed: usize,
        feasible: Vec<usize>,
    },
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}
