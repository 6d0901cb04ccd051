use thiserror::Error;

/// Which sub-check of a block-structure verification failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureCheck {
    Isometry,
    StateBlockDiagonal,
    StateFactorization,
    ChannelInvariance,
    ChannelFactorization,
    LeftUnitary,
    RightBistochastic,
    AlgebraForm,
}

impl std::fmt::Display for StructureCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            StructureCheck::Isometry => "isometry",
            StructureCheck::StateBlockDiagonal => "state block diagonal",
            StructureCheck::StateFactorization => "state factorization",
            StructureCheck::ChannelInvariance => "channel block invariance",
            StructureCheck::ChannelFactorization => "channel factorization",
            StructureCheck::LeftUnitary => "left factor unitary",
            StructureCheck::RightBistochastic => "right factor bistochastic",
            StructureCheck::AlgebraForm => "algebra form",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not one (got {0})")]
    TraceNotOne(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("channel has no Kraus operators")]
    EmptyKraus,

    #[error("channel increases trace (largest eigenvalue of sum M^dag M is {0})")]
    TraceIncreasing(f64),

    #[error("channel is not stochastic (trace-preservation residual {0:e})")]
    NotStochastic(f64),

    #[error("channel is not bistochastic (trace residual {trace_residual:e}, unital residual {unital_residual:e})")]
    NotBistochastic {
        trace_residual: f64,
        unital_residual: f64,
    },

    #[error("support of the first state is not contained in the support of the second (residual {0:e})")]
    SupportViolation(f64),

    #[error("span is not a *-algebra (closure residual {0:e})")]
    NotAnAlgebra(f64),

    #[error("eigenvalue grouping stayed ambiguous after {0} attempts")]
    AmbiguousGrouping(usize),

    #[error("block structure mismatch in {check} check (residual {residual:e})")]
    StructureMismatch { check: StructureCheck, residual: f64 },

    #[error("invalid block spec: {0}")]
    InvalidSpec(String),

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("state is not diagonal in the computational basis (off-diagonal mass {0:e})")]
    NotDiagonal(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
