use thiserror::Error;

/// Errors raised by the library. Numerical quantities are reported as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("chain is not irreducible")]
    NotIrreducible,

    #[error("singular linear system (null space is not one-dimensional)")]
    SingularSystem,

    #[error("step too large: density entry {value:e} at state {state} (t = {time})")]
    StepTooLarge { state: usize, value: f64, time: f64 },

    #[error("edge ({x},{y}) has a positive rate but zero reverse rate")]
    ZeroRate { x: usize, y: usize },

    #[error("density vanishes at state {0}")]
    ZeroDensity(usize),

    #[error("reference measure vanishes at state {0}")]
    ZeroReference(usize),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("edge fields live on different edge sets")]
    SupportMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("level-set correction has no solution (required per-edge dissipation {required:e})")]
    LevelSetInfeasible { required: f64 },

    #[error("force is not on the dissipation level set (defect {defect:e})")]
    NotOnLevelSet { defect: f64 },

    #[error("adjoint representation mismatch (defect {defect:e})")]
    RepresentationMismatch { defect: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("part {part} failed the midpoint convexity probe (violation {violation:e})")]
    NonConvexPart { part: usize, violation: f64 },

    #[error("hamiltonian is not reversible about the given potential (defect {defect:e})")]
    NotReversible { defect: f64 },

    #[error("grid supremum attained on the boundary; enlarge the range")]
    RangeClipped,

    #[error("trajectory has zero duration")]
    EmptyTrajectory,

    #[error("jump along ({x},{y}) has zero reverse rate")]
    InfiniteContribution { x: usize, y: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NotIrreducible => "NotIrreducible",
            Error::SingularSystem => "SingularSystem",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::ZeroRate { .. } => "ZeroRate",
            Error::ZeroDensity(_) => "ZeroDensity",
            Error::ZeroReference(_) => "ZeroReference",
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::SupportMismatch => "SupportMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LevelSetInfeasible { .. } => "LevelSetInfeasible",
            Error::NotOnLevelSet { .. } => "NotOnLevelSet",
            Error::RepresentationMismatch { .. } => "RepresentationMismatch",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NonConvexPart { .. } => "NonConvexPart",
            Error::NotReversible { .. } => "NotReversible",
            Error::RangeClipped => "RangeClipped",
            Error::EmptyTrajectory => "EmptyTrajectory",
            Error::InfiniteContribution { .. } => "InfiniteContribution",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
