//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by design construction, model inversion and optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Pauli index {0} outside 1..=15")]
    PauliIndexOutOfRange(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("setting {0} contains no CNOT gate")]
    NoCnot(usize),

    #[error("setting {0} has an empty gate list")]
    EmptyGateList(usize),

    #[error("design has no settings")]
    EmptyDesign,

    #[error("angle parameter reference #{0} is not declared by the design")]
    UnresolvedParameter(usize),

    #[error("duplicate angle parameter name `{0}`")]
    DuplicateParameter(String),

    #[error("angle {value} for `{name}` outside [0, 2pi]")]
    AngleOutOfBounds { name: String, value: f64 },

    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("design matrix is singular; the inverse problem has no solution")]
    SingularModel,

    #[error("response {0} outside [-1, 1]")]
    ResponseOutOfRange(f64),

    #[error("readout fidelity {0} outside [0, 1]")]
    FidelityOutOfRange(f64),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("invalid optimizer configuration: {0}")]
    BadOptimizeConfig(&'static str),

    #[error("all {0} optimizer starts ended on singular configurations")]
    NoFiniteMinimum(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
