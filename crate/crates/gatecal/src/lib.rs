//! Statistical design of two-qubit gate calibration experiments.
//!
//! A perturbed CNOT is modeled as the ideal gate followed by a coherent
//! error operator `E(p)` with 15 real parameters in the two-qubit Pauli
//! basis. Short gate sequences ending in a Pauli measurement ("settings")
//! respond linearly to `p` to first order; inverting the linearized model
//! recovers the error parameters from measured responses.
//!
//! This crate evaluates how well a set of settings determines `p`:
//!
//! - [`design::Design`] describes settings with literal or parameterized
//!   rotation angles;
//! - [`model::build_model`] computes baseline responses and the analytic
//!   design matrix, with conditioning metadata;
//! - [`stats`] turns binomial measurement noise into the mean-squared
//!   distance `<D^2> = Tr(L^-1 Sigma L^-T)` of the estimated parameters,
//!   with or without an asymmetric binary readout channel;
//! - [`optimize`] minimizes `<D^2> . N` over the rotation angles under box
//!   constraints with seeded multistart, and verifies the symmetry
//!   transformations of optimal angle sets;
//! - [`montecarlo`] validates the covariance model by finite-shot binomial
//!   sampling and runs an abstract closed-loop calibration simulation.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the double-precision
//! versions used by the command-line tools.

pub mod design;
pub mod designs;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod pauli;
mod response;
pub mod scalar;
pub mod stats;

pub use design::Design;
pub use error::{Error, Result};
pub use gates::{
    cnot, error_operator_exact, error_operator_linear, perturbed_cnot, rotation_gate, AngleExpr,
    Axis, GateToken, Measurement, ParamId, Qubit, Setting,
};
pub use model::{
    build_model, build_model_at, finite_difference_model, singularity_report, solve_inverse,
    ResponseModel, SingularityReport,
};
pub use montecarlo::{
    calibration_loop, empirical_msd, gate_infidelity, sample_responses, sampling_report,
    CalibrationLoopConfig, CalibrationTrace, EmpiricalMsd, IterationRecord, LoopStatus,
    SampleConfig, SamplingReport,
};
pub use optimize::{
    fold, minimize, objective, reflect, refine, snap_to_structure, verify_degeneracy,
    DegeneracyReport, OptimizeConfig, OptimizeResult, ReflectScope, StartSummary,
};
pub use pauli::{pauli_tau, project_error_vector, ErrorVector, PauliIndex, PAULI_COUNT};
pub use scalar::Real;
pub use stats::{
    apply_channel_model, apply_channel_response, covariance, mean_squared_distance,
    mean_squared_distance_imperfect, ReadoutChannel, ShotCount,
};

/// Double-precision aliases for the main public types.
pub type Design64 = Design<f64>;
pub type ErrorVector64 = ErrorVector<f64>;
pub type ResponseModel64 = ResponseModel<f64>;
pub type ReadoutChannel64 = ReadoutChannel<f64>;
pub type OptimizeConfig64 = OptimizeConfig<f64>;
pub type OptimizeResult64 = OptimizeResult<f64>;
pub type SampleConfig64 = SampleConfig<f64>;
pub type CalibrationLoopConfig64 = CalibrationLoopConfig<f64>;
pub type Matrix4x4 = linalg::Matrix4<f64>;
