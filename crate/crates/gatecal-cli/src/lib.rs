//! Library half of the calibration CLI: file formats, CSV reports and the
//! command implementations, shared between the binary and its tests.

pub mod commands;
pub mod error;
pub mod format;
pub mod report;

pub use commands::{
    channel_from_flags, run_calibrate, run_evaluate, run_optimize, run_sample, CalibrateArgs,
    EvaluateArgs, OptimizeArgs, OptimizeOutput, SampleArgs,
};
pub use error::CliError;
pub use format::{
    parse_angle_file, parse_ptrue, parse_settings, serialize_settings, write_angle_file,
    FormatError,
};
