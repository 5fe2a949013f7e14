//! `gatecal` - evaluate, optimize, sample and close-loop-calibrate two-qubit
//! gate calibration designs described by settings files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gatecal_cli::{
    channel_from_flags, parse_angle_file, parse_ptrue, parse_settings, run_calibrate,
    run_evaluate, run_optimize, run_sample, CalibrateArgs, CliError, EvaluateArgs, OptimizeArgs,
    SampleArgs,
};

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "GATECAL_THREADS";

#[derive(Parser)]
#[command(
    name = "gatecal",
    about = "Statistical design tools for two-qubit gate calibration experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonInputs {
    /// Settings file describing the design.
    #[arg(long, value_name = "FILE")]
    settings: PathBuf,
    /// Angle file overriding parameter defaults.
    #[arg(long, value_name = "FILE")]
    angles: Option<PathBuf>,
    /// Write the CSV report to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelFlags {
    /// Readout fidelity for the +1 outcome (requires --fminus).
    #[arg(long, value_name = "F")]
    fplus: Option<f64>,
    /// Readout fidelity for the -1 outcome (requires --fplus).
    #[arg(long, value_name = "F")]
    fminus: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Report baseline responses, design-matrix rows, conditioning and <D^2>.N.
    Evaluate {
        #[command(flatten)]
        inputs: CommonInputs,
        #[command(flatten)]
        channel: ChannelFlags,
        /// Repetitions per setting (the report's <D^2>.N is shot-independent).
        #[arg(long, default_value_t = 1)]
        shots: u64,
        /// Exit 0 even when the design matrix is singular.
        #[arg(long)]
        allow_singular: bool,
    },
    /// Minimize <D^2>.N over the design's free angles with seeded multistart.
    Optimize {
        #[command(flatten)]
        inputs: CommonInputs,
        #[command(flatten)]
        channel: ChannelFlags,
        /// Number of random starts.
        #[arg(long, default_value_t = 200)]
        starts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stopping tolerance on the angle step.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Objective evaluation budget per start.
        #[arg(long, default_value_t = 40_000)]
        max_evals: u64,
        /// Apply the folding transformation to the reported optimum.
        #[arg(long)]
        fold: bool,
        /// Write the optimized angles to a reusable angle file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Sample finite-shot responses and compare with the covariance model.
    Sample {
        #[command(flatten)]
        inputs: CommonInputs,
        #[command(flatten)]
        channel: ChannelFlags,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// File with the 15 true error parameters (defaults to zero).
        #[arg(long, value_name = "FILE")]
        ptrue: Option<PathBuf>,
    },
    /// Simulate the closed calibration loop: inject, estimate, correct.
    Calibrate {
        #[command(flatten)]
        inputs: CommonInputs,
        /// Norm of the randomly oriented injected error.
        #[arg(long, default_value_t = 0.05)]
        pnorm: f64,
        /// Shots per setting; 0 means exact (infinite-shot) responses.
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 10)]
        iters: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Convergence threshold on the estimated error norm.
        #[arg(long, default_value_t = 1e-8)]
        norm: f64,
    },
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_design(inputs: &CommonInputs) -> Result<(gatecal::Design64, Vec<f64>), CliError> {
    let design = parse_settings(&read_file(&inputs.settings)?)?;
    let angles = match &inputs.angles {
        Some(path) => parse_angle_file(&read_file(path)?, &design)?,
        None => design.assignment().to_vec(),
    };
    Ok((design, angles))
}

fn emit(inputs: &CommonInputs, csv: &str) -> Result<(), CliError> {
    match &inputs.csv {
        Some(path) => write_file(path, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evaluate { inputs, channel, shots, allow_singular } => {
            let (design, angles) = load_design(&inputs)?;
            let args = EvaluateArgs {
                angles,
                channel: channel_from_flags(channel.fplus, channel.fminus)?,
                shots,
                allow_singular,
            };
            match run_evaluate(&design, &args) {
                Ok(csv) => emit(&inputs, &csv),
                // Print the partial report before failing with code 3.
                Err(CliError::SingularDesign(csv)) => {
                    emit(&inputs, &csv)?;
                    Err(CliError::SingularDesign(String::new()))
                }
                Err(other) => Err(other),
            }
        }
        Command::Optimize { inputs, channel, starts, seed, tol, max_evals, fold, out } => {
            let (design, angles) = load_design(&inputs)?;
            let design = design.with_assignment(&angles)?;
            let args = OptimizeArgs {
                starts,
                seed,
                tol,
                max_evals,
                channel: channel_from_flags(channel.fplus, channel.fminus)?,
                apply_fold: fold,
            };
            let output = run_optimize(&design, &args)?;
            if let Some(path) = out {
                write_file(&path, &output.angle_file)?;
            }
            emit(&inputs, &output.csv)
        }
        Command::Sample { inputs, channel, shots, trials, seed, ptrue } => {
            let (design, angles) = load_design(&inputs)?;
            let p_true = match ptrue {
                Some(path) => parse_ptrue(&read_file(&path)?)?,
                None => gatecal::ErrorVector64::zero(),
            };
            let args = SampleArgs {
                angles,
                shots,
                trials,
                seed,
                p_true,
                channel: channel_from_flags(channel.fplus, channel.fminus)?,
            };
            let csv = run_sample(&design, &args)?;
            emit(&inputs, &csv)
        }
        Command::Calibrate { inputs, pnorm, shots, iters, seed, norm } => {
            let (design, angles) = load_design(&inputs)?;
            let args = CalibrateArgs {
                angles,
                pnorm,
                shots,
                iters,
                seed,
                convergence_norm: norm,
            };
            let csv = run_calibrate(&design, &args)?;
            emit(&inputs, &csv)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var(THREADS_ENV) {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("warning: ignoring invalid {THREADS_ENV}={threads}");
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
