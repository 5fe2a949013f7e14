//! Command implementations; each returns its CSV report as a string so the
//! binary and the tests share one code path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gatecal::{
    build_model_at, calibration_loop, fold, mean_squared_distance,
    mean_squared_distance_imperfect, minimize, sampling_report, singularity_report,
    CalibrationLoopConfig64, Design64, ErrorVector64, OptimizeConfig64, ReadoutChannel64,
    SampleConfig64, ShotCount, PAULI_COUNT,
};

use crate::error::CliError;
use crate::report::{num, Csv};

/// Shared readout-channel flag pair.
pub fn channel_from_flags(
    fplus: Option<f64>,
    fminus: Option<f64>,
) -> Result<Option<ReadoutChannel64>, CliError> {
    match (fplus, fminus) {
        (None, None) => Ok(None),
        (Some(fp), Some(fm)) => Ok(Some(
            ReadoutChannel64::new(fp, fm).map_err(|e| CliError::InvalidArgs(e.to_string()))?,
        )),
        _ => Err(CliError::InvalidArgs(
            "--fplus and --fminus must be given together".to_string(),
        )),
    }
}

pub struct EvaluateArgs {
    pub angles: Vec<f64>,
    pub channel: Option<ReadoutChannel64>,
    pub shots: u64,
    pub allow_singular: bool,
}

/// Per-setting baseline responses and design-matrix rows, plus the
/// `<D^2>.N` / conditioning footer.
pub fn run_evaluate(design: &Design64, args: &EvaluateArgs) -> Result<String, CliError> {
    let shots = ShotCount::new(args.shots).map_err(|e| CliError::InvalidArgs(e.to_string()))?;
    let model = build_model_at(design, &args.angles)?;
    let (model, r_at_zero, msd) = match args.channel.as_ref() {
        Some(ch) => {
            let msd =
                mean_squared_distance_imperfect(&model, &model.r0.clone(), shots, ch)?;
            let tilde = gatecal::apply_channel_model(&model, ch);
            let r = tilde.r0.clone();
            (tilde, r, msd)
        }
        None => {
            let r = model.r0.clone();
            let msd = mean_squared_distance(&model, &r, shots)?;
            (model, r, msd)
        }
    };
    let report = singularity_report(&model);

    let mut csv = Csv::new();
    csv.row(["setting_id", "r0", "coefficients"]);
    for s in 0..model.setting_count() {
        let mut coeffs: Vec<String> = Vec::new();
        for u in 0..PAULI_COUNT {
            let v = model.l.at(s, u);
            if v.abs() > 1e-12 {
                coeffs.push(format!("{}:{}", u + 1, num(v)));
            }
        }
        // Suppress roundoff noise at the same threshold as the coefficients.
        let r0 = if r_at_zero[s].abs() > 1e-12 { r_at_zero[s] } else { 0.0 };
        csv.row([&(s + 1).to_string(), &num(r0), &coeffs.join(" ")]);
    }
    csv.row(["msd_times_n", "condition_number", "singular"]);
    // The reported figure is <D^2> . N, independent of the shot count.
    let msd_times_n = msd * args.shots as f64;
    csv.row([
        num(msd_times_n),
        report.condition_number.map(num).unwrap_or_default(),
        report.singular.to_string(),
    ]);

    if report.singular && !args.allow_singular {
        return Err(CliError::SingularDesign(csv.finish()));
    }
    Ok(csv.finish())
}

pub struct OptimizeArgs {
    pub starts: u32,
    pub seed: u64,
    pub tol: f64,
    pub max_evals: u64,
    pub channel: Option<ReadoutChannel64>,
    pub apply_fold: bool,
}

pub struct OptimizeOutput {
    pub csv: String,
    pub angle_file: String,
}

/// Multistart minimization of `<D^2>.N`; reports the best value and angles
/// (in units of pi) and produces a reusable angle file.
pub fn run_optimize(design: &Design64, args: &OptimizeArgs) -> Result<OptimizeOutput, CliError> {
    let config = OptimizeConfig64 {
        stop_tolerance: args.tol,
        max_evaluations: args.max_evals,
        multistart_count: args.starts,
        rng_seed: args.seed,
        channel: args.channel,
        ..OptimizeConfig64::default()
    };
    let result = minimize(design, &config).map_err(|e| match e {
        gatecal::Error::NoFiniteMinimum(_) => CliError::OptimizerFailed(e.to_string()),
        other => CliError::Core(other),
    })?;

    let angles =
        if args.apply_fold { fold(&result.best_angles) } else { result.best_angles.clone() };

    let mut csv = Csv::new();
    csv.row(["key", "value"]);
    csv.row(["best_value", &num(result.best_value)]);
    csv.row(["starts_within_factor", &result.starts_within_factor.to_string()]);
    csv.row(["evaluation_count", &result.evaluation_count.to_string()]);
    csv.row(["folded", &args.apply_fold.to_string()]);
    for (name, value) in design.param_names().iter().zip(&angles) {
        csv.row([&format!("{name}_over_pi"), &num(value / std::f64::consts::PI)]);
    }

    let angle_file = crate::format::write_angle_file(design.param_names(), &angles);
    Ok(OptimizeOutput { csv: csv.finish(), angle_file })
}

pub struct SampleArgs {
    pub angles: Vec<f64>,
    pub shots: u64,
    pub trials: u32,
    pub seed: u64,
    pub p_true: ErrorVector64,
    pub channel: Option<ReadoutChannel64>,
}

/// Finite-shot sampling: per-setting estimator moments vs. predictions,
/// plus the empirical/predicted mean-squared-distance comparison.
pub fn run_sample(design: &Design64, args: &SampleArgs) -> Result<String, CliError> {
    let design = design.with_assignment(&args.angles)?;
    let shots = ShotCount::new(args.shots).map_err(|e| CliError::InvalidArgs(e.to_string()))?;
    let mut cfg = SampleConfig64::new(shots, args.trials, args.seed)
        .map_err(|e| CliError::InvalidArgs(e.to_string()))?;
    if let Some(ch) = args.channel {
        cfg = cfg.with_channel(ch);
    }
    let report = sampling_report(&design, &args.p_true, &cfg).map_err(|e| match e {
        gatecal::Error::SingularModel => CliError::SingularDesign(String::new()),
        other => CliError::Core(other),
    })?;

    let mut csv = Csv::new();
    csv.row(["setting_id", "mean_rstar", "var_rstar", "predicted_var"]);
    for s in 0..design.setting_count() {
        csv.row([
            (s + 1).to_string(),
            num(report.setting_means[s]),
            num(report.setting_variances[s]),
            num(report.predicted_variances[s]),
        ]);
    }
    csv.row(["empirical_msd", "predicted_msd", "ratio"]);
    csv.row([num(report.msd.empirical), num(report.msd.predicted), num(report.msd.ratio)]);
    Ok(csv.finish())
}

pub struct CalibrateArgs {
    pub angles: Vec<f64>,
    pub pnorm: f64,
    /// 0 means exact (infinite-shot) responses.
    pub shots: u64,
    pub iters: u32,
    pub seed: u64,
    pub convergence_norm: f64,
}

/// Random error direction with the requested norm, drawn from a dedicated
/// RNG stream so sampling streams stay untouched.
fn random_error(norm: f64, seed: u64) -> ErrorVector64 {
    if norm == 0.0 {
        return ErrorVector64::zero();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut coeffs = [0.0_f64; PAULI_COUNT];
    for c in &mut coeffs {
        *c = rng.sample::<f64, _>(rand_distr::StandardNormal);
    }
    let len = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c *= norm / len;
    }
    ErrorVector64::new(coeffs).expect("finite by construction")
}

/// Closed-loop calibration trace: per-iteration residual norm and
/// infidelity, with the final status in the footer.
pub fn run_calibrate(design: &Design64, args: &CalibrateArgs) -> Result<String, CliError> {
    let design = design.with_assignment(&args.angles)?;
    let shots = match args.shots {
        0 => None,
        n => Some(ShotCount::new(n).map_err(|e| CliError::InvalidArgs(e.to_string()))?),
    };
    let cfg = CalibrationLoopConfig64 {
        p_true: random_error(args.pnorm, args.seed),
        max_iterations: args.iters,
        convergence_norm: args.convergence_norm,
        shots_per_setting: shots,
        rng_seed: args.seed,
    };
    let trace = calibration_loop(&design, &cfg).map_err(|e| match e {
        gatecal::Error::SingularModel => CliError::SingularDesign(String::new()),
        other => CliError::Core(other),
    })?;

    let mut csv = Csv::new();
    csv.row(["iteration", "residual_norm", "infidelity"]);
    for it in &trace.iterations {
        csv.row([it.iteration.to_string(), num(it.residual_norm), num(it.infidelity)]);
    }
    csv.row(["status", trace.status.as_str()]);
    Ok(csv.finish())
}
