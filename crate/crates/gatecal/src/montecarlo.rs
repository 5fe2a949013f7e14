//! Finite-shot validation of the statistical model: binomial sampling of
//! measurement responses, empirical mean-squared-distance checks, and an
//! abstract closed-loop calibration simulation at the unitary level.
//!
//! Outcomes are sampled from the exact binomial distribution rather than its
//! Gaussian approximation, so the covariance model is validated instead of
//! assumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::gates::{cnot, error_operator_exact};
use crate::linalg::Matrix4;
use crate::model::{build_model, solve_inverse};
use crate::pauli::{project_error_vector, ErrorVector};
use crate::scalar::Real;
use crate::stats::{
    apply_channel_model, apply_channel_response, covariance, mean_squared_distance,
    mean_squared_distance_imperfect, ReadoutChannel, ShotCount,
};

/// Configuration for response sampling.
#[derive(Clone, Debug)]
pub struct SampleConfig<T> {
    pub shots_per_setting: ShotCount,
    pub trials: u32,
    pub rng_seed: u64,
    pub channel: Option<ReadoutChannel<T>>,
}

impl<T: Real> SampleConfig<T> {
    pub fn new(shots_per_setting: ShotCount, trials: u32, rng_seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        Ok(SampleConfig { shots_per_setting, trials, rng_seed, channel: None })
    }

    pub fn with_channel(mut self, channel: ReadoutChannel<T>) -> Self {
        self.channel = Some(channel);
        self
    }
}

/// RNG stream id for `(trial, setting)`; every sample is reproducible from
/// `(seed, trial_index, setting_index)` alone.
fn stream_id(trial: u32, setting: usize) -> u64 {
    ((trial as u64) << 32) | setting as u64
}

fn sample_estimate<T: Real>(r: T, shots: ShotCount, rng: &mut ChaCha8Rng) -> T {
    let q = ((T::one() + r) / T::of(2.0)).max(T::zero()).min(T::one());
    let n = shots.get();
    let dist = Binomial::new(n, q.to_f64().expect("probability fits f64"))
        .expect("probability within [0, 1]");
    let plus = dist.sample(rng);
    // R* = (N+ - N-) / N
    let diff = 2.0 * plus as f64 - n as f64;
    T::of(diff / n as f64)
}

/// Exact (channel-transformed when applicable) responses at `p`.
fn exact_responses<T: Real>(
    design: &Design<T>,
    p: &ErrorVector<T>,
    channel: Option<&ReadoutChannel<T>>,
) -> Vec<T> {
    let mut r = design.responses(p);
    if let Some(ch) = channel {
        for v in &mut r {
            *v = apply_channel_response(*v, ch);
        }
    }
    r
}

/// Per-trial estimated response vectors `R*` for the design at error `p`.
///
/// Each setting's outcome count is drawn from `B(N, q)` with
/// `q = (1 + R)/2`, where `R` is the exact (channel-transformed) response.
pub fn sample_responses<T: Real>(
    design: &Design<T>,
    p: &ErrorVector<T>,
    cfg: &SampleConfig<T>,
) -> Vec<Vec<T>> {
    let r_exact = exact_responses(design, p, cfg.channel.as_ref());
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            r_exact
                .iter()
                .enumerate()
                .map(|(s, r)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
                    rng.set_stream(stream_id(trial, s));
                    sample_estimate(*r, cfg.shots_per_setting, &mut rng)
                })
                .collect()
        })
        .collect()
}

/// Empirical vs. predicted mean squared distance.
#[derive(Clone, Copy, Debug)]
pub struct EmpiricalMsd<T> {
    /// Mean over trials of `|p_hat - p|^2`.
    pub empirical: T,
    /// `<D^2>` predicted by the covariance model.
    pub predicted: T,
    pub ratio: T,
}

/// Full sampling report: per-setting moments of `R*` plus the empirical
/// mean-squared-distance comparison.
#[derive(Clone, Debug)]
pub struct SamplingReport<T> {
    pub setting_means: Vec<T>,
    /// Unbiased per-setting sample variances of `R*`.
    pub setting_variances: Vec<T>,
    /// Predicted variances `(1 - R^2)/N` at the exact responses.
    pub predicted_variances: Vec<T>,
    pub msd: EmpiricalMsd<T>,
}

/// Sample the design and compare the empirical estimator statistics with
/// the covariance model's predictions.
pub fn sampling_report<T: Real>(
    design: &Design<T>,
    p: &ErrorVector<T>,
    cfg: &SampleConfig<T>,
) -> Result<SamplingReport<T>> {
    let model = build_model(design);
    let estimation_model = match cfg.channel.as_ref() {
        Some(ch) => apply_channel_model(&model, ch),
        None => model.clone(),
    };
    if estimation_model.singular {
        return Err(Error::SingularModel);
    }

    let r_exact_plain = design.responses(p);
    let predicted = match cfg.channel.as_ref() {
        Some(ch) => {
            mean_squared_distance_imperfect(&model, &r_exact_plain, cfg.shots_per_setting, ch)?
        }
        None => mean_squared_distance(&model, &r_exact_plain, cfg.shots_per_setting)?,
    };

    let r_exact = exact_responses(design, p, cfg.channel.as_ref());
    let predicted_variances = covariance(&r_exact, cfg.shots_per_setting)?;

    let trials = sample_responses(design, p, cfg);
    let m = design.setting_count();
    let n_trials = T::from_u32(cfg.trials).expect("trial count fits the scalar");

    let mut means = vec![T::zero(); m];
    for trial in &trials {
        for (mean, v) in means.iter_mut().zip(trial) {
            *mean += *v;
        }
    }
    for mean in &mut means {
        *mean /= n_trials;
    }
    let mut vars = vec![T::zero(); m];
    if cfg.trials > 1 {
        for trial in &trials {
            for ((var, mean), v) in vars.iter_mut().zip(&means).zip(trial) {
                let d = *v - *mean;
                *var += d * d;
            }
        }
        for var in &mut vars {
            *var /= n_trials - T::one();
        }
    }

    // Mean over trials of |p_hat - p|^2, inverting each estimated response
    // vector through the (channel-transformed) model.
    let mut empirical = T::zero();
    for trial in &trials {
        let p_hat = solve_inverse(&estimation_model, trial)?;
        let diff = p_hat.sub(p);
        empirical += diff.norm() * diff.norm();
    }
    empirical /= n_trials;

    let ratio = empirical / predicted;
    Ok(SamplingReport {
        setting_means: means,
        setting_variances: vars,
        predicted_variances,
        msd: EmpiricalMsd { empirical, predicted, ratio },
    })
}

/// Empirical vs. predicted mean squared distance of the estimator.
pub fn empirical_msd<T: Real>(
    design: &Design<T>,
    p: &ErrorVector<T>,
    cfg: &SampleConfig<T>,
) -> Result<EmpiricalMsd<T>> {
    Ok(sampling_report(design, p, cfg)?.msd)
}

/// Configuration of the closed-loop calibration simulation.
#[derive(Clone, Debug)]
pub struct CalibrationLoopConfig<T> {
    /// Injected coherent error of the implemented gate.
    pub p_true: ErrorVector<T>,
    pub max_iterations: u32,
    /// Declare convergence when the estimate norm `|p_hat|` falls below this.
    pub convergence_norm: T,
    /// `None` evaluates exact responses (the infinite-shot limit).
    pub shots_per_setting: Option<ShotCount>,
    pub rng_seed: u64,
}

/// Outcome classification of the calibration loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopStatus {
    Converged,
    Diverged,
    MaxedOut,
}

impl LoopStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LoopStatus::Converged => "converged",
            LoopStatus::Diverged => "diverged",
            LoopStatus::MaxedOut => "maxed",
        }
    }
}

/// One iteration of the loop trace.
#[derive(Clone, Copy, Debug)]
pub struct IterationRecord<T> {
    pub iteration: u32,
    /// Norm of the true residual error vector (first-order projection).
    pub residual_norm: T,
    /// Average gate infidelity of the residual unitary vs. the identity.
    pub infidelity: T,
    /// Norm of the estimated error vector at this iteration.
    pub estimate_norm: T,
}

/// Trace of the closed-loop calibration simulation.
#[derive(Clone, Debug)]
pub struct CalibrationTrace<T> {
    pub iterations: Vec<IterationRecord<T>>,
    pub status: LoopStatus,
}

/// Average gate infidelity of a two-qubit unitary relative to the identity.
pub fn gate_infidelity<T: Real>(u: &Matrix4<T>) -> T {
    let d = T::of(4.0);
    let tr = u.trace().norm_sqr();
    let fidelity = (tr + d) / (d * d + d);
    (T::one() - fidelity).max(T::zero())
}

/// Closed-loop calibration: inject `E(p_true)` into the CNOT, repeatedly
/// estimate the residual error from (sampled or exact) responses, and
/// compose the correction `E(p_hat)^-1` after the perturbed gate. With
/// exact responses the residual contracts quadratically; with finite shots
/// it plateaus at the shot-noise floor `sqrt(<D^2>)`.
pub fn calibration_loop<T: Real>(
    design: &Design<T>,
    cfg: &CalibrationLoopConfig<T>,
) -> Result<CalibrationTrace<T>> {
    let model = build_model(design);
    if model.singular {
        return Err(Error::SingularModel);
    }
    if !(cfg.convergence_norm > T::zero()) {
        return Err(Error::NonFinite("convergence threshold"));
    }

    let ideal = cnot::<T>();
    let e_true = error_operator_exact(&cfg.p_true);
    // Accumulated correction; the corrected gate is CNOT . E(p_true) . K.
    let mut correction = Matrix4::<T>::identity();
    let mut iterations = Vec::new();
    let mut status = LoopStatus::MaxedOut;
    let mut growth_streak = 0u32;
    let mut prev_residual: Option<T> = None;

    for iteration in 0..=cfg.max_iterations {
        let residual = e_true.mul(&correction);
        let corrected_gate = ideal.mul(&residual);
        let residual_norm = project_error_vector(&residual).norm();
        let infidelity = gate_infidelity(&residual);

        let mut responses: Vec<T> = (0..design.setting_count())
            .map(|s| design.response_with_gate(s, &corrected_gate))
            .collect();
        if let Some(shots) = cfg.shots_per_setting {
            for (s, r) in responses.iter_mut().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
                rng.set_stream(stream_id(iteration, s));
                *r = sample_estimate(*r, shots, &mut rng);
            }
        }
        let p_hat = solve_inverse(&model, &responses)?;
        let estimate_norm = p_hat.norm();
        iterations.push(IterationRecord { iteration, residual_norm, infidelity, estimate_norm });

        if estimate_norm < cfg.convergence_norm {
            status = LoopStatus::Converged;
            break;
        }
        // Divergence: the residual grew three iterations in a row and ended
        // up well above where the streak began.
        if let Some(prev) = prev_residual {
            if residual_norm > prev {
                growth_streak += 1;
            } else {
                growth_streak = 0;
            }
            if growth_streak >= 3 && residual_norm > T::of(2.0) * cfg.p_true.norm() {
                status = LoopStatus::Diverged;
                break;
            }
        }
        prev_residual = Some(residual_norm);

        correction = correction.mul(&error_operator_exact(&p_hat).adjoint());
    }

    Ok(CalibrationTrace { iterations, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::baseline_design;
    use crate::pauli::PauliIndex;

    fn small_error(norm: f64) -> ErrorVector<f64> {
        let mut coeffs = [0.0_f64; 15];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = ((i as f64) * 0.71 + 0.3).sin();
        }
        let len = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        for c in &mut coeffs {
            *c *= norm / len;
        }
        ErrorVector::new(coeffs).unwrap()
    }

    #[test]
    fn deterministic_responses_sample_exactly() {
        // r = +-1 means q = 1 or 0: every draw returns the exact response.
        let shots = ShotCount::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sample_estimate(1.0_f64, shots, &mut rng), 1.0);
            assert_eq!(sample_estimate(-1.0_f64, shots, &mut rng), -1.0);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let design = baseline_design::<f64>();
        let p = small_error(0.01);
        let cfg = SampleConfig::new(ShotCount::new(100).unwrap(), 5, 99).unwrap();
        let a = sample_responses(&design, &p, &cfg);
        let b = sample_responses(&design, &p, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn binomial_mean_matches_response() {
        // Setting with baseline cos(pi/3) = 1/2: the sample mean approaches
        // it at the binomial rate.
        use crate::gates::{AngleExpr, Axis, GateToken, Measurement, Qubit, Setting};
        let theta = std::f64::consts::PI / 3.0;
        let s = Setting::new(
            vec![
                GateToken::Cnot,
                GateToken::rotation(Axis::X, Qubit::One, AngleExpr::Literal(theta)),
            ],
            Measurement::Tau12,
        )
        .unwrap();
        let design = Design::new(vec![s], vec![], vec![]).unwrap();
        let shots = 400u64;
        let trials = 4000u32;
        let cfg = SampleConfig::new(ShotCount::new(shots).unwrap(), trials, 12).unwrap();
        let samples = sample_responses(&design, &ErrorVector::zero(), &cfg);
        let mean: f64 = samples.iter().map(|t| t[0]).sum::<f64>() / trials as f64;
        let sigma = ((1.0 - 0.25) / shots as f64).sqrt() / (trials as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * sigma, "mean {mean}");
    }

    #[test]
    fn empirical_msd_tracks_prediction_cheaply() {
        // Down-scaled version of the full acceptance check.
        let design = baseline_design::<f64>();
        let cfg = SampleConfig::new(ShotCount::new(2000).unwrap(), 600, 5).unwrap();
        let out = empirical_msd(&design, &ErrorVector::zero(), &cfg).unwrap();
        assert!((out.predicted - 7.375 / 2000.0).abs() < 1e-12);
        assert!(out.ratio > 0.8 && out.ratio < 1.2, "ratio {}", out.ratio);
    }

    #[test]
    fn estimator_is_unbiased_to_first_order() {
        // |mean(p_hat) - p| <= C |p|^2 + statistical allowance.
        let design = baseline_design::<f64>();
        let model = crate::model::build_model(&design);
        let p = small_error(0.02);
        let trials = 2000u32;
        let shots = ShotCount::new(10_000).unwrap();
        let cfg = SampleConfig::new(shots, trials, 17).unwrap();
        let samples = sample_responses(&design, &p, &cfg);
        let mut mean = [0.0_f64; 15];
        for trial in &samples {
            let p_hat = solve_inverse(&model, trial).unwrap();
            for (m, v) in mean.iter_mut().zip(p_hat.as_slice()) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= trials as f64;
        }
        let bias = ErrorVector::new(mean).unwrap().sub(&p).norm();
        let msd = crate::stats::mean_squared_distance(&model, &design.responses(&p), shots)
            .unwrap();
        let allowance = 10.0 * p.norm() * p.norm() + 4.0 * (msd / trials as f64).sqrt();
        assert!(bias <= allowance, "bias {bias} vs allowance {allowance}");
    }

    #[test]
    fn loop_converges_immediately_without_error() {
        let design = baseline_design::<f64>();
        let cfg = CalibrationLoopConfig {
            p_true: ErrorVector::zero(),
            max_iterations: 10,
            convergence_norm: 1e-8,
            shots_per_setting: None,
            rng_seed: 0,
        };
        let trace = calibration_loop(&design, &cfg).unwrap();
        assert_eq!(trace.status, LoopStatus::Converged);
        assert_eq!(trace.iterations.len(), 1);
        assert!(trace.iterations[0].residual_norm < 1e-14);
    }

    #[test]
    fn exact_loop_contracts_quadratically() {
        let design = baseline_design::<f64>();
        let run = |norm: f64| {
            let cfg = CalibrationLoopConfig {
                p_true: small_error(norm),
                max_iterations: 3,
                convergence_norm: 1e-30, // never triggers; watch the trace
                shots_per_setting: None,
                rng_seed: 0,
            };
            calibration_loop(&design, &cfg).unwrap()
        };
        let full = run(0.05);
        let half = run(0.025);
        // After one correction both runs show r1 ~ C r0^2.
        let c_full = full.iterations[1].residual_norm / (0.05 * 0.05);
        let c_half = half.iterations[1].residual_norm / (0.025 * 0.025);
        assert!(c_full > 0.05 && c_full < 20.0, "C {c_full}");
        assert!((c_full / c_half).ln().abs() < 1.4, "{c_full} vs {c_half}");
    }

    #[test]
    fn infidelity_of_identity_is_zero() {
        assert_eq!(gate_infidelity(&Matrix4::<f64>::identity()), 0.0);
        let e = error_operator_exact(&ErrorVector::basis(
            PauliIndex::new(5).unwrap(),
            0.1_f64,
        ));
        let inf = gate_infidelity(&e);
        assert!(inf > 0.0 && inf < 1e-2);
    }
}
