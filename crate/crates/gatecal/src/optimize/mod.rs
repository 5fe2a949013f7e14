//! Minimization of the design-quality objective `<D^2> . N` over a design's
//! angle assignment: seeded multistart around a derivative-free local
//! descent, plus the symmetry transformations of optimal angle sets
//! (folding, reflections, degeneracy resampling).

mod powell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::model::build_model_at;
use crate::scalar::Real;
use crate::stats::{mean_squared_distance, ReadoutChannel, ShotCount};

/// Starts whose final value is within `best * (1 + WITHIN_FACTOR)` count as
/// having reached the optimum.
pub const WITHIN_FACTOR: f64 = 1e-5;

/// Values at or above this cutoff stand in for the singular `+inf` sentinel
/// inside the local minimizer, which interpolates function values and cannot
/// digest infinities.
const BIG: f64 = 1e12;

/// Configuration of [`minimize`].
#[derive(Clone, Debug)]
pub struct OptimizeConfig<T> {
    /// Box bounds shared by every angle.
    pub bounds: (T, T),
    /// Termination tolerance on the angle step of a full local iteration.
    pub stop_tolerance: T,
    /// Evaluation budget per start.
    pub max_evaluations: u64,
    pub multistart_count: u32,
    pub rng_seed: u64,
    /// Optimize the imperfect-readout objective when present.
    pub channel: Option<ReadoutChannel<T>>,
}

impl<T: Real> Default for OptimizeConfig<T> {
    fn default() -> Self {
        OptimizeConfig {
            bounds: Design::<T>::bounds(),
            stop_tolerance: T::of(1e-10),
            max_evaluations: 40_000,
            multistart_count: 200,
            rng_seed: 0,
            channel: None,
        }
    }
}

impl<T: Real> OptimizeConfig<T> {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::BadOptimizeConfig("bounds must be finite with lo < hi"));
        }
        if !(self.stop_tolerance.is_finite() && self.stop_tolerance > T::zero()) {
            return Err(Error::BadOptimizeConfig("stop tolerance must be positive"));
        }
        if self.multistart_count == 0 {
            return Err(Error::BadOptimizeConfig("multistart count must be at least 1"));
        }
        if self.max_evaluations == 0 {
            return Err(Error::BadOptimizeConfig("evaluation budget must be at least 1"));
        }
        Ok(())
    }
}

/// Summary of one local start.
#[derive(Clone, Debug)]
pub struct StartSummary<T> {
    pub start_index: u32,
    pub value: T,
    pub evaluations: u64,
    pub converged: bool,
}

/// Result of [`minimize`].
#[derive(Clone, Debug)]
pub struct OptimizeResult<T> {
    pub best_angles: Vec<T>,
    /// Best `<D^2> . N` across all starts.
    pub best_value: T,
    /// Starts ending within a `1 + 1e-5` factor of the best value.
    pub starts_within_factor: u32,
    /// Total objective evaluations across all starts.
    pub evaluation_count: u64,
    pub trace: Option<Vec<StartSummary<T>>>,
}

/// The design-quality objective `<D^2> . N` at an explicit angle assignment,
/// evaluated at `p = 0`. Singular configurations yield `+inf`.
pub fn objective<T: Real>(
    design: &Design<T>,
    angles: &[T],
    channel: Option<&ReadoutChannel<T>>,
) -> T {
    assert_eq!(angles.len(), design.param_count(), "assignment length");
    let model = match build_model_at(design, angles) {
        Ok(model) => model,
        Err(_) => return T::infinity(),
    };
    let model = match channel {
        Some(ch) => crate::stats::apply_channel_model(&model, ch),
        None => model,
    };
    let r0 = model.r0.clone();
    mean_squared_distance(&model, &r0, ShotCount::one()).unwrap_or_else(|_| T::infinity())
}

fn guarded_objective<'a, T: Real>(
    design: &'a Design<T>,
    channel: Option<&'a ReadoutChannel<T>>,
) -> impl Fn(&[T]) -> T + 'a {
    move |angles| {
        let v = objective(design, angles, channel);
        if v.is_finite() {
            v.min(T::of(BIG))
        } else {
            T::of(BIG)
        }
    }
}

fn collect_result<T: Real>(
    outcomes: Vec<(u32, powell::LocalOutcome<T>)>,
) -> Result<OptimizeResult<T>> {
    let cutoff = T::of(BIG * 0.1);
    let total: u64 = outcomes.iter().map(|(_, o)| o.evaluations).sum();
    let best = outcomes
        .iter()
        .min_by(|a, b| {
            (a.1.value, a.0)
                .partial_cmp(&(b.1.value, b.0))
                .expect("objective values are never NaN")
        })
        .expect("at least one start");
    if best.1.value >= cutoff {
        return Err(Error::NoFiniteMinimum(outcomes.len() as u32));
    }
    let threshold = best.1.value * (T::one() + T::of(WITHIN_FACTOR));
    let within = outcomes.iter().filter(|(_, o)| o.value <= threshold).count() as u32;
    let trace = outcomes
        .iter()
        .map(|(idx, o)| StartSummary {
            start_index: *idx,
            value: o.value,
            evaluations: o.evaluations,
            converged: o.converged,
        })
        .collect();
    Ok(OptimizeResult {
        best_angles: best.1.x.clone(),
        best_value: best.1.value,
        starts_within_factor: within,
        evaluation_count: total,
        trace: Some(trace),
    })
}

/// Multistart minimization of [`objective`] under box constraints.
///
/// Each start draws uniform random angles from its own deterministic RNG
/// stream `(rng_seed, start_index)` and runs a bounded Powell descent until
/// the angle step falls below `stop_tolerance` or the budget is exhausted.
/// Identical `(design, config)` always produce identical results; starts
/// run in parallel and ties are broken by the lowest start index.
pub fn minimize<T: Real>(design: &Design<T>, config: &OptimizeConfig<T>) -> Result<OptimizeResult<T>> {
    config.validate()?;
    let n = design.param_count();
    let objective_fn = guarded_objective(design, config.channel.as_ref());

    if n == 0 {
        let value = objective_fn(&[]);
        if value >= T::of(BIG * 0.1) {
            return Err(Error::NoFiniteMinimum(0));
        }
        return Ok(OptimizeResult {
            best_angles: vec![],
            best_value: value,
            starts_within_factor: config.multistart_count,
            evaluation_count: 1,
            trace: Some(vec![]),
        });
    }

    let (lo, hi) = config.bounds;
    let lo_f = lo.to_f64().expect("finite bound");
    let hi_f = hi.to_f64().expect("finite bound");

    let outcomes: Vec<(u32, powell::LocalOutcome<T>)> = (0..config.multistart_count)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            rng.set_stream(idx as u64);
            let x0: Vec<T> =
                (0..n).map(|_| T::of(rng.gen_range(lo_f..hi_f))).collect();
            let out = powell::powell_minimize(
                &objective_fn,
                &x0,
                lo,
                hi,
                config.stop_tolerance,
                config.max_evaluations,
            );
            (idx, out)
        })
        .collect();

    collect_result(outcomes)
}

/// Single local descent from an explicit starting assignment; used to polish
/// a multistart result to tight tolerance.
pub fn refine<T: Real>(
    design: &Design<T>,
    start: &[T],
    config: &OptimizeConfig<T>,
) -> Result<OptimizeResult<T>> {
    config.validate()?;
    if start.len() != design.param_count() {
        return Err(Error::DimensionMismatch {
            expected: design.param_count(),
            got: start.len(),
        });
    }
    let objective_fn = guarded_objective(design, config.channel.as_ref());
    let out = powell::powell_minimize(
        &objective_fn,
        start,
        config.bounds.0,
        config.bounds.1,
        config.stop_tolerance,
        config.max_evaluations,
    );
    collect_result(vec![(0, out)])
}

/// Snap a near-optimal assignment onto nearby structure: angles within
/// `tol` of a multiple of `pi/2` move onto it, and groups of angles that
/// agree within `tol` collapse to a common value. The snapped assignment is
/// kept only when it does not worsen the objective beyond evaluation noise;
/// otherwise the input is returned unchanged.
///
/// Optimal assignments sit on such structured manifolds, but the objective
/// is numerically flat along the directions that break the structure, so a
/// descent method cannot recover the exact relations from function values
/// alone. Snapping is a plain descent step here, not an assumption: a snap
/// that does not lower the objective is discarded.
pub fn snap_to_structure<T: Real>(
    design: &Design<T>,
    angles: &[T],
    channel: Option<&ReadoutChannel<T>>,
    tol: T,
) -> Vec<T> {
    let n = angles.len();
    let mut snapped = angles.to_vec();
    let half_pi = T::FRAC_PI_2();
    let (lo, hi) = Design::<T>::bounds();
    let mut on_grid = vec![false; n];
    for (v, flag) in snapped.iter_mut().zip(&mut on_grid) {
        let grid = (*v / half_pi).round() * half_pi;
        if (*v - grid).abs() <= tol && grid >= lo && grid <= hi {
            *v = grid;
            *flag = true;
        }
    }

    // Collapse clusters of angles that agree within `tol`; a cluster that
    // contains a grid angle collapses onto it.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| snapped[a].partial_cmp(&snapped[b]).expect("angles are finite"));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && snapped[order[end]] - snapped[order[end - 1]] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let members = &order[start..end];
            let target = members
                .iter()
                .find(|&&idx| on_grid[idx])
                .map(|&idx| snapped[idx])
                .unwrap_or_else(|| {
                    let sum: T = members.iter().map(|&idx| snapped[idx]).sum();
                    sum / T::from_usize(members.len()).expect("small cluster")
                });
            for &idx in members {
                snapped[idx] = target;
            }
        }
        start = end;
    }

    let before = objective(design, angles, channel);
    let after = objective(design, &snapped, channel);
    if after <= before * (T::one() + T::of(1e-11)) {
        snapped
    } else {
        angles.to_vec()
    }
}

/// Folding transformation: every angle above `pi` maps to `2 pi - theta`,
/// leaving the objective of an optimal assignment unchanged.
pub fn fold<T: Real>(angles: &[T]) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    angles.iter().map(|t| if *t > T::PI() { two_pi - *t } else { *t }).collect()
}

/// Which angles a reflection applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReflectScope {
    /// Global reflection `theta_i -> 2 pi - theta_i` for all `i`.
    All,
    /// Local reflection of a single angle.
    Single(usize),
}

/// Reflection transformation; an involution on the angle box.
pub fn reflect<T: Real>(angles: &[T], which: ReflectScope) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    angles
        .iter()
        .enumerate()
        .map(|(i, t)| match which {
            ReflectScope::All => two_pi - *t,
            ReflectScope::Single(j) if i == j => two_pi - *t,
            _ => *t,
        })
        .collect()
}

/// Report of [`verify_degeneracy`].
#[derive(Clone, Debug)]
pub struct DegeneracyReport<T> {
    pub base_value: T,
    /// Largest relative objective deviation across non-singular samples.
    pub max_relative_deviation: T,
    /// Samples that landed on a singular configuration.
    pub singular_hits: u32,
    pub samples: u32,
}

/// Resample the listed angles uniformly (seeded) and report how much the
/// objective moves; at a perfect-readout optimum the listed degeneracy
/// angles leave it unchanged as long as the model stays non-singular.
pub fn verify_degeneracy<T: Real>(
    design: &Design<T>,
    base: &[T],
    free_indices: &[usize],
    samples: u32,
    seed: u64,
    channel: Option<&ReadoutChannel<T>>,
) -> Result<DegeneracyReport<T>> {
    if base.len() != design.param_count() {
        return Err(Error::DimensionMismatch {
            expected: design.param_count(),
            got: base.len(),
        });
    }
    for idx in free_indices {
        if *idx >= base.len() {
            return Err(Error::UnresolvedParameter(*idx));
        }
    }
    let base_value = objective(design, base, channel);
    let (lo, hi) = Design::<T>::bounds();
    let (lo_f, hi_f) = (lo.to_f64().unwrap(), hi.to_f64().unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev = T::zero();
    let mut singular_hits = 0u32;
    let mut angles = base.to_vec();
    for _ in 0..samples {
        for idx in free_indices {
            angles[*idx] = T::of(rng.gen_range(lo_f..hi_f));
        }
        let value = objective(design, &angles, channel);
        if value.is_finite() {
            let dev = (value - base_value).abs() / base_value.abs().max(T::epsilon());
            max_dev = max_dev.max(dev);
        } else {
            singular_hits += 1;
        }
    }
    Ok(DegeneracyReport { base_value, max_relative_deviation: max_dev, singular_hits, samples })
}
