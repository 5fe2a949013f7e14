//! Statistics of estimated responses: the binomial covariance model, the
//! mean-squared-distance quality measure of a design, and the asymmetric
//! binary readout channel.

use crate::error::{Error, Result};
use crate::linalg::lu_inverse;
use crate::model::ResponseModel;
use crate::pauli::PAULI_COUNT;
use crate::scalar::Real;

/// Number of repetitions of each setting's measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotCount(u64);

impl ShotCount {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            Err(Error::ZeroShots)
        } else {
            Ok(ShotCount(n))
        }
    }

    pub fn one() -> Self {
        ShotCount(1)
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_real<T: Real>(self) -> T {
        T::from_u64(self.0).expect("shot count fits the scalar")
    }
}

/// Asymmetric binary readout: a perfect Pauli measurement whose +1 outcome
/// is reported correctly with probability `f_plus` and whose -1 outcome with
/// probability `f_minus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutChannel<T> {
    f_plus: T,
    f_minus: T,
}

impl<T: Real> ReadoutChannel<T> {
    pub fn new(f_plus: T, f_minus: T) -> Result<Self> {
        for f in [f_plus, f_minus] {
            if !f.is_finite() || f < T::zero() || f > T::one() {
                return Err(Error::FidelityOutOfRange(f.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(ReadoutChannel { f_plus, f_minus })
    }

    pub fn perfect() -> Self {
        ReadoutChannel { f_plus: T::one(), f_minus: T::one() }
    }

    pub fn f_plus(&self) -> T {
        self.f_plus
    }

    pub fn f_minus(&self) -> T {
        self.f_minus
    }

    /// Slope `F+ + F- - 1` of the induced affine response map. A zero slope
    /// destroys all information (the model becomes singular).
    pub fn slope(&self) -> T {
        self.f_plus + self.f_minus - T::one()
    }

    /// Offset `F+ - F-` of the induced affine response map.
    pub fn offset(&self) -> T {
        self.f_plus - self.f_minus
    }
}

/// Diagonal covariance of the estimated responses: `Sigma_ss = (1 - r_s^2)/N`.
pub fn covariance<T: Real>(r: &[T], shots: ShotCount) -> Result<Vec<T>> {
    let n = shots.as_real::<T>();
    let tol = T::of(1e-9);
    r.iter()
        .map(|rs| {
            if rs.abs() > T::one() + tol {
                return Err(Error::ResponseOutOfRange(rs.to_f64().unwrap_or(f64::NAN)));
            }
            // Clamp |r| to 1 so roundoff never yields a negative variance.
            let clamped = rs.abs().min(T::one());
            Ok((T::one() - clamped * clamped) / n)
        })
        .collect()
}

/// Mean squared distance `<D^2> = Tr(L^-1 Sigma L^-T)` between estimated and
/// true error parameters, with `Sigma` evaluated at the responses `r_at_p`.
/// Singular models yield the `+inf` sentinel, which orders above every
/// finite objective value.
pub fn mean_squared_distance<T: Real>(
    model: &ResponseModel<T>,
    r_at_p: &[T],
    shots: ShotCount,
) -> Result<T> {
    if r_at_p.len() != model.setting_count() {
        return Err(Error::DimensionMismatch {
            expected: model.setting_count(),
            got: r_at_p.len(),
        });
    }
    if model.singular {
        return Ok(T::infinity());
    }
    if model.l.rows() != PAULI_COUNT {
        return Err(Error::DimensionMismatch { expected: PAULI_COUNT, got: model.l.rows() });
    }
    let sigma = covariance(r_at_p, shots)?;
    let inv = match lu_inverse(&model.l) {
        Some(inv) => inv,
        None => return Ok(T::infinity()),
    };
    let mut total = T::zero();
    for (s, var) in sigma.iter().enumerate() {
        let mut col_norm2 = T::zero();
        for u in 0..PAULI_COUNT {
            let v = inv.at(u, s);
            col_norm2 += v * v;
        }
        total += *var * col_norm2;
    }
    Ok(total)
}

/// Response seen through the readout channel:
/// `R~ = F+ - F- + R (F+ + F- - 1)`.
pub fn apply_channel_response<T: Real>(r: T, ch: &ReadoutChannel<T>) -> T {
    ch.offset() + r * ch.slope()
}

/// Transform a model through the readout channel: baselines map through
/// [`apply_channel_response`], the design matrix scales by the channel
/// slope, and the singularity flags are updated accordingly.
pub fn apply_channel_model<T: Real>(
    model: &ResponseModel<T>,
    ch: &ReadoutChannel<T>,
) -> ResponseModel<T> {
    let slope = ch.slope();
    let r0 = model.r0.iter().map(|r| apply_channel_response(*r, ch)).collect();
    let l = model.l.scaled(slope);
    // Singular values scale by |slope|, so no re-decomposition is needed.
    let scale = slope.abs();
    ResponseModel::with_spectrum(
        r0,
        l,
        model.min_singular_value * scale,
        model.max_singular_value * scale,
    )
}

/// Mean squared distance under imperfect readout, Eq. form
/// `Tr(L~^-1 Sigma~ L~^-T)` with both the model and the responses channel-
/// transformed.
pub fn mean_squared_distance_imperfect<T: Real>(
    model: &ResponseModel<T>,
    r_at_p: &[T],
    shots: ShotCount,
    ch: &ReadoutChannel<T>,
) -> Result<T> {
    let tilde = apply_channel_model(model, ch);
    let r_tilde: Vec<T> = r_at_p.iter().map(|r| apply_channel_response(*r, ch)).collect();
    mean_squared_distance(&tilde, &r_tilde, shots)
}
