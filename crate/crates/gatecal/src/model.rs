//! The linearized response model `R(p) = R(0) + L p`: analytic construction
//! of the design matrix, conditioning report, and the inverse problem.

use crate::design::{Design, ResolvedGate};
use crate::error::{Error, Result};
use crate::gates::{cnot, rotation_matrix};
use crate::linalg::{lu_solve, singular_values, Mat, Matrix4, Vector4};
use crate::pauli::{all_taus, ErrorVector, PAULI_COUNT};
use crate::response::ket00;
use crate::scalar::Real;

/// `sigma_min < threshold * sigma_max` classifies the model as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-8;

/// Baseline responses and the Jacobian of responses with respect to the
/// error parameters at `p = 0`, with conditioning metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseModel<T> {
    /// Baseline responses `R(0)`, one per setting.
    pub r0: Vec<T>,
    /// `m x 15` design matrix `L_su = dR_s/dp_u` at `p = 0`.
    pub l: Mat<T>,
    /// 2-norm condition number; only defined for invertible square models.
    pub condition_number: Option<T>,
    pub min_singular_value: T,
    pub max_singular_value: T,
    pub singular: bool,
}

impl<T: Real> ResponseModel<T> {
    pub fn setting_count(&self) -> usize {
        self.r0.len()
    }

    pub(crate) fn from_parts(r0: Vec<T>, l: Mat<T>) -> Self {
        let sv = singular_values(&l);
        let max_sv = sv.first().copied().unwrap_or_else(T::zero);
        let min_sv = sv.last().copied().unwrap_or_else(T::zero);
        Self::with_spectrum(r0, l, min_sv, max_sv)
    }

    pub(crate) fn with_spectrum(r0: Vec<T>, l: Mat<T>, min_sv: T, max_sv: T) -> Self {
        let square = l.rows() == PAULI_COUNT;
        let undersized = l.rows() < PAULI_COUNT;
        let singular = undersized
            || max_sv <= T::zero()
            || min_sv < T::of(SINGULARITY_THRESHOLD) * max_sv;
        ResponseModel {
            r0,
            condition_number: (square && !singular).then(|| max_sv / min_sv),
            min_singular_value: min_sv,
            max_singular_value: max_sv,
            l,
            singular,
        }
    }
}

/// Conditioning summary of a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularityReport<T> {
    pub condition_number: Option<T>,
    pub min_singular_value: T,
    pub singular: bool,
}

/// Build the model at the design's own angle assignment.
pub fn build_model<T: Real>(design: &Design<T>) -> ResponseModel<T> {
    build_model_at(design, design.assignment()).expect("assignment length always matches")
}

/// Build the model at an explicit angle assignment.
///
/// `L` is computed analytically: differentiating the first-order error
/// operator at each CNOT occurrence turns `dR_s/dp_u` into
/// `sum_j 2 Im <w_j| tau_u |r_j>`, where `|r_j>` is the state before the
/// j-th CNOT and `<w_j|` back-propagates the measured observable to just
/// after it. Matches central finite differences of the exact responses.
pub fn build_model_at<T: Real>(design: &Design<T>, angles: &[T]) -> Result<ResponseModel<T>> {
    if angles.len() != design.param_count() {
        return Err(Error::DimensionMismatch {
            expected: design.param_count(),
            got: angles.len(),
        });
    }
    let taus = all_taus::<T>();
    let ideal = cnot::<T>();
    let m = design.setting_count();
    let mut r0 = Vec::with_capacity(m);
    let mut l = Mat::zeros(m, PAULI_COUNT);

    for (s, setting) in design.settings().iter().enumerate() {
        let mats: Vec<(bool, Matrix4<T>)> = design
            .resolved_gates(setting, angles)
            .map(|g| match g {
                ResolvedGate::Cnot => (true, ideal),
                ResolvedGate::Rotation(axis, qubit, theta) => {
                    (false, rotation_matrix(axis, qubit, theta))
                }
            })
            .collect();

        // Forward pass: states[j] = product of the first j gates applied to |00>.
        let mut states: Vec<Vector4<T>> = Vec::with_capacity(mats.len() + 1);
        states.push(ket00());
        for (_, g) in &mats {
            let last = states.last().expect("seeded with |00>");
            states.push(g.mul_vec(last));
        }
        let psi0 = states[mats.len()];
        let diag = setting.measurement().diag::<T>();
        let mut phi = psi0;
        let mut response = T::zero();
        for i in 0..4 {
            response += diag[i] * psi0[i].norm_sqr();
            phi[i] *= num_complex::Complex::new(diag[i], T::zero());
        }
        r0.push(response);

        // Backward pass: w after absorbing gates j.. from the left.
        let mut w = phi;
        for (j, (is_cnot, g)) in mats.iter().enumerate().rev() {
            w = g.adjoint().mul_vec(&w);
            if *is_cnot {
                let r = &states[j];
                for (u, tau) in taus.iter().enumerate() {
                    let tau_r = tau.mul_vec(r);
                    let mut inner = num_complex::Complex::new(T::zero(), T::zero());
                    for i in 0..4 {
                        inner += w[i].conj() * tau_r[i];
                    }
                    let upd = l.at(s, u) + T::of(2.0) * inner.im;
                    l.set(s, u, upd);
                }
            }
        }
    }

    Ok(ResponseModel::from_parts(r0, l))
}

/// Solve the inverse problem `p = L^-1 (r_measured - R(0))`.
///
/// Only square (15-setting) models are invertible; overdetermined
/// least-squares estimation is out of scope.
pub fn solve_inverse<T: Real>(model: &ResponseModel<T>, r_measured: &[T]) -> Result<ErrorVector<T>> {
    if model.l.rows() != PAULI_COUNT {
        return Err(Error::DimensionMismatch { expected: PAULI_COUNT, got: model.l.rows() });
    }
    if r_measured.len() != model.setting_count() {
        return Err(Error::DimensionMismatch {
            expected: model.setting_count(),
            got: r_measured.len(),
        });
    }
    if model.singular {
        return Err(Error::SingularModel);
    }
    let rhs: Vec<T> =
        r_measured.iter().zip(&model.r0).map(|(r, r0)| *r - *r0).collect();
    let p = lu_solve(&model.l, &rhs).ok_or(Error::SingularModel)?;
    ErrorVector::from_slice(&p)
}

/// Conditioning metadata: smallest singular value, 2-norm condition number,
/// and the singularity classification.
pub fn singularity_report<T: Real>(model: &ResponseModel<T>) -> SingularityReport<T> {
    SingularityReport {
        condition_number: model.condition_number,
        min_singular_value: model.min_singular_value,
        singular: model.singular,
    }
}

/// Central finite-difference design matrix on the exact responses; the
/// independent cross-check for [`build_model_at`].
pub fn finite_difference_model<T: Real>(
    design: &Design<T>,
    angles: &[T],
    step: T,
) -> Result<Mat<T>> {
    let m = design.setting_count();
    let mut l = Mat::zeros(m, PAULI_COUNT);
    for u in 0..PAULI_COUNT {
        let k = crate::pauli::PauliIndex::new(u + 1).expect("in range");
        let plus = ErrorVector::basis(k, step);
        let minus = ErrorVector::basis(k, -step);
        for s in 0..m {
            let rp = design.response_at(s, &plus, angles)?;
            let rm = design.response_at(s, &minus, angles)?;
            l.set(s, u, (rp - rm) / (step + step));
        }
    }
    Ok(l)
}
