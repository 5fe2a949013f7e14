//! Gate tokens, experiment settings, and the concrete unitaries they
//! evaluate to: CNOT, single-qubit X/Y rotations, and the coherent error
//! operator attached to every CNOT.

use crate::error::{Error, Result};
use crate::linalg::{exp_neg_i_hermitian, Matrix2, Matrix4, C};
use crate::pauli::{all_taus, pauli_tau, sigma, ErrorVector, PauliIndex};
use crate::scalar::Real;

/// Rotation axis of a single-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Which qubit a single-qubit gate acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
}

/// Reference to a named angle parameter of a [`crate::design::Design`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamId(pub usize);

/// A rotation angle: a literal in radians, or a design parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleExpr<T> {
    Literal(T),
    Param(ParamId),
}

/// One gate in a calibration sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateToken<T> {
    Cnot,
    Rotation { axis: Axis, qubit: Qubit, angle: AngleExpr<T> },
}

impl<T> GateToken<T> {
    pub fn rotation(axis: Axis, qubit: Qubit, angle: AngleExpr<T>) -> Self {
        GateToken::Rotation { axis, qubit, angle }
    }
}

/// Pauli observable measured at the end of a sequence; the protocol uses
/// `tau_3 = I (x) Z` and `tau_12 = Z (x) I` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measurement {
    Tau3,
    Tau12,
}

impl Measurement {
    pub fn pauli(self) -> PauliIndex {
        let k = match self {
            Measurement::Tau3 => 3,
            Measurement::Tau12 => 12,
        };
        PauliIndex::new(k).expect("3 and 12 are valid Pauli indices")
    }

    pub fn matrix<T: Real>(self) -> Matrix4<T> {
        pauli_tau(self.pauli())
    }

    /// Diagonal of the (diagonal) measurement operator.
    pub(crate) fn diag<T: Real>(self) -> [T; 4] {
        let one = T::one();
        match self {
            Measurement::Tau3 => [one, -one, one, -one],
            Measurement::Tau12 => [one, one, -one, -one],
        }
    }
}

/// One experiment: an ordered gate sequence (applied first-to-last) followed
/// by a Pauli measurement on the `|00>` initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Setting<T> {
    gates: Vec<GateToken<T>>,
    measurement: Measurement,
}

impl<T: Real> Setting<T> {
    /// A setting must contain at least one CNOT (otherwise its response
    /// carries no information about the error parameters) and all literal
    /// angles must be finite and within `[0, 2pi]`.
    pub fn new(gates: Vec<GateToken<T>>, measurement: Measurement) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::EmptyGateList(0));
        }
        if !gates.iter().any(|g| matches!(g, GateToken::Cnot)) {
            return Err(Error::NoCnot(0));
        }
        let two_pi = T::PI() + T::PI();
        for gate in &gates {
            if let GateToken::Rotation { angle: AngleExpr::Literal(v), .. } = gate {
                if !v.is_finite() || *v < T::zero() || *v > two_pi {
                    return Err(Error::AngleOutOfBounds {
                        name: "<literal>".into(),
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(Setting { gates, measurement })
    }

    pub fn gates(&self) -> &[GateToken<T>] {
        &self.gates
    }

    pub fn measurement(&self) -> Measurement {
        self.measurement
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, GateToken::Cnot)).count()
    }

    /// Largest parameter index referenced, if any.
    pub(crate) fn max_param_id(&self) -> Option<usize> {
        self.gates
            .iter()
            .filter_map(|g| match g {
                GateToken::Rotation { angle: AngleExpr::Param(ParamId(i)), .. } => Some(*i),
                _ => None,
            })
            .max()
    }
}

/// The ideal CNOT, control on qubit 1: `|0><0| (x) I + |1><1| (x) sigma_1`.
pub fn cnot<T: Real>() -> Matrix4<T> {
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    let p0 = Matrix2([[one, zero], [zero, zero]]);
    let p1 = Matrix2([[zero, zero], [zero, one]]);
    Matrix4::kron(&p0, &sigma(0)).add(&Matrix4::kron(&p1, &sigma(1)))
}

/// Rotation matrix without input validation; callers guarantee finiteness.
pub(crate) fn rotation_matrix<T: Real>(axis: Axis, qubit: Qubit, theta: T) -> Matrix4<T> {
    let half = theta / T::of(2.0);
    let c = C::new(half.cos(), T::zero());
    let ms = C::new(T::zero(), -half.sin());
    let s = match axis {
        Axis::X => sigma::<T>(1),
        Axis::Y => sigma::<T>(2),
    };
    let mut r = Matrix2([[C::new(T::zero(), T::zero()); 2]; 2]);
    let eye: Matrix2<T> = Matrix2::identity();
    for i in 0..2 {
        for j in 0..2 {
            r.0[i][j] = eye.0[i][j] * c + s.0[i][j] * ms;
        }
    }
    match qubit {
        Qubit::One => Matrix4::kron(&r, &Matrix2::identity()),
        Qubit::Two => Matrix4::kron(&Matrix2::identity(), &r),
    }
}

/// `X_theta = exp(-i theta/2 sigma_1)` or `Y_theta = exp(-i theta/2 sigma_2)`
/// on the given qubit, identity on the other.
pub fn rotation_gate<T: Real>(axis: Axis, qubit: Qubit, theta: T) -> Result<Matrix4<T>> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("rotation angle"));
    }
    Ok(rotation_matrix(axis, qubit, theta))
}

/// The exact coherent error operator `exp(-i sum_k p_k tau_k)`; unitary.
pub fn error_operator_exact<T: Real>(p: &ErrorVector<T>) -> Matrix4<T> {
    if p.is_zero() {
        return Matrix4::identity();
    }
    let mut h = Matrix4::zeros();
    for (coeff, tau) in p.as_slice().iter().zip(all_taus::<T>()) {
        if *coeff == T::zero() {
            continue;
        }
        h = h.add(&tau.scale(C::new(*coeff, T::zero())));
    }
    exp_neg_i_hermitian(&h)
}

/// First-order error operator `I - i sum_k p_k tau_k`; not unitary in general.
pub fn error_operator_linear<T: Real>(p: &ErrorVector<T>) -> Matrix4<T> {
    let mut e = Matrix4::identity();
    for (coeff, tau) in p.as_slice().iter().zip(all_taus::<T>()) {
        if *coeff == T::zero() {
            continue;
        }
        e = e.add(&tau.scale(C::new(T::zero(), -*coeff)));
    }
    e
}

/// The implemented (perturbed) CNOT: ideal CNOT followed by the error
/// operator in matrix order, `CNOT . E(p)`.
pub fn perturbed_cnot<T: Real>(p: &ErrorVector<T>) -> Matrix4<T> {
    cnot().mul(&error_operator_exact(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn zero_rotation_is_identity() {
        let g = rotation_gate::<f64>(Axis::X, Qubit::One, 0.0).unwrap();
        assert!(g.sub(&Matrix4::identity()).max_abs() < TOL);
    }

    #[test]
    fn pi_rotation_on_qubit_two() {
        // X_pi = -i sigma_1, so the gate is sigma_0 (x) (-i sigma_1).
        let g = rotation_gate::<f64>(Axis::X, Qubit::Two, std::f64::consts::PI).unwrap();
        let want = Matrix4::kron(&sigma::<f64>(0), &sigma(1)).scale(C::new(0.0, -1.0));
        assert!(g.sub(&want).max_abs() < TOL);
    }

    #[test]
    fn rotations_compose_and_invert() {
        let h = std::f64::consts::FRAC_PI_2;
        let a = rotation_gate::<f64>(Axis::Y, Qubit::One, h).unwrap();
        let b = rotation_gate::<f64>(Axis::Y, Qubit::One, std::f64::consts::PI).unwrap();
        assert!(a.mul(&a).sub(&b).max_abs() < TOL);
        let inv = rotation_gate::<f64>(Axis::Y, Qubit::One, -h).unwrap();
        assert!(a.mul(&inv).sub(&Matrix4::identity()).max_abs() < TOL);
    }

    #[test]
    fn rotation_rejects_non_finite() {
        assert!(rotation_gate::<f64>(Axis::X, Qubit::One, f64::NAN).is_err());
    }

    #[test]
    fn gates_are_unitary() {
        for (axis, qubit, theta) in [
            (Axis::X, Qubit::One, 0.7),
            (Axis::Y, Qubit::Two, 2.4),
            (Axis::Y, Qubit::One, 5.9),
        ] {
            let g = rotation_gate::<f64>(axis, qubit, theta).unwrap();
            assert!(g.unitarity_defect() < TOL);
        }
        assert!(cnot::<f64>().unitarity_defect() < TOL);
    }

    #[test]
    fn error_operator_identity_at_zero() {
        let e = error_operator_exact(&ErrorVector::<f64>::zero());
        assert!(e.sub(&Matrix4::identity()).max_abs() < TOL);
    }

    #[test]
    fn error_operator_single_pauli() {
        // exp(-i (pi/2) tau_5) = cos(pi/2) I - i sin(pi/2) tau_5 = -i tau_5
        let k5 = PauliIndex::new(5).unwrap();
        let p = ErrorVector::basis(k5, std::f64::consts::FRAC_PI_2);
        let e = error_operator_exact(&p);
        let want = pauli_tau::<f64>(k5).scale(C::new(0.0, -1.0));
        assert!(e.sub(&want).max_abs() < TOL);
    }

    #[test]
    fn exact_matches_taylor_for_small_p() {
        // Oracle: truncated Taylor series I - i H; second order is O(|p|^2).
        let mut coeffs = [0.0_f64; 15];
        let mut state = 0x1234_5678_u64;
        let mut norm2 = 0.0;
        for c in &mut coeffs {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            *c = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            norm2 += *c * *c;
        }
        let scale = 1e-3 / norm2.sqrt();
        for c in &mut coeffs {
            *c *= scale;
        }
        let p = ErrorVector::new(coeffs).unwrap();
        let defect = error_operator_exact(&p).sub(&error_operator_linear(&p)).max_abs();
        assert!(defect <= 1e-5, "defect {defect}");
    }

    #[test]
    fn linear_error_operator_definition() {
        let k1 = PauliIndex::new(1).unwrap();
        let p = ErrorVector::basis(k1, 1.0_f64);
        let want = Matrix4::identity().add(&pauli_tau::<f64>(k1).scale(C::new(0.0, -1.0)));
        assert!(error_operator_linear(&p).sub(&want).max_abs() == 0.0);
    }

    #[test]
    fn linear_defect_scales_quadratically() {
        // Richardson-style check: the exact/linear defect drops ~100x when
        // the error norm drops 10x.
        let k9 = PauliIndex::new(9).unwrap();
        let defect = |norm: f64| {
            let p = ErrorVector::basis(k9, norm);
            error_operator_exact(&p).sub(&error_operator_linear(&p)).max_abs()
        };
        let ratio = defect(1e-2) / defect(1e-3);
        assert!((80.0..120.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn perturbed_cnot_factorization() {
        // CNOT^dag . perturbed = E(p) by construction; check the adjoint
        // rearrangement perturbed^dag . CNOT = E(p)^dag.
        let mut coeffs = [0.0_f64; 15];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = 1e-3 * ((i as f64) - 7.0) / 7.0;
        }
        let p = ErrorVector::new(coeffs).unwrap();
        let lhs = perturbed_cnot(&p).adjoint().mul(&cnot());
        let rhs = error_operator_exact(&p).adjoint();
        assert!(lhs.sub(&rhs).max_abs() < TOL);
        assert!(perturbed_cnot(&p).unitarity_defect() < TOL);
        let ideal = perturbed_cnot(&ErrorVector::<f64>::zero());
        assert!(ideal.sub(&cnot()).max_abs() < TOL);
    }

    #[test]
    fn setting_requires_a_cnot() {
        let rot = GateToken::rotation(Axis::X, Qubit::One, AngleExpr::Literal(1.0_f64));
        assert!(matches!(Setting::new(vec![rot], Measurement::Tau3), Err(Error::NoCnot(_))));
        assert!(matches!(
            Setting::new(Vec::<GateToken<f64>>::new(), Measurement::Tau3),
            Err(Error::EmptyGateList(_))
        ));
        assert!(Setting::new(vec![GateToken::Cnot, rot], Measurement::Tau12).is_ok());
    }

    #[test]
    fn setting_rejects_out_of_range_literal() {
        let rot = GateToken::rotation(Axis::X, Qubit::One, AngleExpr::Literal(7.0_f64));
        assert!(Setting::new(vec![GateToken::Cnot, rot], Measurement::Tau3).is_err());
    }
}
