//! Measurement responses: evaluate a setting's gate sequence on `|00>` and
//! take the expectation value of its Pauli observable.
//!
//! Gates listed first act first; as matrices the first gate is the rightmost
//! factor of the sequence product. Every CNOT token evaluates to the same
//! perturbed gate `CNOT . E(p)`.

use crate::design::{Design, ResolvedGate};
use crate::error::{Error, Result};
use crate::gates::{perturbed_cnot, rotation_matrix, Setting};
use crate::linalg::{Matrix4, Vector4, C};
use crate::pauli::ErrorVector;
use crate::scalar::Real;

pub(crate) fn ket00<T: Real>() -> Vector4<T> {
    let mut v = [C::new(T::zero(), T::zero()); 4];
    v[0] = C::new(T::one(), T::zero());
    v
}

fn apply_sequence<T: Real>(
    design: &Design<T>,
    setting: &Setting<T>,
    angles: &[T],
    cnot_gate: &Matrix4<T>,
) -> Vector4<T> {
    let mut psi = ket00();
    for gate in design.resolved_gates(setting, angles) {
        psi = match gate {
            ResolvedGate::Cnot => cnot_gate.mul_vec(&psi),
            ResolvedGate::Rotation(axis, qubit, theta) => {
                rotation_matrix(axis, qubit, theta).mul_vec(&psi)
            }
        };
    }
    psi
}

fn expectation<T: Real>(setting: &Setting<T>, psi: &Vector4<T>) -> T {
    let diag = setting.measurement().diag::<T>();
    let mut r = T::zero();
    for (d, amp) in diag.iter().zip(psi) {
        r += *d * amp.norm_sqr();
    }
    // The observable has eigenvalues +-1; clamp roundoff excess.
    r.min(T::one()).max(-T::one())
}

impl<T: Real> Design<T> {
    /// The sequence product of one setting as a matrix, with each CNOT token
    /// evaluated as the perturbed gate for `p`.
    pub fn sequence_unitary(&self, setting: usize, p: &ErrorVector<T>) -> Matrix4<T> {
        let gate = perturbed_cnot(p);
        let mut u = Matrix4::identity();
        for resolved in self.resolved_gates(&self.settings()[setting], self.assignment()) {
            let m = match resolved {
                ResolvedGate::Cnot => gate,
                ResolvedGate::Rotation(axis, qubit, theta) => {
                    rotation_matrix(axis, qubit, theta)
                }
            };
            u = m.mul(&u);
        }
        u
    }

    /// Measurement response of one setting under the design's own assignment.
    pub fn response(&self, setting: usize, p: &ErrorVector<T>) -> T {
        let gate = perturbed_cnot(p);
        self.response_with_gate(setting, &gate)
    }

    /// Response under an explicit angle assignment.
    pub fn response_at(&self, setting: usize, p: &ErrorVector<T>, angles: &[T]) -> Result<T> {
        if angles.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                got: angles.len(),
            });
        }
        let gate = perturbed_cnot(p);
        let psi = apply_sequence(self, &self.settings()[setting], angles, &gate);
        Ok(expectation(&self.settings()[setting], &psi))
    }

    /// Response with an arbitrary matrix substituted for every CNOT token;
    /// the calibration loop uses this to evaluate partially corrected gates.
    pub fn response_with_gate(&self, setting: usize, gate: &Matrix4<T>) -> T {
        let psi = apply_sequence(self, &self.settings()[setting], self.assignment(), gate);
        expectation(&self.settings()[setting], &psi)
    }

    /// All responses at the design's own assignment.
    pub fn responses(&self, p: &ErrorVector<T>) -> Vec<T> {
        let gate = perturbed_cnot(p);
        (0..self.setting_count()).map(|s| self.response_with_gate(s, &gate)).collect()
    }
}
