//! Two-qubit Pauli basis `tau_k = sigma_i (x) sigma_j` with `k = 4 i + j`,
//! and the 15-component coherent error vector expanded in that basis.

use crate::error::{Error, Result};
use crate::linalg::{Matrix2, Matrix4, C};
use crate::scalar::Real;

/// Number of non-identity two-qubit Pauli operators.
pub const PAULI_COUNT: usize = 15;

/// Index of a non-identity two-qubit Pauli operator, `1..=15`.
///
/// The factors `(i, j)` of `tau_k = sigma_i (x) sigma_j` are recovered from
/// `k = 4 i + j`; `(0, 0)` (the identity) is excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub fn new(k: usize) -> Result<Self> {
        if (1..=PAULI_COUNT).contains(&k) {
            Ok(PauliIndex(k as u8))
        } else {
            Err(Error::PauliIndexOutOfRange(k))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Single-qubit factor indices `(i, j)` with `k = 4 i + j`.
    pub fn factors(self) -> (usize, usize) {
        (self.get() / 4, self.get() % 4)
    }

    pub fn all() -> impl Iterator<Item = PauliIndex> {
        (1..=PAULI_COUNT).map(|k| PauliIndex(k as u8))
    }
}

/// Single-qubit Pauli matrix `sigma_i`, `i in 0..=3` (`sigma_0 = I`).
pub fn sigma<T: Real>(i: usize) -> Matrix2<T> {
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    let mi = C::new(T::zero(), -T::one());
    let pi = C::new(T::zero(), T::one());
    match i {
        0 => Matrix2([[one, zero], [zero, one]]),
        1 => Matrix2([[zero, one], [one, zero]]),
        2 => Matrix2([[zero, mi], [pi, zero]]),
        3 => Matrix2([[one, zero], [zero, -one]]),
        _ => unreachable!("sigma index restricted to 0..=3"),
    }
}

/// The two-qubit Pauli operator `tau_k = sigma_i (x) sigma_j`.
pub fn pauli_tau<T: Real>(k: PauliIndex) -> Matrix4<T> {
    let (i, j) = k.factors();
    Matrix4::kron(&sigma(i), &sigma(j))
}

/// All 15 `tau` matrices indexed by `k - 1`.
pub(crate) fn all_taus<T: Real>() -> Vec<Matrix4<T>> {
    PauliIndex::all().map(pauli_tau).collect()
}

/// The 15 real coefficients of a coherent error in the `tau` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorVector<T>([T; PAULI_COUNT]);

impl<T: Real> ErrorVector<T> {
    /// Validates that every entry is finite.
    pub fn new(coeffs: [T; PAULI_COUNT]) -> Result<Self> {
        if coeffs.iter().all(|c| c.is_finite()) {
            Ok(ErrorVector(coeffs))
        } else {
            Err(Error::NonFinite("error vector"))
        }
    }

    pub fn zero() -> Self {
        ErrorVector([T::zero(); PAULI_COUNT])
    }

    /// Vector with a single nonzero coefficient at Pauli index `k`.
    pub fn basis(k: PauliIndex, value: T) -> Self {
        let mut coeffs = [T::zero(); PAULI_COUNT];
        coeffs[k.get() - 1] = value;
        ErrorVector(coeffs)
    }

    pub fn from_slice(values: &[T]) -> Result<Self> {
        if values.len() != PAULI_COUNT {
            return Err(Error::DimensionMismatch { expected: PAULI_COUNT, got: values.len() });
        }
        let mut coeffs = [T::zero(); PAULI_COUNT];
        coeffs.copy_from_slice(values);
        Self::new(coeffs)
    }

    pub fn coeff(&self, k: PauliIndex) -> T {
        self.0[k.get() - 1]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    /// Euclidean norm, used by calibration-loop termination checks.
    pub fn norm(&self) -> T {
        self.0.iter().map(|c| *c * *c).sum::<T>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == T::zero())
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut coeffs = self.0;
        for c in &mut coeffs {
            *c *= factor;
        }
        ErrorVector(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut coeffs = self.0;
        for (c, r) in coeffs.iter_mut().zip(rhs.0.iter()) {
            *c -= *r;
        }
        ErrorVector(coeffs)
    }
}

/// Project a 4x4 operator onto the `tau` basis to first order:
/// for `U = I - i sum p_k tau_k + O(p^2)` this recovers `p`.
pub fn project_error_vector<T: Real>(u: &Matrix4<T>) -> ErrorVector<T> {
    let mut coeffs = [T::zero(); PAULI_COUNT];
    for (idx, tau) in all_taus::<T>().iter().enumerate() {
        // p_k = Re[i tr(tau_k U)] / 4
        let tr = tau.mul(u).trace();
        coeffs[idx] = -tr.im / T::of(4.0);
    }
    ErrorVector(coeffs)
}
