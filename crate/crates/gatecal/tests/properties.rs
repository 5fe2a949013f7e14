//! Property tests for the structural invariants of the gate algebra and the
//! statistics layer.

use proptest::prelude::*;

use gatecal::designs::baseline_design;
use gatecal::{
    apply_channel_response, covariance, error_operator_exact, fold, pauli_tau, perturbed_cnot,
    reflect, rotation_gate, Axis, ErrorVector, PauliIndex, Qubit, ReadoutChannel, ReflectScope,
    ShotCount, PAULI_COUNT,
};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn error_vector_strategy(scale: f64) -> impl Strategy<Value = ErrorVector<f64>> {
    proptest::array::uniform15(-scale..scale)
        .prop_map(|coeffs| ErrorVector::new(coeffs).expect("finite"))
}

proptest! {
    #[test]
    fn rotations_are_unitary(theta in -10.0..10.0_f64, qubit in 0..2usize, axis in 0..2usize) {
        let axis = if axis == 0 { Axis::X } else { Axis::Y };
        let qubit = if qubit == 0 { Qubit::One } else { Qubit::Two };
        let g = rotation_gate::<f64>(axis, qubit, theta).unwrap();
        prop_assert!(g.unitarity_defect() <= 1e-12);
    }

    #[test]
    fn error_operators_are_unitary(p in error_vector_strategy(1.0)) {
        prop_assert!(error_operator_exact(&p).unitarity_defect() <= 1e-12);
        prop_assert!(perturbed_cnot(&p).unitarity_defect() <= 1e-12);
    }

    #[test]
    fn responses_stay_within_physical_range(p in error_vector_strategy(0.8), s in 0..15usize) {
        let design = baseline_design::<f64>();
        let r = design.response(s, &p);
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn pauli_projection_inverts_linearization(p in error_vector_strategy(1e-4)) {
        // project(E(p)) = p + O(|p|^2)
        let projected = gatecal::project_error_vector(&error_operator_exact(&p));
        let err = projected.sub(&p).norm();
        prop_assert!(err <= 10.0 * p.norm() * p.norm() + 1e-14, "err {err}");
    }

    #[test]
    fn fold_lands_in_lower_half_and_is_idempotent(
        angles in proptest::collection::vec(0.0..TWO_PI, 1..26),
    ) {
        let folded = fold(&angles);
        for v in &folded {
            prop_assert!((0.0..=std::f64::consts::PI).contains(v));
        }
        prop_assert_eq!(&fold(&folded), &folded);
    }

    #[test]
    fn reflections_are_involutions(
        angles in proptest::collection::vec(0.0..TWO_PI, 1..26),
        idx in 0..26usize,
    ) {
        let twice = reflect(&reflect(&angles, ReflectScope::All), ReflectScope::All);
        for (a, b) in angles.iter().zip(&twice) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let i = idx % angles.len();
        let twice =
            reflect(&reflect(&angles, ReflectScope::Single(i)), ReflectScope::Single(i));
        for (a, b) in angles.iter().zip(&twice) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_entries_are_bounded(
        r in proptest::collection::vec(-1.0..1.0_f64, 1..16),
        shots in 1..100_000u64,
    ) {
        let n = ShotCount::new(shots).unwrap();
        let sigma = covariance(&r, n).unwrap();
        for v in sigma {
            prop_assert!(v >= 0.0);
            prop_assert!(v <= 1.0 / shots as f64 + 1e-15);
        }
    }

    #[test]
    fn channel_maps_responses_into_range(
        r in -1.0..1.0_f64,
        fp in 0.0..1.0_f64,
        fm in 0.0..1.0_f64,
    ) {
        let ch = ReadoutChannel::new(fp, fm).unwrap();
        let rt = apply_channel_response(r, &ch);
        prop_assert!(rt.abs() <= 1.0 + 1e-12);
        // Derived outcome probabilities stay normalized.
        let q_plus = (1.0 + rt) / 2.0;
        let q_minus = (1.0 - rt) / 2.0;
        prop_assert!((q_plus + q_minus - 1.0).abs() < 1e-14);
    }

    #[test]
    fn taus_square_to_identity(k in 1..=PAULI_COUNT) {
        let tau = pauli_tau::<f64>(PauliIndex::new(k).unwrap());
        let defect = tau.mul(&tau).sub(&gatecal::Matrix4x4::identity()).max_abs();
        prop_assert!(defect == 0.0);
    }
}
