//! Bundled reference designs: the original 15-setting calibration protocol
//! (all rotations at pi/2), its fully parameterized variant with 25 free
//! angles, and the reduced-gate-set variant that achieves the optimal
//! statistical error with a single extra angle.

use crate::design::Design;
use crate::gates::{AngleExpr, Axis, GateToken, Measurement, ParamId, Qubit, Setting};
use crate::scalar::Real;

/// The single extra rotation angle of the reduced design, in units of pi.
pub const REDUCED_THETA_OVER_PI: f64 = 0.62208;

/// Zero-based indices (into `theta1..theta25`) of the eight angles that do
/// not affect the optimal perfect-readout objective: theta 1, 2, 6, 9, 15,
/// 16, 17, 18.
pub fn degeneracy_indices() -> [usize; 8] {
    [0, 1, 5, 8, 14, 15, 16, 17]
}

fn lit<T: Real>(v: T) -> AngleExpr<T> {
    AngleExpr::Literal(v)
}

fn x1<T>(angle: AngleExpr<T>) -> GateToken<T> {
    GateToken::rotation(Axis::X, Qubit::One, angle)
}

fn y1<T>(angle: AngleExpr<T>) -> GateToken<T> {
    GateToken::rotation(Axis::Y, Qubit::One, angle)
}

fn x2<T>(angle: AngleExpr<T>) -> GateToken<T> {
    GateToken::rotation(Axis::X, Qubit::Two, angle)
}

fn y2<T>(angle: AngleExpr<T>) -> GateToken<T> {
    GateToken::rotation(Axis::Y, Qubit::Two, angle)
}

fn setting<T: Real>(gates: Vec<GateToken<T>>, measurement: Measurement) -> Setting<T> {
    Setting::new(gates, measurement).expect("bundled settings are valid")
}

/// The original 15-setting protocol: every rotation at pi/2, no parameters.
pub fn baseline_design<T: Real>() -> Design<T> {
    let h = T::FRAC_PI_2();
    let c = GateToken::Cnot;
    use Measurement::{Tau12, Tau3};
    let settings = vec![
        setting(vec![c, x1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), c], Tau12),
        setting(vec![c, y1(lit(h))], Tau12),
        setting(vec![y1(lit(h)), c], Tau12),
        setting(vec![c, x2(lit(h))], Tau3),
        setting(vec![c, y2(lit(h))], Tau3),
        setting(vec![x1(lit(h)), c, x1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), c, y1(lit(h))], Tau12),
        setting(vec![y1(lit(h)), c, x1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), x2(lit(h)), c], Tau3),
        setting(vec![y1(lit(h)), c, y1(lit(h))], Tau12),
        setting(vec![y1(lit(h)), y2(lit(h)), c], Tau3),
        setting(vec![y2(lit(h)), c, x2(lit(h))], Tau3),
        setting(vec![x1(lit(h)), c, c, y1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), y2(lit(h)), c, x2(lit(h))], Tau3),
    ];
    Design::new(settings, vec![], vec![]).expect("baseline design is valid")
}

/// The same sequences with every rotation angle promoted to a free parameter
/// `theta1..theta25`; the default assignment (all pi/2) reproduces
/// [`baseline_design`].
pub fn parameterized_design<T: Real>() -> Design<T> {
    let p = |i: usize| AngleExpr::Param(ParamId(i - 1)); // theta_i
    let c = GateToken::Cnot;
    use Measurement::{Tau12, Tau3};
    let settings = vec![
        setting(vec![c, x1(p(15))], Tau12),
        setting(vec![x1(p(1)), c], Tau12),
        setting(vec![c, y1(p(16))], Tau12),
        setting(vec![y1(p(2)), c], Tau12),
        setting(vec![c, x2(p(17))], Tau3),
        setting(vec![c, y2(p(18))], Tau3),
        setting(vec![x1(p(3)), c, x1(p(19))], Tau12),
        setting(vec![x1(p(4)), c, y1(p(20))], Tau12),
        setting(vec![y1(p(5)), c, x1(p(21))], Tau12),
        setting(vec![x1(p(6)), x2(p(7)), c], Tau3),
        setting(vec![y1(p(8)), c, y1(p(22))], Tau12),
        setting(vec![y1(p(9)), y2(p(10)), c], Tau3),
        setting(vec![y2(p(11)), c, x2(p(23))], Tau3),
        setting(vec![x1(p(12)), c, c, y1(p(24))], Tau12),
        setting(vec![x1(p(13)), y2(p(14)), c, x2(p(25))], Tau3),
    ];
    let names = (1..=25).map(|i| format!("theta{i}")).collect();
    let assignment = vec![T::FRAC_PI_2(); 25];
    Design::new(settings, names, assignment).expect("parameterized design is valid")
}

/// The reduced-gate-set design: gates are drawn from
/// `{CNOT, X1(pi/2), Y1(pi/2), X2(pi/2), Y2(pi/2), X1(theta), Y1(theta)}`
/// with one shared free angle `theta` (default `0.62208 pi`), achieving the
/// same optimal objective as the fully parameterized design.
pub fn reduced_design<T: Real>() -> Design<T> {
    let h = T::FRAC_PI_2();
    let t = AngleExpr::Param(ParamId(0));
    let c = GateToken::Cnot;
    use Measurement::{Tau12, Tau3};
    let settings = vec![
        setting(vec![c, x1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), c], Tau12),
        setting(vec![c, y1(lit(h))], Tau12),
        setting(vec![y1(lit(h)), c], Tau12),
        setting(vec![c, x2(lit(h))], Tau3),
        setting(vec![c, y2(lit(h))], Tau3),
        setting(vec![x1(t), c, x1(lit(h))], Tau12),
        setting(vec![x1(t), c, y1(lit(h))], Tau12),
        setting(vec![y1(t), c, x1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), x2(lit(h)), x2(lit(h)), c], Tau3),
        setting(vec![y1(t), c, y1(lit(h))], Tau12),
        setting(vec![y1(lit(h)), y2(lit(h)), y2(lit(h)), c], Tau3),
        setting(vec![y2(lit(h)), c, x2(lit(h))], Tau3),
        setting(vec![x1(lit(h)), c, c, y1(lit(h))], Tau12),
        setting(vec![x1(lit(h)), x1(lit(h)), y2(lit(h)), c, x2(lit(h))], Tau3),
    ];
    let assignment = vec![T::of(REDUCED_THETA_OVER_PI) * T::PI()];
    Design::new(settings, vec!["theta".into()], assignment).expect("reduced design is valid")
}

/// Optimal angles (in radians) of the parameterized design under perfect
/// readout, reaching `<D^2> . N ~ 3.37`.
pub fn optimal_angles_perfect<T: Real>() -> Vec<T> {
    const OVER_PI: [f64; 25] = [
        1.3864, 0.3743, 1.3779, 1.3779, 1.3779, 1.5722, 1.0000, 1.3779, 0.4003, 1.0000,
        0.5000, 1.5000, 1.0000, 0.5000, 1.0310, 0.2618, 0.3087, 0.8718, 0.5000, 0.5000,
        0.5000, 1.5000, 0.5000, 0.5000, 1.5000,
    ];
    OVER_PI.iter().map(|v| T::of(*v) * T::PI()).collect()
}

/// Optimal angles (in radians) of the parameterized design under the
/// asymmetric readout channel `(F+, F-) = (0.99, 0.98)`, reaching
/// `<D^2> . N ~ 3.58`.
pub fn optimal_angles_imperfect<T: Real>() -> Vec<T> {
    const OVER_PI: [f64; 25] = [
        0.4459, 0.4459, 1.3779, 1.3779, 0.6221, 0.5541, 1.0000, 0.6221, 0.5541, 1.0000,
        1.5000, 0.5000, 1.0000, 1.5000, 1.5541, 0.4459, 1.5541, 0.4459, 1.4993, 0.5007,
        0.5007, 1.4993, 1.5000, 0.5000, 1.5000,
    ];
    OVER_PI.iter().map(|v| T::of(*v) * T::PI()).collect()
}
