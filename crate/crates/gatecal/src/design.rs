//! A calibration design: an ordered list of settings plus the named angle
//! parameters their rotations may reference, with a current assignment.

use crate::error::{Error, Result};
use crate::gates::{AngleExpr, GateToken, Setting};
use crate::scalar::Real;

/// Settings, named angle parameters (bounded to `[0, 2pi]`) and the current
/// parameter assignment. This is the object the optimizer moves.
#[derive(Clone, Debug, PartialEq)]
pub struct Design<T> {
    settings: Vec<Setting<T>>,
    param_names: Vec<String>,
    assignment: Vec<T>,
}

impl<T: Real> Design<T> {
    /// Angle bounds shared by every parameter.
    pub fn bounds() -> (T, T) {
        (T::zero(), T::PI() + T::PI())
    }

    pub fn new(
        settings: Vec<Setting<T>>,
        param_names: Vec<String>,
        assignment: Vec<T>,
    ) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::EmptyDesign);
        }
        for (i, name) in param_names.iter().enumerate() {
            if param_names[..i].contains(name) {
                return Err(Error::DuplicateParameter(name.clone()));
            }
        }
        if assignment.len() != param_names.len() {
            return Err(Error::DimensionMismatch {
                expected: param_names.len(),
                got: assignment.len(),
            });
        }
        for setting in &settings {
            if let Some(max_id) = setting.max_param_id() {
                if max_id >= param_names.len() {
                    return Err(Error::UnresolvedParameter(max_id));
                }
            }
        }
        let design = Design { settings, param_names, assignment: vec![] };
        let assignment = design.checked_angles(&assignment)?;
        Ok(Design { assignment, ..design })
    }

    fn checked_angles(&self, angles: &[T]) -> Result<Vec<T>> {
        if angles.len() != self.param_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.param_names.len(),
                got: angles.len(),
            });
        }
        let (lo, hi) = Self::bounds();
        for (name, value) in self.param_names.iter().zip(angles) {
            if !value.is_finite() || *value < lo || *value > hi {
                return Err(Error::AngleOutOfBounds {
                    name: name.clone(),
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(angles.to_vec())
    }

    pub fn settings(&self) -> &[Setting<T>] {
        &self.settings
    }

    pub fn setting_count(&self) -> usize {
        self.settings.len()
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn param_count(&self) -> usize {
        self.param_names.len()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn assignment(&self) -> &[T] {
        &self.assignment
    }

    /// Same design with a different (bounds-checked) angle assignment.
    pub fn with_assignment(&self, angles: &[T]) -> Result<Self> {
        let assignment = self.checked_angles(angles)?;
        Ok(Design { assignment, ..self.clone() })
    }

    /// Angle value of an expression under the given assignment. The design
    /// guarantees every parameter reference is in range.
    pub fn resolve_angle(&self, expr: &AngleExpr<T>, angles: &[T]) -> T {
        match expr {
            AngleExpr::Literal(v) => *v,
            AngleExpr::Param(id) => angles[id.0],
        }
    }

    /// Resolved rotation angles of one setting (CNOT tokens yield `None`).
    pub(crate) fn resolved_gates<'a>(
        &'a self,
        setting: &'a Setting<T>,
        angles: &'a [T],
    ) -> impl Iterator<Item = ResolvedGate<T>> + 'a {
        setting.gates().iter().map(move |gate| match gate {
            GateToken::Cnot => ResolvedGate::Cnot,
            GateToken::Rotation { axis, qubit, angle } => {
                ResolvedGate::Rotation(*axis, *qubit, self.resolve_angle(angle, angles))
            }
        })
    }
}

/// A gate token with its parameter references substituted.
#[derive(Clone, Copy, Debug)]
pub(crate) enum ResolvedGate<T> {
    Cnot,
    Rotation(crate::gates::Axis, crate::gates::Qubit, T),
}
