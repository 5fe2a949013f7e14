//! Text formats: settings files describing a design, angle files carrying a
//! parameter assignment, and error-vector files.
//!
//! Settings file grammar (one line per statement, `#` starts a comment):
//!
//! ```text
//! version 1
//! param theta1              # free parameter, defaults to pi/2
//! param theta = 0.62208pi   # fixed parameter
//! CNOT X1(0.5pi) | T12
//! X1(@theta1) CNOT | T3
//! ```
//!
//! Gates are `CNOT`, `X1(a)`, `Y1(a)`, `X2(a)`, `Y2(a)`; an angle `a` is a
//! literal in radians (`1.5708`), a multiple of pi (`0.5pi`), or a parameter
//! reference (`@name`). The measurement after `|` is `T3` or `T12`.

use std::f64::consts::PI;

use gatecal::{
    AngleExpr, Axis, Design64, ErrorVector64, GateToken, Measurement, ParamId, Qubit, Setting,
    PAULI_COUNT,
};
use thiserror::Error;

/// Parse failure with a 1-based line number.
#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, message: message.into() })
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Parse an angle literal: radians (`1.234`) or a multiple of pi (`0.5pi`).
fn parse_angle_literal(token: &str, line: usize) -> Result<f64, FormatError> {
    let (num, factor) = match token.strip_suffix("pi") {
        Some(prefix) => (prefix, PI),
        None => (token, 1.0),
    };
    match num.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v * factor),
        _ => err(line, format!("invalid angle `{token}`")),
    }
}

fn serialize_angle_literal(value: f64) -> String {
    // `{}` prints the shortest decimal that round-trips through parsing.
    format!("{value}")
}

#[derive(Debug)]
struct ParamDecl {
    name: String,
    value: Option<f64>,
}

/// Parse a settings document into a design. Free parameters (declared
/// without a value) default to pi/2.
pub fn parse_settings(text: &str) -> Result<Design64, FormatError> {
    let mut lines = significant_lines(text);
    match lines.next() {
        Some((_, "version 1")) => {}
        Some((n, other)) => {
            return err(n, format!("expected `version 1` header, found `{other}`"))
        }
        None => return err(1, "empty settings document"),
    }

    let mut params: Vec<ParamDecl> = Vec::new();
    let mut settings: Vec<Setting<f64>> = Vec::new();
    let mut seen_setting = false;

    for (line_no, line) in lines {
        if let Some(rest) = line.strip_prefix("param ") {
            if seen_setting {
                return err(line_no, "parameter declarations must precede settings");
            }
            let (name, value) = match rest.split_once('=') {
                Some((name, value)) => {
                    (name.trim(), Some(parse_angle_literal(value.trim(), line_no)?))
                }
                None => (rest.trim(), None),
            };
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return err(line_no, format!("invalid parameter name `{name}`"));
            }
            if params.iter().any(|p| p.name == name) {
                return err(line_no, format!("duplicate parameter `{name}`"));
            }
            params.push(ParamDecl { name: name.to_string(), value });
            continue;
        }

        seen_setting = true;
        let (gates_part, meas_part) = match line.split_once('|') {
            Some(split) => split,
            None => return err(line_no, "setting line is missing the `| T3`/`| T12` measurement"),
        };
        let measurement = match meas_part.trim() {
            "T3" => Measurement::Tau3,
            "T12" => Measurement::Tau12,
            other => return err(line_no, format!("unknown measurement `{other}`")),
        };
        let mut gates = Vec::new();
        for token in gates_part.split_whitespace() {
            gates.push(parse_gate_token(token, &params, line_no)?);
        }
        if gates.is_empty() {
            return err(line_no, "setting has an empty gate list");
        }
        match Setting::new(gates, measurement) {
            Ok(setting) => settings.push(setting),
            Err(e) => return err(line_no, e.to_string()),
        }
    }

    let names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    let assignment: Vec<f64> =
        params.iter().map(|p| p.value.unwrap_or(std::f64::consts::FRAC_PI_2)).collect();
    Design64::new(settings, names, assignment)
        .map_err(|e| FormatError { line: 0, message: e.to_string() })
}

fn parse_gate_token(
    token: &str,
    params: &[ParamDecl],
    line: usize,
) -> Result<GateToken<f64>, FormatError> {
    if token == "CNOT" {
        return Ok(GateToken::Cnot);
    }
    let (head, rest) = token.split_at(token.len().min(2));
    let (axis, qubit) = match head {
        "X1" => (Axis::X, Qubit::One),
        "Y1" => (Axis::Y, Qubit::One),
        "X2" => (Axis::X, Qubit::Two),
        "Y2" => (Axis::Y, Qubit::Two),
        _ => return err(line, format!("unknown gate token `{token}`")),
    };
    let inner = rest
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| FormatError {
            line,
            message: format!("malformed rotation `{token}`, expected `{head}(<angle>)`"),
        })?;
    let angle = if let Some(name) = inner.strip_prefix('@') {
        let idx = params
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| FormatError {
                line,
                message: format!("unresolved parameter `@{name}`"),
            })?;
        AngleExpr::Param(ParamId(idx))
    } else {
        AngleExpr::Literal(parse_angle_literal(inner, line)?)
    };
    Ok(GateToken::rotation(axis, qubit, angle))
}

/// Serialize a design back into the settings format. Parameters are written
/// with their current assignment; parsing the output reproduces the design
/// exactly.
pub fn serialize_settings(design: &Design64) -> String {
    let mut out = String::from("version 1\n");
    for (name, value) in design.param_names().iter().zip(design.assignment()) {
        out.push_str(&format!("param {name} = {}\n", serialize_angle_literal(*value)));
    }
    for setting in design.settings() {
        let mut tokens: Vec<String> = Vec::new();
        for gate in setting.gates() {
            tokens.push(match gate {
                GateToken::Cnot => "CNOT".to_string(),
                GateToken::Rotation { axis, qubit, angle } => {
                    let head = match (axis, qubit) {
                        (Axis::X, Qubit::One) => "X1",
                        (Axis::Y, Qubit::One) => "Y1",
                        (Axis::X, Qubit::Two) => "X2",
                        (Axis::Y, Qubit::Two) => "Y2",
                    };
                    let inner = match angle {
                        AngleExpr::Literal(v) => serialize_angle_literal(*v),
                        AngleExpr::Param(ParamId(i)) => format!("@{}", design.param_names()[*i]),
                    };
                    format!("{head}({inner})")
                }
            });
        }
        let meas = match setting.measurement() {
            Measurement::Tau3 => "T3",
            Measurement::Tau12 => "T12",
        };
        out.push_str(&format!("{} | {}\n", tokens.join(" "), meas));
    }
    out
}

/// Parse an angle file (`name = <angle>` per line) against a design;
/// unassigned parameters keep the design's defaults.
pub fn parse_angle_file(text: &str, design: &Design64) -> Result<Vec<f64>, FormatError> {
    let mut assignment = design.assignment().to_vec();
    for (line_no, line) in significant_lines(text) {
        let (name, value) = match line.split_once('=') {
            Some((name, value)) => (name.trim(), value.trim()),
            None => return err(line_no, "expected `name = <angle>`"),
        };
        let idx = design
            .param_index(name)
            .ok_or_else(|| FormatError {
                line: line_no,
                message: format!("unknown parameter `{name}`"),
            })?;
        assignment[idx] = parse_angle_literal(value, line_no)?;
    }
    Ok(assignment)
}

/// Write an angle file with values in units of pi, 6 significant digits.
pub fn write_angle_file(names: &[String], angles: &[f64]) -> String {
    let mut out = String::new();
    for (name, value) in names.iter().zip(angles) {
        out.push_str(&format!("{name} = {}pi\n", crate::report::fmt_sig(value / PI, 6)));
    }
    out
}

/// Parse an error-vector file: 15 whitespace-separated numbers.
pub fn parse_ptrue(text: &str) -> Result<ErrorVector64, FormatError> {
    let mut values = Vec::new();
    for (line_no, line) in significant_lines(text) {
        for token in line.split_whitespace() {
            match token.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return err(line_no, format!("invalid number `{token}`")),
            }
        }
    }
    if values.len() != PAULI_COUNT {
        return err(0, format!("expected {PAULI_COUNT} values, got {}", values.len()));
    }
    ErrorVector64::from_slice(&values)
        .map_err(|e| FormatError { line: 0, message: e.to_string() })
}
