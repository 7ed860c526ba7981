//! Plain-text circuit format:
//!
//! ```text
//! QUBITS 2
//! H q1
//! CP q0 q1 1.5707963267948966
//! RZ q0 3.1415926535897931
//! ```
//!
//! `CP` lists the control qubit first. Blank lines and `#` comments are ignored.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Circuit, Gate};

/// Plain decimal with 17 significant digits (round-trips any `f64`).
pub fn format_angle(a: f64) -> String {
    if a == 0.0 || !a.is_finite() {
        return format!("{a}");
    }
    let exponent = a.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{a:.decimals$}")
}

pub fn write_circuit<T: Real, W: Write>(circuit: &Circuit<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "QUBITS {}", circuit.qubits())?;
    for gate in circuit.gates() {
        match *gate {
            Gate::Hadamard { target } => writeln!(out, "H q{target}")?,
            Gate::ZRotation { target, angle } => {
                writeln!(out, "RZ q{target} {}", format_angle(angle.to_f64_lossy()))?
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => writeln!(
                out,
                "CP q{control} q{target} {}",
                format_angle(angle.to_f64_lossy())
            )?,
        }
    }
    Ok(())
}

fn qubit(tok: Option<&str>, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing qubit"))?;
    tok.strip_prefix('q')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("bad qubit `{tok}`")))
}

fn angle<T: Real>(tok: Option<&str>, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing angle"))?;
    tok.parse::<f64>()
        .map(T::lit)
        .map_err(|_| Error::parse(line, format!("bad angle `{tok}`")))
}

pub fn parse_circuit<T: Real>(text: &str) -> Result<Circuit<T>> {
    let mut circuit: Option<Circuit<T>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let op = toks.next().unwrap_or_default();
        if op == "QUBITS" {
            if circuit.is_some() {
                return Err(Error::parse(line, "duplicate QUBITS header"));
            }
            let n = toks
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(line, "bad QUBITS header"))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| Error::parse(line, "gate before QUBITS header"))?;
        let gate = match op {
            "H" => Gate::Hadamard {
                target: qubit(toks.next(), line)?,
            },
            "RZ" => Gate::ZRotation {
                target: qubit(toks.next(), line)?,
                angle: angle(toks.next(), line)?,
            },
            "CP" => Gate::ControlledPhase {
                control: qubit(toks.next(), line)?,
                target: qubit(toks.next(), line)?,
                angle: angle(toks.next(), line)?,
            },
            other => return Err(Error::parse(line, format!("unknown gate `{other}`"))),
        };
        if toks.next().is_some() {
            return Err(Error::parse(line, "trailing tokens"));
        }
        c.push(gate)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    circuit.ok_or_else(|| Error::parse(0, "missing QUBITS header"))
}
