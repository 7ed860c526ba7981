//! Gate-level realization of Weyl-Heisenberg operators on `n` qubits.
//!
//! Qubit 0 is the least-significant bit of the basis index `k = sum_j b_j 2^j`.
//! Circuits use three gate kinds: Hadamard, `Rz(theta) = diag(e^{-i theta/2}, e^{i theta/2})`
//! and the controlled phase `diag(1, 1, 1, e^{i theta})`. All compiled circuits
//! agree with their dense counterparts up to a global phase.

mod compile;
mod sim;
mod text;

pub use compile::{compile_clock_power, compile_qft, compile_shift_power, compile_weyl};
pub use sim::{apply_circuit, circuit_unitary, StateVector, DEFAULT_VERIFICATION_CAP};
pub use text::{format_angle, parse_circuit, write_circuit};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T> {
    Hadamard {
        target: usize,
    },
    ZRotation {
        target: usize,
        angle: T,
    },
    ControlledPhase {
        control: usize,
        target: usize,
        angle: T,
    },
}

impl<T: Real> Gate<T> {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Hadamard { target } | Gate::ZRotation { target, .. } => (target, None),
            Gate::ControlledPhase {
                control, target, ..
            } => (target, Some(control)),
        }
    }

    pub fn angle(&self) -> Option<T> {
        match *self {
            Gate::Hadamard { .. } => None,
            Gate::ZRotation { angle, .. } | Gate::ControlledPhase { angle, .. } => Some(angle),
        }
    }

    pub fn adjoint(&self) -> Self {
        match *self {
            Gate::Hadamard { target } => Gate::Hadamard { target },
            Gate::ZRotation { target, angle } => Gate::ZRotation {
                target,
                angle: -angle,
            },
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => Gate::ControlledPhase {
                control,
                target,
                angle: -angle,
            },
        }
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        let (target, control) = self.qubits();
        if target >= qubits {
            return Err(Error::InvalidGate(format!(
                "target q{target} outside {qubits}-qubit register"
            )));
        }
        if let Some(control) = control {
            if control >= qubits {
                return Err(Error::InvalidGate(format!(
                    "control q{control} outside {qubits}-qubit register"
                )));
            }
            if control == target {
                return Err(Error::InvalidGate(format!(
                    "control and target are both q{target}"
                )));
            }
        }
        if let Some(angle) = self.angle() {
            if !angle.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite angle {angle}")));
            }
        }
        Ok(())
    }
}

/// Gate counts and layered depth of a circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CircuitStats {
    pub hadamard: usize,
    pub z_rotation: usize,
    pub controlled_phase: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    qubits: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            gates: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends the gates of `other`, which must act on the same register.
    pub fn extend(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.qubits != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                got: other.qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Reverse-order circuit of adjoint gates.
    pub fn adjoint(&self) -> Self {
        Self {
            qubits: self.qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Mutable access for test fixtures that need to corrupt a circuit.
    #[doc(hidden)]
    pub fn gates_mut(&mut self) -> &mut [Gate<T>] {
        &mut self.gates
    }

    /// Greedy as-soon-as-possible layering: a gate lands one layer after the
    /// latest gate touching any of its qubits.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.qubits];
        let mut depth = 0;
        for gate in &self.gates {
            let (target, control) = gate.qubits();
            let mut layer = frontier[target];
            if let Some(c) = control {
                layer = layer.max(frontier[c]);
            }
            layer += 1;
            frontier[target] = layer;
            if let Some(c) = control {
                frontier[c] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn stats(&self) -> CircuitStats {
        let mut stats = CircuitStats {
            depth: self.depth(),
            ..Default::default()
        };
        for gate in &self.gates {
            match gate {
                Gate::Hadamard { .. } => stats.hadamard += 1,
                Gate::ZRotation { .. } => stats.z_rotation += 1,
                Gate::ControlledPhase { .. } => stats.controlled_phase += 1,
            }
        }
        stats
    }
}
