use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::scalar::{cis, norm, Real, C};

use super::{Circuit, Gate};

/// Largest register for which [`circuit_unitary`] builds a dense matrix by default.
pub const DEFAULT_VERIFICATION_CAP: usize = 10;

/// Amplitudes of an `n`-qubit pure state, little-endian basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    qubits: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn basis(qubits: usize, k: usize) -> Self {
        let mut amps = vec![C::zero(); 1 << qubits];
        amps[k] = C::one();
        Self { qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let d = amps.len();
        let qubits = crate::weyl::qubits_for(d)?;
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        norm(&self.amps)
    }

    pub fn apply_gate(&mut self, gate: &Gate<T>) {
        let half = T::lit(0.5);
        match *gate {
            Gate::Hadamard { target } => {
                let mask = 1usize << target;
                let s = T::FRAC_1_SQRT_2();
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | mask];
                        self.amps[i] = (a + b) * s;
                        self.amps[i | mask] = (a - b) * s;
                    }
                }
            }
            Gate::ZRotation { target, angle } => {
                let mask = 1usize << target;
                let lo = cis(-angle * half);
                let hi = cis(angle * half);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a = *a * if i & mask == 0 { lo } else { hi };
                }
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => {
                let mask = (1usize << target) | (1usize << control);
                let ph = cis(angle);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = *a * ph;
                    }
                }
            }
        }
    }
}

/// Runs `circuit` gate by gate on `psi`.
pub fn apply_circuit<T: Real>(
    circuit: &Circuit<T>,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    if psi.qubits != circuit.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << circuit.qubits(),
            got: psi.dim(),
        });
    }
    let mut out = psi.clone();
    for gate in circuit.gates() {
        out.apply_gate(gate);
    }
    Ok(out)
}

/// Dense unitary of `circuit`, column `k` being the image of `|k>`.
pub fn circuit_unitary<T: Real>(circuit: &Circuit<T>, cap: usize) -> Result<DenseOperator<T>> {
    let n = circuit.qubits();
    if n > cap {
        return Err(Error::VerificationScale { qubits: n, cap });
    }
    let d = 1usize << n;
    let mut u = DenseOperator::zeros(d);
    for k in 0..d {
        let col = apply_circuit(circuit, &StateVector::basis(n, k))?;
        for (r, a) in col.amps.into_iter().enumerate() {
            u[(r, k)] = a;
        }
    }
    Ok(u)
}
