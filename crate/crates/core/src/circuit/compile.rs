use crate::scalar::Real;
use crate::weyl::PhasePoint;

use super::{Circuit, Gate};

fn binary_fraction<T: Real>(power: u32) -> T {
    // 2 pi / 2^power
    T::TAU() / T::lit(2f64.powi(power as i32))
}

/// `Z_{2^n}^z` as one z-rotation per qubit: qubit `j` carries `2 pi z / 2^(n-j)`.
pub fn compile_clock_power<T: Real>(n: usize, z: i64) -> Circuit<T> {
    assert!(n >= 1, "need at least one qubit");
    let mut c = Circuit::new(n);
    rotation_layer(&mut c, z, false);
    c
}

/// Rotation layer for `Z^power`; `reversed` assigns qubit `j` the angle of qubit `n-1-j`.
fn rotation_layer<T: Real>(c: &mut Circuit<T>, power: i64, reversed: bool) {
    let n = c.qubits();
    let scale = T::from_int(power);
    for j in 0..n {
        let source = if reversed { n - 1 - j } else { j };
        let angle = binary_fraction::<T>((n - source) as u32) * scale;
        c.push(Gate::ZRotation { target: j, angle })
            .expect("compiled gate is valid");
    }
}

/// Swap-free QFT. The circuit realizes `R F` where `F` is the unitary DFT
/// `|k> -> d^{-1/2} sum_l omega^{kl} |l>` and `R` reverses the qubit order.
pub fn compile_qft<T: Real>(n: usize) -> Circuit<T> {
    assert!(n >= 1, "need at least one qubit");
    let mut c = Circuit::new(n);
    for target in (0..n).rev() {
        c.push(Gate::Hadamard { target })
            .expect("compiled gate is valid");
        for control in (0..target).rev() {
            let angle = binary_fraction::<T>((target - control + 1) as u32);
            c.push(Gate::ControlledPhase {
                control,
                target,
                angle,
            })
            .expect("compiled gate is valid");
        }
    }
    c
}

/// `X_{2^n}^x = QFT^dagger Z^x QFT`. The swap-free QFT leaves its output
/// bit-reversed, so the middle rotation layer assigns angles in reverse qubit order.
pub fn compile_shift_power<T: Real>(n: usize, x: i64) -> Circuit<T> {
    let qft = compile_qft::<T>(n);
    let mut c = qft.clone();
    rotation_layer(&mut c, x, true);
    c.extend(&qft.adjoint()).expect("same register");
    c
}

/// `W(x, z)` up to global phase: the shift circuit followed by the clock layer.
pub fn compile_weyl<T: Real>(n: usize, p: PhasePoint) -> Circuit<T> {
    let mut c = compile_shift_power::<T>(n, p.x as i64);
    c.extend(&compile_clock_power(n, p.z as i64))
        .expect("same register");
    c
}
