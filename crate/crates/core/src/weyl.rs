//! Weyl-Heisenberg (generalized Pauli) operators on `C^d`, `d = 2^n`.
//!
//! `W(x, z) = exp(-i pi x z / d) Z^z X^x` with the clock `Z = diag(omega^k)`,
//! `omega = exp(2 pi i / d)`, and the shift `X |k> = |k + 1 mod d>`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::scalar::{cis, Real, C};

/// Tolerance above which [`compose_weyl`] reports an algebra violation.
pub const COMPOSITION_TOLERANCE: f64 = 1e-10;

/// A displacement `(x, z)` in `Z_d x Z_d`, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    pub x: usize,
    pub z: usize,
}

impl PhasePoint {
    /// Reduces arbitrary (possibly negative) displacements modulo `d`.
    pub fn new(x: i64, z: i64, d: usize) -> Self {
        Self {
            x: reduce(x, d),
            z: reduce(z, d),
        }
    }

    pub const fn origin() -> Self {
        Self { x: 0, z: 0 }
    }

    pub fn add(self, other: Self, d: usize) -> Self {
        Self {
            x: (self.x + other.x) % d,
            z: (self.z + other.z) % d,
        }
    }
}

#[inline]
pub(crate) fn reduce(v: i64, d: usize) -> usize {
    v.rem_euclid(d as i64) as usize
}

/// Returns `n` for `d = 2^n`, `n >= 1`.
pub fn qubits_for(d: usize) -> Result<usize> {
    if d >= 2 && d.is_power_of_two() {
        Ok(d.trailing_zeros() as usize)
    } else {
        Err(Error::Dimension(d))
    }
}

/// `omega_d^e` with the exponent reduced exactly before evaluation.
#[inline]
pub fn root_of_unity<T: Real>(d: usize, e: i64) -> C<T> {
    let r = reduce(e, d);
    cis(T::TAU() * T::from_usize(r).unwrap() / T::from_usize(d).unwrap())
}

/// The scalar `exp(-i pi x z / d)` of `W(x, z)`.
pub fn weyl_phase<T: Real>(d: usize, p: PhasePoint) -> C<T> {
    // exp(-i pi xz/d) = omega_{2d}^{-xz}
    root_of_unity(2 * d, -((p.x * p.z) as i64))
}

pub fn build_clock<T: Real>(d: usize, z: i64) -> Result<DenseOperator<T>> {
    qubits_for(d)?;
    let diag: Vec<C<T>> = (0..d).map(|k| root_of_unity(d, k as i64 * z)).collect();
    Ok(DenseOperator::diagonal(&diag))
}

pub fn build_shift<T: Real>(d: usize, x: i64) -> Result<DenseOperator<T>> {
    qubits_for(d)?;
    let x = reduce(x, d);
    let mut m = DenseOperator::zeros(d);
    for k in 0..d {
        m[((k + x) % d, k)] = C::new(T::one(), T::zero());
    }
    Ok(m)
}

pub fn build_weyl<T: Real>(d: usize, p: PhasePoint) -> Result<DenseOperator<T>> {
    qubits_for(d)?;
    let phase = weyl_phase::<T>(d, p);
    let mut m = DenseOperator::zeros(d);
    for c in 0..d {
        let r = (c + p.x) % d;
        m[(r, c)] = phase * root_of_unity::<T>(d, (r * p.z) as i64);
    }
    Ok(m)
}

/// `W(p) psi` without forming the matrix.
pub fn apply_weyl<T: Real>(d: usize, p: PhasePoint, psi: &[C<T>]) -> Result<Vec<C<T>>> {
    qubits_for(d)?;
    if psi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: psi.len(),
        });
    }
    let phase = weyl_phase::<T>(d, p);
    Ok((0..d)
        .map(|j| phase * root_of_unity::<T>(d, (j * p.z) as i64) * psi[(j + d - p.x) % d])
        .collect())
}

/// `W(p) rho W(p)^dagger` in `O(d^2)`:
/// entry `(j, k)` is `omega^{z (j - k)} rho[j - x, k - x]`; the scalar phase cancels.
pub fn conjugate<T: Real>(
    d: usize,
    p: PhasePoint,
    rho: &DenseOperator<T>,
) -> Result<DenseOperator<T>> {
    let mut out = DenseOperator::zeros(d);
    conjugate_accumulate(d, p, rho, T::one(), &mut out)?;
    Ok(out)
}

/// Adds `weight * W(p) rho W(p)^dagger` into `acc`.
pub fn conjugate_accumulate<T: Real>(
    d: usize,
    p: PhasePoint,
    rho: &DenseOperator<T>,
    weight: T,
    acc: &mut DenseOperator<T>,
) -> Result<()> {
    qubits_for(d)?;
    for m in [rho.dim(), acc.dim()] {
        if m != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m,
            });
        }
    }
    let phases: Vec<C<T>> = (0..d)
        .map(|t| root_of_unity::<T>(d, (t * p.z) as i64) * weight)
        .collect();
    for j in 0..d {
        let src = (j + d - p.x) % d;
        let src_row = rho.row(src);
        for k in 0..d {
            let diff = (j + d - k) % d;
            let v = phases[diff] * src_row[(k + d - p.x) % d];
            acc[(j, k)] = acc[(j, k)] + v;
        }
    }
    Ok(())
}

/// Result of multiplying two Weyl operators: `W(p) W(q) = phase * W(sum)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Composition<T> {
    pub sum: PhasePoint,
    pub phase: C<T>,
}

pub fn compose_weyl<T: Real>(d: usize, p: PhasePoint, q: PhasePoint) -> Result<Composition<T>> {
    let product = build_weyl::<T>(d, p)?.matmul(&build_weyl(d, q)?);
    let sum = p.add(q, d);
    let target = build_weyl::<T>(d, sum)?;
    let (idx, _) = target
        .entries()
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_zero())
        .expect("Weyl operators are monomial");
    let phase = product.entries()[idx] / target.entries()[idx];
    let deviation = product.max_abs_diff(&target.scale(phase)).to_f64_lossy();
    if deviation.is_nan() || deviation >= COMPOSITION_TOLERANCE {
        return Err(Error::AlgebraViolation { deviation });
    }
    Ok(Composition { sum, phase })
}
