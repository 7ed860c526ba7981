use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::rng::Stream;
use crate::scalar::{Real, C};
use crate::spectral;

/// Default tolerance for Hermiticity and unit trace.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted as numerically positive.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Scales an `f64` tolerance up to what the scalar type can resolve.
pub(crate) fn tolerance<T: Real>(base: f64) -> T {
    T::lit(base).max(T::epsilon() * T::lit(1e3))
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    op: DenseOperator<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates all density-matrix invariants, including positivity.
    pub fn new(op: DenseOperator<T>) -> Result<Self> {
        let rho = Self::from_trusted(op);
        rho.check()?;
        Ok(rho)
    }

    /// Wraps a matrix known to be a state by construction.
    pub(crate) fn from_trusted(op: DenseOperator<T>) -> Self {
        Self { op }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let w = T::one() / T::from_usize(d).unwrap();
        Self::from_trusted(DenseOperator::identity(d).scale(C::new(w, T::zero())))
    }

    pub fn pure(psi: &[C<T>]) -> Self {
        let mut op = DenseOperator::zeros(psi.len());
        op.add_outer(psi, T::one());
        Self::from_trusted(op)
    }

    /// Random full-rank state `G G^dagger / tr(G G^dagger)` with i.i.d. complex
    /// Gaussian `G`.
    pub fn random(d: usize, rng: &mut Stream) -> Self {
        let g = DenseOperator::from_fn(d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C::new(T::lit(re), T::lit(im))
        });
        let mut op = g.matmul(&g.adjoint());
        let tr = op.trace().re;
        op = op.scale(C::new(T::one() / tr, T::zero()));
        op.symmetrize();
        Self::from_trusted(op)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn as_operator(&self) -> &DenseOperator<T> {
        &self.op
    }

    pub fn into_operator(self) -> DenseOperator<T> {
        self.op
    }

    pub fn purity(&self) -> T {
        // tr(rho^2) = sum |rho_jk|^2 for Hermitian rho
        self.op.entries().iter().map(|a| a.norm_sqr()).sum()
    }

    /// Re-checks Hermiticity, unit trace and positivity.
    pub fn check(&self) -> Result<()> {
        let defect = self.op.hermiticity_defect();
        if defect > tolerance(STATE_TOLERANCE) {
            return Err(Error::NotHermitian {
                deviation: defect.to_f64_lossy(),
            });
        }
        let tr = self.op.trace();
        if (tr - C::new(T::one(), T::zero())).norm() > tolerance(STATE_TOLERANCE) {
            return Err(Error::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let smallest = spectral::eigvalsh(&self.op)?
            .last()
            .copied()
            .unwrap_or(T::zero());
        if smallest < -tolerance::<T>(POSITIVITY_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "negative eigenvalue {smallest}"
            )));
        }
        Ok(())
    }

    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        spectral::trace_distance(&self.op, &other.op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_states() {
        let mut op = DenseOperator::<f64>::identity(2).scale(C::new(0.5, 0.0));
        assert!(DensityMatrix::new(op.clone()).is_ok());
        op[(0, 1)] = C::new(0.0, 0.1);
        assert!(matches!(
            DensityMatrix::new(op.clone()),
            Err(Error::NotHermitian { .. })
        ));
        let neg = DenseOperator::diagonal(&[C::new(1.5, 0.0), C::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(neg).is_err());
        let bad_trace = DenseOperator::<f64>::identity(2);
        assert!(DensityMatrix::new(bad_trace).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = crate::rng::derive(3, &[]);
        for d in [1, 2, 8, 16] {
            DensityMatrix::<f64>::random(d, &mut rng).check().unwrap();
        }
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let psi = [C::new(0.6, 0.0), C::new(0.0, 0.8)];
        let rho = DensityMatrix::<f64>::pure(&psi);
        rho.check().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((DensityMatrix::<f64>::maximally_mixed(4).purity() - 0.25).abs() < 1e-15);
    }
}
