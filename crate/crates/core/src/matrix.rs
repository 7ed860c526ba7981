//! Dense square complex matrices.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T> {
    dim: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = C::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self { dim, entries }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, entries: Vec<C<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn diagonal(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &v) in diag.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    /// `|a><b|` scaled by `weight`.
    pub fn outer(a: &[C<T>], b: &[C<T>], weight: T) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |r, c| a[r] * b[c].conj() * weight)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [C<T>] {
        &mut self.entries
    }

    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<C<T>> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            let out_row = &mut out.entries[r * d..(r + 1) * d];
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.entries[k * d..(k + 1) * d];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.dim, v.len(), "matvec dimension mismatch");
        (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: T) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = *a + b * s;
        }
    }

    /// Adds `weight * |v><v|` in place.
    pub fn add_outer(&mut self, v: &[C<T>], weight: T) {
        assert_eq!(self.dim, v.len());
        let d = self.dim;
        for r in 0..d {
            let a = v[r] * weight;
            let row = &mut self.entries[r * d..(r + 1) * d];
            for (o, b) in row.iter_mut().zip(v) {
                *o = *o + a * b.conj();
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, k| acc + self[(k, k)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim;
        let mut worst = T::zero();
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `max |U^dagger U - I|` over all entries.
    pub fn unitarity_defect(&self) -> T {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() < tol
    }

    /// Projective overlap `|tr(U^dagger V)| / d`; equals 1 iff `V = c U` for unitaries.
    pub fn fidelity(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        let overlap = self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(C::zero(), |acc: C<T>, (a, b)| acc + a.conj() * b);
        overlap.norm() / T::from_usize(self.dim).unwrap()
    }

    /// Replaces the matrix with `(A + A^dagger) / 2`.
    pub fn symmetrize(&mut self) {
        let d = self.dim;
        let half = T::lit(0.5);
        for r in 0..d {
            for c in r..d {
                let v = (self[(r, c)] + self[(c, r)].conj()) * half;
                self[(r, c)] = v;
                self[(c, r)] = v.conj();
            }
        }
    }

    /// Converts the scalar type, e.g. `f64 -> f32`.
    pub fn cast<U: Real>(&self) -> DenseOperator<U> {
        DenseOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|a| C::new(U::lit(a.re.to_f64_lossy()), U::lit(a.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for DenseOperator<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.entries[r * self.dim + c]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseOperator<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.entries[r * self.dim + c]
    }
}
