//! Weyl-Heisenberg data augmentation.
//!
//! Data vectors are amplitude-encoded into a density matrix, smoothed by a
//! localized channel of Weyl-Heisenberg displacements `W(x, z)` and denoised by
//! projecting onto the leading eigenvectors. The crate covers the operator
//! algebra ([`weyl`]), gate-level compilation ([`circuit`]), the channel
//! ([`channel`]), the synthetic dataset ([`dataset`]), PCA denoising
//! ([`denoise`]) and the experiment harness ([`harness`]).
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod channel;
pub mod circuit;
pub mod dataset;
pub mod denoise;
pub mod density;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use weyl::PhasePoint;

pub type Complex64 = C<f64>;
pub type Operator = matrix::DenseOperator<f64>;
pub type Density = density::DensityMatrix<f64>;
pub type Window = channel::AugmentationWindow<f64>;
pub type Ensemble = dataset::EncodedEnsemble<f64>;
pub type Dataset = dataset::SignalDataset<f64>;
pub type QuantumCircuit = circuit::Circuit<f64>;
pub type State = circuit::StateVector<f64>;

pub type Complex32 = C<f32>;
pub type Operator32 = matrix::DenseOperator<f32>;
pub type Density32 = density::DensityMatrix<f32>;
pub type Window32 = channel::AugmentationWindow<f32>;
pub type QuantumCircuit32 = circuit::Circuit<f32>;
