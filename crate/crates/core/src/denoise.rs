//! PCA denoising on (augmented) density matrices.
//!
//! The eigendecomposition is a dense classical solve. Noisy states are
//! projected onto the leading `K` eigenvectors and compared with the clean
//! signals by mean squared distance.

use std::fmt;

use crate::channel::{apply_channel_dense, apply_channel_stochastic, AugmentationWindow, Backend};
use crate::dataset::{center, encode, ensemble_density, SignalDataset, ZERO_NORM};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::scalar::{inner, norm_sqr, Real, C};
use crate::spectral;

/// Hermiticity defect above which [`eigendecompose`] refuses its input.
pub const HERMITIAN_INPUT_TOLERANCE: f64 = 1e-8;

/// Eigenvalues (descending) and orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<C<T>>>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

pub fn eigendecompose<T: Real>(rho: &DensityMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let op = rho.as_operator();
    let defect = op.hermiticity_defect();
    if defect > T::lit(HERMITIAN_INPUT_TOLERANCE) {
        return Err(Error::NotHermitian {
            deviation: defect.to_f64_lossy(),
        });
    }
    let e = spectral::eigh(op)?;
    Ok(SpectralDecomposition {
        eigenvalues: e.values,
        eigenvectors: e.vectors,
    })
}

/// Output of [`project_topk`]. `flagged` marks a renormalized projection that vanished.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection<T> {
    pub vector: Vec<C<T>>,
    pub flagged: bool,
}

/// `sum_{j < K} <v_j, psi> v_j`, optionally rescaled to unit norm.
pub fn project_topk<T: Real>(
    dec: &SpectralDecomposition<T>,
    psi: &[C<T>],
    k: usize,
    renormalize: bool,
) -> Result<Projection<T>> {
    let d = dec.dim();
    if k == 0 || k > d {
        return Err(Error::ComponentsOutOfRange { k, dim: d });
    }
    if psi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: psi.len(),
        });
    }
    let mut out = vec![C::new(T::zero(), T::zero()); d];
    for v in &dec.eigenvectors[..k] {
        let c = inner(v, psi);
        for (o, a) in out.iter_mut().zip(v) {
            *o = *o + a * c;
        }
    }
    if !renormalize {
        return Ok(Projection {
            vector: out,
            flagged: false,
        });
    }
    let n = norm_sqr(&out).sqrt();
    if n <= T::lit(ZERO_NORM) {
        return Ok(Projection {
            vector: vec![C::new(T::zero(), T::zero()); d],
            flagged: true,
        });
    }
    Ok(Projection {
        vector: out.into_iter().map(|a| a / n).collect(),
        flagged: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Noisy,
    Projected,
    Harmoniq,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Noisy, Variant::Projected, Variant::Harmoniq];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Noisy => "Noisy",
            Variant::Projected => "Projected",
            Variant::Harmoniq => "Harmoniq",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenoiseReport {
    pub variant: Variant,
    /// Components kept; 0 for the unprojected baseline.
    pub k: usize,
    pub mse: f64,
    pub per_sample: Vec<f64>,
    /// Samples whose projection vanished.
    pub flagged: Vec<usize>,
}

/// Mean of `|denoised_i - reference_i|^2`.
pub fn mse<T: Real>(
    denoised: &[Vec<C<T>>],
    reference: &[Vec<C<T>>],
    variant: Variant,
    k: usize,
) -> Result<DenoiseReport> {
    if denoised.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: denoised.len(),
            right: reference.len(),
        });
    }
    if denoised.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let mut per_sample = Vec::with_capacity(denoised.len());
    for (a, b) in denoised.iter().zip(reference) {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: b.len(),
                got: a.len(),
            });
        }
        let err: T = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        per_sample.push(err.to_f64_lossy());
    }
    let mse = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    Ok(DenoiseReport {
        variant,
        k,
        mse,
        per_sample,
        flagged: Vec::new(),
    })
}

/// Which estimate of the augmented state feeds the Harmoniq variant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChannelMode {
    #[default]
    Dense,
    Stochastic {
        shots: usize,
        backend: Backend,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub k: usize,
    pub centered: bool,
    pub renormalize: bool,
    pub channel: ChannelMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            k: 3,
            centered: true,
            renormalize: true,
            channel: ChannelMode::Dense,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub noisy: DenoiseReport,
    pub projected: DenoiseReport,
    /// Present when a window was supplied.
    pub harmoniq: Option<DenoiseReport>,
}

impl PipelineReport {
    pub fn reports(&self) -> impl Iterator<Item = &DenoiseReport> {
        [
            Some(&self.noisy),
            Some(&self.projected),
            self.harmoniq.as_ref(),
        ]
        .into_iter()
        .flatten()
    }
}

/// Unit-norm clean references, centered with the clean mean when `centered`.
pub fn reference_states<T: Real>(clean: &[Vec<C<T>>], centered: bool) -> Vec<Option<Vec<C<T>>>> {
    let src = if centered {
        center(clean)
    } else {
        clean.to_vec()
    };
    src.into_iter()
        .map(|v| {
            let n = norm_sqr(&v).sqrt();
            (n >= T::lit(ZERO_NORM)).then(|| v.into_iter().map(|a| a / n).collect())
        })
        .collect()
}

fn project_all<T: Real>(
    rho: &DensityMatrix<T>,
    states: &[Vec<C<T>>],
    cfg: &PipelineConfig,
    variant: Variant,
    reference: &[Vec<C<T>>],
) -> Result<DenoiseReport> {
    let dec = eigendecompose(rho)?;
    let mut flagged = Vec::new();
    let mut projected = Vec::with_capacity(states.len());
    for (i, psi) in states.iter().enumerate() {
        let p = project_topk(&dec, psi, cfg.k, cfg.renormalize)?;
        if p.flagged {
            flagged.push(i);
        }
        projected.push(p.vector);
    }
    let mut report = mse(&projected, reference, variant, cfg.k)?;
    report.flagged = flagged;
    Ok(report)
}

/// Encodes the noisy samples, then scores the noisy states, their projection
/// onto the top-`K` eigenvectors of `rho`, and (with a window) their
/// projection onto the top-`K` eigenvectors of the augmented state.
/// Every variant is measured against the clean reference states.
pub fn run_pipeline<T: Real>(
    dataset: &SignalDataset<T>,
    window: Option<&AugmentationWindow<T>>,
    cfg: &PipelineConfig,
) -> Result<PipelineReport> {
    let ensemble = encode(&dataset.noisy, cfg.centered)?;
    let refs = reference_states(&dataset.clean, cfg.centered);
    let mut reference = Vec::with_capacity(ensemble.len());
    for &i in ensemble.sources() {
        reference.push(refs[i].clone().ok_or_else(|| {
            Error::Encoding(format!("clean reference {i} vanishes after centering"))
        })?);
    }
    let states = ensemble.states();
    let rho = ensemble_density(&ensemble);

    let noisy = mse(states, &reference, Variant::Noisy, 0)?;
    let projected = project_all(&rho, states, cfg, Variant::Projected, &reference)?;
    let harmoniq = match window {
        None => None,
        Some(w) => {
            let augmented = match cfg.channel {
                ChannelMode::Dense => apply_channel_dense(w, &rho)?,
                ChannelMode::Stochastic {
                    shots,
                    backend,
                    seed,
                } => apply_channel_stochastic(w, &ensemble, shots, seed, backend)?,
            };
            Some(project_all(
                &augmented,
                states,
                cfg,
                Variant::Harmoniq,
                &reference,
            )?)
        }
    };
    Ok(PipelineReport {
        noisy,
        projected,
        harmoniq,
    })
}
