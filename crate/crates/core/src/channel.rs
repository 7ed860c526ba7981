//! Localized Weyl-Heisenberg augmentation channel
//! `P(rho) = sum_{p in window} lambda_p W_p rho W_p^dagger`,
//! applied densely or realized by sampling displacements and ensemble states.

use std::io::Write;

use rayon::prelude::*;

use crate::circuit::{apply_circuit, compile_weyl, StateVector};
use crate::dataset::{sample_cumulative, EncodedEnsemble};
use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::rng::{derive, Stream};
use crate::scalar::{Real, C};
use crate::weyl::{apply_weyl, conjugate_accumulate, qubits_for, PhasePoint};

pub use crate::density::DensityMatrix;

/// Window points folded into one partial sum before the ordered reduction.
const DENSE_CHUNK: usize = 8;
/// Samples per independently seeded shard of the stochastic estimator.
pub const SHARD_SIZE: usize = 1024;

/// Displacements and their probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentationWindow<T> {
    d: usize,
    /// Signed grid offsets before reduction.
    offsets: Vec<(i64, i64)>,
    points: Vec<PhasePoint>,
    weights: Vec<T>,
    variance: f64,
    cumulative: Vec<f64>,
}

/// Side length of the centered grid: `n` for odd `n`, `n - 1` for even `n`.
pub fn window_side(n: usize) -> usize {
    if n % 2 == 1 {
        n
    } else {
        n - 1
    }
}

/// `v = floor(s^2 / 2)^2`, i.e. `sqrt(v) = floor(|window| / 2)`.
pub fn default_variance(n: usize) -> f64 {
    let s = window_side(n);
    let root = (s * s / 2) as f64;
    root * root
}

/// Gaussian window on a centered `s x s` grid of `n` qubits.
pub fn build_window<T: Real>(n: usize) -> Result<AugmentationWindow<T>> {
    build_window_with_variance(n, None)
}

/// As [`build_window`] with an optional variance override.
pub fn build_window_with_variance<T: Real>(
    n: usize,
    variance: Option<f64>,
) -> Result<AugmentationWindow<T>> {
    if n < 2 {
        return Err(Error::WindowTooSmall(n));
    }
    let d = 1usize << n;
    let s = window_side(n) as i64;
    let half = (s - 1) / 2;
    let v = variance.unwrap_or_else(|| default_variance(n));
    // A 1x1 grid (n = 2) has v = 0 and a single point of weight 1.
    if s > 1 && !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidWindow(format!("variance {v}")));
    }
    let mut offsets = Vec::with_capacity((s * s) as usize);
    for x in -half..=half {
        for z in -half..=half {
            offsets.push((x, z));
        }
    }
    let raw: Vec<f64> = offsets
        .iter()
        .map(|&(x, z)| {
            if s == 1 {
                1.0
            } else {
                (-((x * x + z * z) as f64) / (2.0 * v)).exp()
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| T::lit(w / total)).collect();
    AugmentationWindow::from_parts(d, offsets, weights, v)
}

/// Uniform weights over all `d^2` displacements.
pub fn uniform_window<T: Real>(d: usize) -> Result<AugmentationWindow<T>> {
    qubits_for(d)?;
    let offsets: Vec<(i64, i64)> = (0..d as i64)
        .flat_map(|x| (0..d as i64).map(move |z| (x, z)))
        .collect();
    let w = T::one() / T::from_usize(d * d).unwrap();
    let weights = vec![w; d * d];
    AugmentationWindow::from_parts(d, offsets, weights, f64::INFINITY)
}

/// The single displacement `(0, 0)` with weight 1.
pub fn identity_window<T: Real>(d: usize) -> Result<AugmentationWindow<T>> {
    AugmentationWindow::from_parts(d, vec![(0, 0)], vec![T::one()], 0.0)
}

impl<T: Real> AugmentationWindow<T> {
    /// Validates nonnegative weights summing to one over distinct reduced points.
    pub fn from_parts(
        d: usize,
        offsets: Vec<(i64, i64)>,
        weights: Vec<T>,
        variance: f64,
    ) -> Result<Self> {
        qubits_for(d)?;
        if offsets.is_empty() || offsets.len() != weights.len() {
            return Err(Error::InvalidWindow(format!(
                "{} points with {} weights",
                offsets.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w < T::zero() || !w.is_finite()) {
            return Err(Error::InvalidWindow("negative weight".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > crate::density::tolerance(1e-12) {
            return Err(Error::InvalidWindow(format!("weights sum to {total}")));
        }
        let points: Vec<PhasePoint> = offsets
            .iter()
            .map(|&(x, z)| PhasePoint::new(x, z, d))
            .collect();
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidWindow("duplicate displacement".into()));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w.to_f64_lossy();
                acc
            })
            .collect();
        Ok(Self {
            d,
            offsets,
            points,
            weights,
            variance,
            cumulative,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Draws a displacement with probability equal to its weight.
    pub fn sample_displacement(&self, rng: &mut Stream) -> PhasePoint {
        self.points[sample_cumulative(&self.cumulative, rng)]
    }
}

/// Exact channel output; the per-point conjugations are summed in window order.
pub fn apply_channel_dense<T: Real>(
    window: &AugmentationWindow<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    let d = window.d;
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.dim(),
        });
    }
    let input = rho.as_operator();
    let pairs: Vec<(PhasePoint, T)> = window
        .points
        .iter()
        .copied()
        .zip(window.weights.iter().copied())
        .collect();
    let partials: Vec<DenseOperator<T>> = pairs
        .par_chunks(DENSE_CHUNK)
        .map(|chunk| {
            let mut acc = DenseOperator::zeros(d);
            for &(p, w) in chunk {
                conjugate_accumulate(d, p, input, w, &mut acc).expect("dimensions checked");
            }
            acc
        })
        .collect();
    let mut out = DenseOperator::zeros(d);
    for part in &partials {
        out.add_scaled(part, T::one());
    }
    out.symmetrize();
    Ok(DensityMatrix::from_trusted(out))
}

/// How `W psi` is computed for each stochastic sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    /// Closed-form action of the dense Weyl operator.
    #[default]
    Dense,
    /// Compiled gate circuit run on a state-vector simulator.
    Circuit,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Self::Dense),
            "circuit" => Ok(Self::Circuit),
            other => Err(Error::InvalidArgument(format!(
                "unknown backend `{other}` (expected dense|circuit)"
            ))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dense => "dense",
            Self::Circuit => "circuit",
        })
    }
}

/// One draw of the stochastic realization: `i ~ p`, `(x, z) ~ lambda`, returns `W psi_i`.
pub fn draw_augmented_state<T: Real>(
    window: &AugmentationWindow<T>,
    ensemble: &EncodedEnsemble<T>,
    rng: &mut Stream,
    backend: Backend,
) -> Result<Vec<C<T>>> {
    let psi = &ensemble.states()[ensemble.sample_index(rng)];
    let p = window.sample_displacement(rng);
    match backend {
        Backend::Dense => apply_weyl(window.d, p, psi),
        Backend::Circuit => {
            let n = qubits_for(window.d)?;
            let state = StateVector::from_amplitudes(psi.clone())?;
            Ok(apply_circuit(&compile_weyl::<T>(n, p), &state)?.into_amplitudes())
        }
    }
}

/// Monte Carlo estimate `(1/N) sum_k |W_k psi_k><W_k psi_k|`.
///
/// Samples are split into shards of [`SHARD_SIZE`]; shard `j` draws from
/// `derive(seed, [j])` and shard sums are added in index order, so the result
/// does not depend on the number of worker threads.
pub fn apply_channel_stochastic<T: Real>(
    window: &AugmentationWindow<T>,
    ensemble: &EncodedEnsemble<T>,
    samples: usize,
    seed: u64,
    backend: Backend,
) -> Result<DensityMatrix<T>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let d = window.d;
    if ensemble.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: ensemble.dim(),
        });
    }
    let shards = samples.div_ceil(SHARD_SIZE);
    let partials: Vec<DenseOperator<T>> = (0..shards)
        .into_par_iter()
        .map(|j| {
            let count = SHARD_SIZE.min(samples - j * SHARD_SIZE);
            let mut rng = derive(seed, &[j as u64]);
            let mut acc = DenseOperator::zeros(d);
            for _ in 0..count {
                let v = draw_augmented_state(window, ensemble, &mut rng, backend)?;
                acc.add_outer(&v, T::one());
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out = DenseOperator::zeros(d);
    for part in &partials {
        out.add_scaled(part, T::one());
    }
    let scale = T::one() / T::from_usize(samples).unwrap();
    let mut out = out.scale(C::new(scale, T::zero()));
    out.symmetrize();
    Ok(DensityMatrix::from_trusted(out))
}

/// Writes `# D <d> V <v>` followed by `x z weight` rows with signed offsets.
pub fn write_window<T: Real, W: Write>(
    window: &AugmentationWindow<T>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "# D {} V {}", window.d, window.variance)?;
    for (&(x, z), w) in window.offsets.iter().zip(&window.weights) {
        writeln!(
            out,
            "{x} {z} {}",
            crate::circuit::format_angle(w.to_f64_lossy())
        )?;
    }
    Ok(())
}

pub fn parse_window<T: Real>(text: &str) -> Result<AugmentationWindow<T>> {
    let mut d = None;
    let mut variance = f64::NAN;
    let mut offsets = Vec::new();
    let mut weights = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            let toks: Vec<&str> = comment.split_whitespace().collect();
            if toks.first() == Some(&"D") {
                d = toks.get(1).and_then(|s| s.parse::<usize>().ok());
                if d.is_none() {
                    return Err(Error::parse(line, "bad D header"));
                }
                if toks.get(2) == Some(&"V") {
                    variance = toks
                        .get(3)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::parse(line, "bad V header"))?;
                }
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(line, "expected `x z weight`"));
        }
        let x = toks[0]
            .parse::<i64>()
            .map_err(|_| Error::parse(line, "bad x"))?;
        let z = toks[1]
            .parse::<i64>()
            .map_err(|_| Error::parse(line, "bad z"))?;
        let w = toks[2]
            .parse::<f64>()
            .map_err(|_| Error::parse(line, "bad weight"))?;
        offsets.push((x, z));
        weights.push(T::lit(w));
    }
    let d = d.ok_or_else(|| Error::parse(0, "missing `# D <d>` header"))?;
    AugmentationWindow::from_parts(d, offsets, weights, variance)
}
