//! Synthetic time-frequency signals and their encoding as quantum states.
//!
//! Signals are random real combinations of twelve atoms, each atom a
//! Weyl-Heisenberg displacement of a centered Gaussian window. The atom
//! displacements sit in three fixed clusters of four.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::rng::Stream;
use crate::scalar::{norm_sqr, Real, C};
use crate::weyl::{build_weyl, qubits_for, PhasePoint};

pub const ATOM_COUNT: usize = 12;
pub const MIN_WINDOW_DIM: usize = 16;
pub const MIN_ATOM_DIM: usize = 64;
/// Samples whose norm falls below this after centering are dropped by [`encode`].
pub const ZERO_NORM: f64 = 1e-14;

/// How additive noise of level `sigma` enters complex entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseConvention {
    /// Real and imaginary parts each `N(0, sigma^2 / 2)`: total variance `sigma^2`.
    #[default]
    Complex,
    /// Real part `N(0, sigma^2)`, imaginary part untouched.
    RealOnly,
}

impl std::str::FromStr for NoiseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Self::Complex),
            "real" => Ok(Self::RealOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown noise convention `{other}` (expected complex|real)"
            ))),
        }
    }
}

impl std::fmt::Display for NoiseConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Complex => "complex",
            Self::RealOnly => "real",
        })
    }
}

/// Geometry of the atom dictionary.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AtomLayout {
    /// Gaussian standard deviation in samples; `None` means [`default_window_width`].
    pub window_width: Option<f64>,
    /// Cluster centers; `None` means the default three-cluster placement.
    pub centers: Option<[(i64, i64); 3]>,
    /// Offset inside a cluster; `None` means `max(1, ceil(d / 64))`.
    pub spacing: Option<i64>,
}

fn ceil_div(a: usize, b: usize) -> i64 {
    a.div_ceil(b) as i64
}

/// `(ceil(d/6), ceil(d/6))`, `(ceil(d/2), ceil(2d/3))`, `(ceil(5d/6), ceil(d/3))`.
pub fn default_centers(d: usize) -> [(i64, i64); 3] {
    [
        (ceil_div(d, 6), ceil_div(d, 6)),
        (ceil_div(d, 2), ceil_div(2 * d, 3)),
        (ceil_div(5 * d, 6), ceil_div(d, 3)),
    ]
}

pub fn default_spacing(d: usize) -> i64 {
    ceil_div(d, 64).max(1)
}

/// Width `sqrt(d / 2pi)`, for which the Gaussian has equal spread in time
/// and frequency bins.
pub fn default_window_width(d: usize) -> f64 {
    (d as f64 / std::f64::consts::TAU).sqrt()
}

/// Unit-norm Gaussian `g[t] ~ exp(-(t - d/2)^2 / (2 s^2))` with `s = width`.
pub fn gaussian_window<T: Real>(d: usize, width: Option<f64>) -> Result<Vec<T>> {
    if d < MIN_WINDOW_DIM {
        return Err(Error::InvalidArgument(format!(
            "window length {d} below {MIN_WINDOW_DIM}"
        )));
    }
    let s = width.unwrap_or_else(|| default_window_width(d));
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("window width {s}")));
    }
    let center = T::from_usize(d / 2).unwrap();
    let two_s2 = T::lit(2.0 * s * s);
    let raw: Vec<T> = (0..d)
        .map(|t| {
            let u = T::from_usize(t).unwrap() - center;
            (-(u * u) / two_s2).exp()
        })
        .collect();
    let nrm = raw.iter().map(|&v| v * v).sum::<T>().sqrt();
    Ok(raw.into_iter().map(|v| v / nrm).collect())
}

/// The twelve atoms and the displacements that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Atoms<T> {
    pub vectors: Vec<Vec<C<T>>>,
    pub points: Vec<PhasePoint>,
    pub centers: [(i64, i64); 3],
}

pub fn make_atoms<T: Real>(d: usize, layout: &AtomLayout) -> Result<Atoms<T>> {
    qubits_for(d)?;
    if d < MIN_ATOM_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} below {MIN_ATOM_DIM}: atom clusters would overlap"
        )));
    }
    let g: Vec<C<T>> = gaussian_window::<T>(d, layout.window_width)?
        .into_iter()
        .map(|v| C::new(v, T::zero()))
        .collect();
    let centers = layout.centers.unwrap_or_else(|| default_centers(d));
    let delta = layout.spacing.unwrap_or_else(|| default_spacing(d));
    let mut vectors = Vec::with_capacity(ATOM_COUNT);
    let mut points = Vec::with_capacity(ATOM_COUNT);
    for &(cx, cz) in &centers {
        for (ox, oz) in [(0, 0), (delta, 0), (0, delta), (delta, delta)] {
            let p = PhasePoint::new(cx + ox, cz + oz, d);
            vectors.push(build_weyl::<T>(d, p)?.apply(&g));
            points.push(p);
        }
    }
    Ok(Atoms {
        vectors,
        points,
        centers,
    })
}

/// Parameters of one synthetic dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpec {
    pub d: usize,
    pub m: usize,
    pub sigma: f64,
    pub noise: NoiseConvention,
    pub layout: AtomLayout,
}

impl SignalSpec {
    pub fn new(d: usize, m: usize, sigma: f64) -> Self {
        Self {
            d,
            m,
            sigma,
            noise: NoiseConvention::default(),
            layout: AtomLayout::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalDataset<T> {
    pub d: usize,
    pub m: usize,
    pub sigma: f64,
    pub seed: Option<u64>,
    pub atoms: Atoms<T>,
    /// `coefficients[i][k]` multiplies atom `k` in sample `i`.
    pub coefficients: Vec<Vec<T>>,
    pub clean: Vec<Vec<C<T>>>,
    pub noisy: Vec<Vec<C<T>>>,
}

fn normal<T: Real>(rng: &mut Stream, std: f64) -> T {
    let z: f64 = rng.sample(StandardNormal);
    T::lit(z * std)
}

/// Additive noise vector under `convention`.
pub fn noise_vector<T: Real>(
    d: usize,
    sigma: f64,
    convention: NoiseConvention,
    rng: &mut Stream,
) -> Vec<C<T>> {
    (0..d)
        .map(|_| match convention {
            NoiseConvention::Complex => {
                let s = sigma / std::f64::consts::SQRT_2;
                let re = normal(rng, s);
                C::new(re, normal(rng, s))
            }
            NoiseConvention::RealOnly => C::new(normal(rng, sigma), T::zero()),
        })
        .collect()
}

impl<T: Real> SignalDataset<T> {
    /// Draws coefficients and noise from a single stream.
    pub fn generate(spec: &SignalSpec, rng: &mut Stream) -> Result<Self> {
        let mut clean = Self::clean(spec, rng)?;
        clean.add_noise(spec.sigma, spec.noise, rng);
        Ok(clean)
    }

    /// Noise-free dataset: coefficients `c ~ N(0, 1)` i.i.d.
    pub fn clean(spec: &SignalSpec, coeff_rng: &mut Stream) -> Result<Self> {
        if spec.m < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 samples, got {}",
                spec.m
            )));
        }
        if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma {}", spec.sigma)));
        }
        let atoms = make_atoms::<T>(spec.d, &spec.layout)?;
        let coefficients: Vec<Vec<T>> = (0..spec.m)
            .map(|_| (0..ATOM_COUNT).map(|_| normal(coeff_rng, 1.0)).collect())
            .collect();
        let clean: Vec<Vec<C<T>>> = coefficients
            .iter()
            .map(|c| synthesize(&atoms.vectors, c))
            .collect();
        Ok(Self {
            d: spec.d,
            m: spec.m,
            sigma: 0.0,
            seed: None,
            noisy: clean.clone(),
            atoms,
            coefficients,
            clean,
        })
    }

    /// Replaces the noisy samples with `clean + noise(sigma)`.
    pub fn add_noise(&mut self, sigma: f64, convention: NoiseConvention, rng: &mut Stream) {
        self.sigma = sigma;
        self.noisy = self
            .clean
            .iter()
            .map(|f| {
                if sigma == 0.0 {
                    return f.clone();
                }
                let eps = noise_vector::<T>(self.d, sigma, convention, rng);
                f.iter().zip(eps).map(|(a, e)| a + e).collect()
            })
            .collect();
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// `sum_k coeffs[k] * atoms[k]`.
pub fn synthesize<T: Real>(atoms: &[Vec<C<T>>], coeffs: &[T]) -> Vec<C<T>> {
    let d = atoms.first().map_or(0, Vec::len);
    let mut out = vec![C::zero(); d];
    for (atom, &c) in atoms.iter().zip(coeffs) {
        for (o, a) in out.iter_mut().zip(atom) {
            *o = *o + a * c;
        }
    }
    out
}

/// Subtracts the empirical mean from every vector.
pub fn center<T: Real>(vectors: &[Vec<C<T>>]) -> Vec<Vec<C<T>>> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let m = T::from_usize(vectors.len()).unwrap();
    let mut mean = vec![C::<T>::zero(); first.len()];
    for v in vectors {
        for (acc, a) in mean.iter_mut().zip(v) {
            *acc = *acc + a;
        }
    }
    for a in mean.iter_mut() {
        *a = *a / m;
    }
    vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(a, b)| a - b).collect())
        .collect()
}

/// Probability-weighted pure states whose mixture is a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedEnsemble<T> {
    states: Vec<Vec<C<T>>>,
    probs: Vec<T>,
    /// Indices of the source vectors that survived encoding.
    sources: Vec<usize>,
    cumulative: Vec<f64>,
}

impl<T: Real> EncodedEnsemble<T> {
    /// Validates unit-norm states and a probability vector.
    pub fn new(states: Vec<Vec<C<T>>>, probs: Vec<T>) -> Result<Self> {
        let sources = (0..states.len()).collect();
        Self::build(states, probs, sources)
    }

    fn build(states: Vec<Vec<C<T>>>, probs: Vec<T>, sources: Vec<usize>) -> Result<Self> {
        if states.is_empty() || states.len() != probs.len() {
            return Err(Error::Encoding(format!(
                "{} states with {} probabilities",
                states.len(),
                probs.len()
            )));
        }
        let d = states[0].len();
        let tol = crate::density::tolerance::<T>(1e-12);
        for s in &states {
            if s.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.len(),
                });
            }
            if (norm_sqr(s).sqrt() - T::one()).abs() > tol {
                return Err(Error::Encoding("state is not unit norm".into()));
            }
        }
        if probs.iter().any(|&p| p < T::zero() || !p.is_finite()) {
            return Err(Error::Encoding("negative probability".into()));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > tol {
            return Err(Error::Encoding(format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p.to_f64_lossy();
                acc
            })
            .collect();
        Ok(Self {
            states,
            probs,
            sources,
            cumulative,
        })
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<C<T>>] {
        &self.states
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Source index of each retained state.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// Draws `i` with probability `p_i`.
    pub fn sample_index(&self, rng: &mut Stream) -> usize {
        sample_cumulative(&self.cumulative, rng)
    }
}

/// Inverse-CDF draw from a cumulative probability table.
pub(crate) fn sample_cumulative(cumulative: &[f64], rng: &mut Stream) -> usize {
    let total = *cumulative.last().expect("non-empty table");
    let u: f64 = rng.random::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

/// Amplitude-encodes `vectors`: optional centering, then `psi_i = f_i / |f_i|`
/// with `p_i = |f_i|^2 / sum_j |f_j|^2`. Vectors of norm below [`ZERO_NORM`] are dropped.
pub fn encode<T: Real>(vectors: &[Vec<C<T>>], centered: bool) -> Result<EncodedEnsemble<T>> {
    if vectors.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 vectors, got {}",
            vectors.len()
        )));
    }
    let src = if centered {
        center(vectors)
    } else {
        vectors.to_vec()
    };
    let norms2: Vec<T> = src.iter().map(|v| norm_sqr(v)).collect();
    let total: T = norms2.iter().copied().sum();
    let zero = T::lit(ZERO_NORM);
    let mut states = Vec::new();
    let mut probs = Vec::new();
    let mut sources = Vec::new();
    for (i, (v, &n2)) in src.iter().zip(&norms2).enumerate() {
        let n = n2.sqrt();
        if n < zero {
            continue;
        }
        states.push(v.iter().map(|a| a / n).collect());
        probs.push(n2 / total);
        sources.push(i);
    }
    if states.is_empty() {
        return Err(Error::Encoding("all vectors vanish".into()));
    }
    // Renormalize over the retained set; dropped weights are below ZERO_NORM^2.
    let kept: T = probs.iter().copied().sum();
    for p in probs.iter_mut() {
        *p = *p / kept;
    }
    EncodedEnsemble::build(states, probs, sources)
}

/// `rho = sum_i p_i |psi_i><psi_i|`.
pub fn ensemble_density<T: Real>(e: &EncodedEnsemble<T>) -> DensityMatrix<T> {
    let mut op = DenseOperator::zeros(e.dim());
    for (psi, &p) in e.states.iter().zip(&e.probs) {
        op.add_outer(psi, p);
    }
    op.symmetrize();
    DensityMatrix::from_trusted(op)
}

/// Header line of the sample file format.
pub fn sample_header(d: usize, m: usize, sigma: f64, seed: Option<u64>) -> String {
    format!(
        "D {d} M {m} SIGMA {sigma} SEED {}",
        seed.map_or_else(|| "none".to_string(), |s| s.to_string())
    )
}

/// Writes samples as `re,im` pairs, one sample per line, after the header.
/// Readers skip lines starting with `#`.
pub fn write_samples<T: Real, W: Write>(
    mut out: W,
    d: usize,
    sigma: f64,
    seed: Option<u64>,
    samples: &[Vec<C<T>>],
) -> std::io::Result<()> {
    writeln!(out, "{}", sample_header(d, samples.len(), sigma, seed))?;
    let mut line = String::new();
    for s in samples {
        line.clear();
        for (k, a) in s.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{},{}", a.re.to_f64_lossy(), a.im.to_f64_lossy());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parsed sample file.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleFile<T> {
    pub d: usize,
    pub sigma: f64,
    pub seed: Option<u64>,
    pub samples: Vec<Vec<C<T>>>,
}

pub fn read_samples<T: Real, R: BufRead>(input: R) -> Result<SampleFile<T>> {
    let mut lines = input
        .lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(t) if t.trim_start().starts_with('#')));
    let (hidx, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let header = header.map_err(|e| Error::parse(hidx + 1, e.to_string()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let field = |key: &str| -> Result<&str> {
        toks.iter()
            .position(|t| *t == key)
            .and_then(|i| toks.get(i + 1).copied())
            .ok_or_else(|| Error::parse(hidx + 1, format!("header missing {key}")))
    };
    let bad = |key: &str| Error::parse(hidx + 1, format!("bad {key} value"));
    let d: usize = field("D")?.parse().map_err(|_| bad("D"))?;
    let m: usize = field("M")?.parse().map_err(|_| bad("M"))?;
    let sigma: f64 = field("SIGMA")?.parse().map_err(|_| bad("SIGMA"))?;
    let seed = match field("SEED")? {
        "none" => None,
        s => Some(s.parse().map_err(|_| bad("SEED"))?),
    };
    let mut samples = Vec::with_capacity(m);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut v = Vec::with_capacity(d);
        for tok in line.split_whitespace() {
            let (re, im) = tok
                .split_once(',')
                .ok_or_else(|| Error::parse(lineno, format!("bad entry `{tok}`")))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| Error::parse(lineno, format!("bad number `{s}`")))
            };
            v.push(C::new(parse(re)?, parse(im)?));
        }
        if v.len() != d {
            return Err(Error::parse(
                lineno,
                format!("expected {d} entries, got {}", v.len()),
            ));
        }
        samples.push(v);
    }
    if samples.len() != m {
        return Err(Error::parse(
            0,
            format!("header promises {m} samples, found {}", samples.len()),
        ));
    }
    Ok(SampleFile {
        d,
        sigma,
        seed,
        samples,
    })
}
