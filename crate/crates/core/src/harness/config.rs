//! Experiment configuration and its flat `key = value` file format.
//!
//! Lists are comma separated, `#` starts a comment. Keys not present in a file
//! keep the defaults of the command being run.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::Backend;
use crate::dataset::{NoiseConvention, MIN_ATOM_DIM};
use crate::denoise::{ChannelMode, PipelineConfig};
use crate::error::{Error, Result};

/// Largest qubit count accepted without `large = true`.
pub const DEFAULT_MAX_QUBITS: usize = 8;
/// Hard ceiling for the dense sweeps.
pub const LARGE_MAX_QUBITS: usize = 12;
/// Shots used by the stochastic backend when none are configured.
pub const DEFAULT_SHOTS: usize = 10_000;

/// How the Harmoniq variant estimates the augmented state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelBackend {
    Dense,
    Stochastic { shots: usize, simulator: Backend },
}

impl ChannelBackend {
    fn name(self) -> &'static str {
        match self {
            ChannelBackend::Dense => "dense",
            ChannelBackend::Stochastic { .. } => "stochastic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub qubits: Vec<usize>,
    pub samples: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub k: usize,
    /// Noise realizations per data batch.
    pub realizations: usize,
    pub batches: usize,
    pub seed: u64,
    pub centered: bool,
    pub noise: NoiseConvention,
    pub backend: ChannelBackend,
    pub renormalize: bool,
    pub normalize_report: bool,
    pub window_width: Option<f64>,
    pub atom_spacing: Option<i64>,
    pub variance: Option<f64>,
    /// Allows up to [`LARGE_MAX_QUBITS`].
    pub large: bool,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses one per core. Results do not depend on it.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::sample_sweep()
    }
}

impl ExperimentConfig {
    /// MSE against sample size: n in {6, 8}, m in {5, ..., 100}, sigma = 0.1, 100 trials.
    pub fn sample_sweep() -> Self {
        Self {
            qubits: vec![6, 8],
            samples: vec![5, 10, 20, 50, 100],
            sigmas: vec![0.1],
            k: 3,
            realizations: 10,
            batches: 10,
            seed: 20_240_601,
            centered: true,
            noise: NoiseConvention::Complex,
            backend: ChannelBackend::Dense,
            renormalize: true,
            normalize_report: false,
            window_width: None,
            atom_spacing: None,
            variance: None,
            large: false,
            out_dir: PathBuf::from("out"),
            workers: None,
        }
    }

    /// MSE against noise level at m = 100.
    pub fn noise_sweep() -> Self {
        Self {
            samples: vec![100],
            sigmas: vec![0.1, 0.3, 0.5, 1.0, 1.5],
            ..Self::sample_sweep()
        }
    }

    pub fn trials(&self) -> usize {
        self.realizations * self.batches
    }

    pub fn pipeline(&self, channel_seed: u64) -> PipelineConfig {
        let channel = match self.backend {
            ChannelBackend::Dense => ChannelMode::Dense,
            ChannelBackend::Stochastic { shots, simulator } => ChannelMode::Stochastic {
                shots,
                backend: simulator,
                seed: channel_seed,
            },
        };
        PipelineConfig {
            k: self.k,
            centered: self.centered,
            renormalize: self.renormalize,
            channel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.qubits.is_empty() || self.samples.is_empty() || self.sigmas.is_empty() {
            return bad("qubits, samples and sigmas must be nonempty".into());
        }
        let max_n = if self.large {
            LARGE_MAX_QUBITS
        } else {
            DEFAULT_MAX_QUBITS
        };
        let min_n = MIN_ATOM_DIM.trailing_zeros() as usize;
        for &n in &self.qubits {
            if n < min_n || n > max_n {
                return bad(format!(
                    "qubits {n} outside {min_n}..={max_n} (set large = true for up to {LARGE_MAX_QUBITS})"
                ));
            }
            if self.k == 0 || self.k > 1 << n {
                return bad(format!("k = {} outside 1..={}", self.k, 1usize << n));
            }
        }
        if let Some(&m) = self.samples.iter().find(|&&m| m < 2) {
            return bad(format!("samples {m} below 2"));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return bad(format!("sigma {s} must be finite and nonnegative"));
        }
        if self.trials() == 0 {
            return bad("realizations and batches must be at least 1".into());
        }
        if let ChannelBackend::Stochastic { shots: 0, .. } = self.backend {
            return bad("shots must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if let Some(w) = self.window_width {
            if !(w.is_finite() && w > 0.0) {
                return bad(format!("window_width {w}"));
            }
        }
        if let Some(v) = self.variance {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("variance {v}"));
            }
        }
        if matches!(self.atom_spacing, Some(s) if s < 1) {
            return bad("atom_spacing must be at least 1".into());
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(idx + 1, format!("expected key = value, got `{line}`"))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|msg| Error::parse(idx + 1, msg))?;
        }
        Ok(())
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "qubits" => self.qubits = list(value)?,
            "samples" => self.samples = list(value)?,
            "sigmas" => self.sigmas = list(value)?,
            "k" => self.k = one(value)?,
            "realizations" => self.realizations = one(value)?,
            "batches" => self.batches = one(value)?,
            "seed" => self.seed = one(value)?,
            "center" => self.centered = one(value)?,
            "noise" => self.noise = one(value)?,
            "backend" => {
                self.backend = match value {
                    "dense" => ChannelBackend::Dense,
                    "stochastic" => ChannelBackend::Stochastic {
                        shots: self.shots(),
                        simulator: self.simulator(),
                    },
                    other => return Err(format!("unknown backend `{other}`")),
                }
            }
            "shots" => {
                let shots = one(value)?;
                self.backend = ChannelBackend::Stochastic {
                    shots,
                    simulator: self.simulator(),
                };
            }
            "simulator" => {
                let simulator = one(value)?;
                self.backend = ChannelBackend::Stochastic {
                    shots: self.shots(),
                    simulator,
                };
            }
            "renormalize" => self.renormalize = one(value)?,
            "normalize_report" => self.normalize_report = one(value)?,
            "window_width" => self.window_width = optional(value)?,
            "atom_spacing" => self.atom_spacing = optional(value)?,
            "variance" => self.variance = optional(value)?,
            "large" => self.large = one(value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "workers" => self.workers = optional(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    fn shots(&self) -> usize {
        match self.backend {
            ChannelBackend::Stochastic { shots, .. } => shots,
            ChannelBackend::Dense => DEFAULT_SHOTS,
        }
    }

    fn simulator(&self) -> Backend {
        match self.backend {
            ChannelBackend::Stochastic { simulator, .. } => simulator,
            ChannelBackend::Dense => Backend::Dense,
        }
    }

    /// The experiment settings in file form. Output location and worker count
    /// are left out since they do not affect results.
    pub fn to_text(&self) -> String {
        fn join<V: ToString>(v: &[V]) -> String {
            v.iter().map(V::to_string).collect::<Vec<_>>().join(",")
        }
        fn opt<V: ToString>(v: Option<V>) -> String {
            v.map_or_else(|| "default".to_string(), |v| v.to_string())
        }
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("qubits", join(&self.qubits));
        kv("samples", join(&self.samples));
        kv("sigmas", join(&self.sigmas));
        kv("k", self.k.to_string());
        kv("realizations", self.realizations.to_string());
        kv("batches", self.batches.to_string());
        kv("seed", self.seed.to_string());
        kv("center", self.centered.to_string());
        kv("noise", self.noise.to_string());
        kv("backend", self.backend.name().to_string());
        if let ChannelBackend::Stochastic { shots, simulator } = self.backend {
            kv("shots", shots.to_string());
            kv("simulator", simulator.to_string());
        }
        kv("renormalize", self.renormalize.to_string());
        kv("normalize_report", self.normalize_report.to_string());
        kv("window_width", opt(self.window_width));
        kv("atom_spacing", opt(self.atom_spacing));
        kv("variance", opt(self.variance));
        kv("large", self.large.to_string());
        s
    }
}

fn one<V: FromStr>(value: &str) -> std::result::Result<V, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

fn optional<V: FromStr>(value: &str) -> std::result::Result<Option<V>, String> {
    if value == "default" {
        Ok(None)
    } else {
        one(value).map(Some)
    }
}

fn list<V: FromStr>(value: &str) -> std::result::Result<Vec<V>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(one)
        .collect()
}
