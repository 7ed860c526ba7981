//! Experiment harness: configuration, sweeps, self-checks and file outputs.
//!
//! Each `cmd_*` function is what the corresponding CLI subcommand runs.

pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::RngCore;

use crate::channel::{apply_channel_dense, apply_channel_stochastic, build_window_with_variance};
use crate::circuit::{compile_weyl, write_circuit, Circuit, CircuitStats};
use crate::dataset::{
    encode, ensemble_density, write_samples, AtomLayout, SignalDataset, SignalSpec,
};
use crate::error::{Error, Result};
use crate::rng::derive;
use crate::spectral::eigvalsh;
use crate::weyl::PhasePoint;

pub use config::{ChannelBackend, ExperimentConfig};
pub use output::{header, write_file};
pub use plot::{LinePlot, Series};
pub use sweep::{run_sweep, ResultRow, ResultTable, SweepAxis, SweepOutcome, TrialRecord};
pub use verify::{run_verify, run_verify_with, Check, GateCountRow, VerifyOptions, VerifyReport};

/// Largest qubit count accepted by [`cmd_compile`].
pub const COMPILE_MAX_QUBITS: usize = 16;

const TAG_SINGLE_DATA: u64 = 10;
const TAG_SINGLE_NOISE: u64 = 11;
const TAG_SPECTRA_CHANNEL: u64 = 12;

pub fn cmd_verify(opts: &VerifyOptions) -> VerifyReport {
    run_verify(opts)
}

/// Sweep over sample sizes; writes all tables and plots to `cfg.out_dir`.
pub fn cmd_sweep_samples(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let outcome = run_sweep(cfg)?;
    sweep::write_sweep(cfg, SweepAxis::Samples, &outcome)?;
    Ok(outcome)
}

/// Sweep over noise levels; writes all tables and plots to `cfg.out_dir`.
pub fn cmd_sweep_noise(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let outcome = run_sweep(cfg)?;
    sweep::write_sweep(cfg, SweepAxis::Noise, &outcome)?;
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompileSummary {
    pub path: PathBuf,
    pub stats: CircuitStats,
}

/// Compiles `W(x, z)` on `n` qubits and writes it in circuit text format.
pub fn cmd_compile(n: usize, x: i64, z: i64, out: &Path) -> Result<CompileSummary> {
    if n == 0 || n > COMPILE_MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubits {n} outside 1..={COMPILE_MAX_QUBITS}"
        )));
    }
    let circuit: Circuit<f64> = compile_weyl(n, PhasePoint::new(x, z, 1 << n));
    let mut text = Vec::new();
    write_circuit(&circuit, &mut text).map_err(|e| Error::io(out, e))?;
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(out, text).map_err(|e| Error::io(out, e))?;
    Ok(CompileSummary {
        path: out.to_path_buf(),
        stats: circuit.stats(),
    })
}

/// The dataset used by `gen-data` and `spectra`: first entries of the
/// qubit, sample and sigma lists.
pub fn single_dataset(cfg: &ExperimentConfig) -> Result<SignalDataset<f64>> {
    cfg.validate()?;
    let (n, m, sigma) = (cfg.qubits[0], cfg.samples[0], cfg.sigmas[0]);
    let mut spec = SignalSpec::new(1 << n, m, sigma);
    spec.noise = cfg.noise;
    spec.layout = AtomLayout {
        window_width: cfg.window_width,
        spacing: cfg.atom_spacing,
        ..AtomLayout::default()
    };
    let key = [n as u64, m as u64, sigma.to_bits()];
    let mut data = derive(cfg.seed, &[TAG_SINGLE_DATA, key[0], key[1]]);
    let mut noise = derive(cfg.seed, &[TAG_SINGLE_NOISE, key[0], key[1], key[2]]);
    let mut ds = SignalDataset::clean(&spec, &mut data)?;
    ds.add_noise(sigma, cfg.noise, &mut noise);
    Ok(ds.with_seed(cfg.seed))
}

/// Writes `clean.txt` and `noisy.txt` for [`single_dataset`].
pub fn cmd_gen_data(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let ds = single_dataset(cfg)?;
    let head = header("gen-data", cfg, "# ");
    let mut paths = Vec::new();
    for (name, samples, sigma) in [
        ("clean.txt", &ds.clean, 0.0),
        ("noisy.txt", &ds.noisy, ds.sigma),
    ] {
        let mut buf = head.clone().into_bytes();
        write_samples(&mut buf, ds.d, sigma, ds.seed, samples)
            .map_err(|e| Error::io(cfg.out_dir.join(name), e))?;
        let text = String::from_utf8(buf).expect("sample text is UTF-8");
        paths.push(write_file(&cfg.out_dir, name, &text)?);
    }
    Ok(paths)
}

/// Descending eigenvalues of the noisy, augmented and clean density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectra {
    pub noisy: Vec<f64>,
    pub augmented: Vec<f64>,
    pub clean: Vec<f64>,
    pub paths: Vec<PathBuf>,
}

pub fn cmd_spectra(cfg: &ExperimentConfig) -> Result<Spectra> {
    let ds = single_dataset(cfg)?;
    let window = build_window_with_variance::<f64>(cfg.qubits[0], cfg.variance)?;
    let ensemble = encode(&ds.noisy, cfg.centered)?;
    let noisy_rho = ensemble_density(&ensemble);
    let noisy = eigvalsh(noisy_rho.as_operator())?;
    let augmented_rho = match cfg.backend {
        ChannelBackend::Dense => apply_channel_dense(&window, &noisy_rho)?,
        ChannelBackend::Stochastic { shots, simulator } => {
            let seed = derive(cfg.seed, &[TAG_SPECTRA_CHANNEL]).next_u64();
            apply_channel_stochastic(&window, &ensemble, shots, seed, simulator)?
        }
    };
    let augmented = eigvalsh(augmented_rho.as_operator())?;
    let clean = eigvalsh(ensemble_density(&encode(&ds.clean, cfg.centered)?).as_operator())?;

    let mut csv = header("spectra", cfg, "# ");
    csv.push_str("series,index,eigenvalue\n");
    let named = [
        ("noisy", &noisy),
        ("augmented", &augmented),
        ("clean", &clean),
    ];
    for (name, values) in named {
        for (i, v) in values.iter().enumerate() {
            let _ = writeln!(csv, "{name},{i},{v}");
        }
    }
    let floor = 1e-16;
    let plot = LinePlot {
        title: "eigenvalue spectra".into(),
        x_label: "index".into(),
        y_label: "log10 eigenvalue".into(),
        log_x: false,
        series: named
            .iter()
            .map(|(name, values)| Series {
                label: (*name).into(),
                points: values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (i as f64, v.max(floor).log10()))
                    .collect(),
            })
            .collect(),
    };
    let paths = vec![
        write_file(&cfg.out_dir, "spectra.csv", &csv)?,
        write_file(
            &cfg.out_dir,
            "spectra.svg",
            &plot.render(&header("spectra", cfg, "")),
        )?,
    ];
    Ok(Spectra {
        noisy,
        augmented,
        clean,
        paths,
    })
}
