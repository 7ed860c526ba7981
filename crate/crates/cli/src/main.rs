use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wh_augment::harness::{
    cmd_compile, cmd_gen_data, cmd_spectra, cmd_sweep_noise, cmd_sweep_samples, cmd_verify,
    sweep::render_table, ChannelBackend, ExperimentConfig, VerifyOptions,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "wh-augment",
    version,
    about = "Weyl-Heisenberg data augmentation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Estimator for the augmented state.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Samples for the stochastic backend.
    #[arg(long, global = true)]
    shots: Option<usize>,
    /// Do not center data before encoding.
    #[arg(long, global = true)]
    no_center: bool,
    /// Keep projected vectors at their projected norm.
    #[arg(long, global = true)]
    no_renormalize: bool,
    /// Report MSE divided by the mean Noisy MSE.
    #[arg(long, global = true)]
    normalize_report: bool,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Dense,
    Stochastic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check compiled circuits, the twirl and the composition law.
    Verify,
    /// Write one clean and one noisy dataset.
    GenData,
    /// Compile W(x, z) on n qubits to circuit text.
    Compile {
        qubits: usize,
        #[arg(allow_negative_numbers = true)]
        x: i64,
        #[arg(allow_negative_numbers = true)]
        z: i64,
        /// Output file; defaults to `<out>/weyl_n<n>_x<x>_z<z>.txt`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalue spectra of noisy, augmented and clean density matrices.
    Spectra,
    /// Denoising MSE against sample size.
    SweepSamples,
    /// Denoising MSE against noise level.
    SweepNoise,
}

fn build_config(base: ExperimentConfig, c: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = base;
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_text(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &c.out {
        cfg.out_dir = out.clone();
    }
    match c.backend {
        Some(BackendArg::Dense) => cfg.backend = ChannelBackend::Dense,
        Some(BackendArg::Stochastic) => cfg.set("backend", "stochastic")?,
        None => {}
    }
    if let Some(shots) = c.shots {
        cfg.set("shots", &shots.to_string())?;
    }
    cfg.centered &= !c.no_center;
    cfg.renormalize &= !c.no_renormalize;
    cfg.normalize_report |= c.normalize_report;
    if c.workers.is_some() {
        cfg.workers = c.workers;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, (u8, String)> {
    let usage = |msg: String| (EXIT_USAGE, msg);
    let failure = |e: wh_augment::Error| (EXIT_FAILURE, e.to_string());
    let base = match cli.command {
        Command::SweepNoise => ExperimentConfig::noise_sweep(),
        _ => ExperimentConfig::sample_sweep(),
    };
    let cfg = build_config(base, &cli.common).map_err(usage)?;

    match cli.command {
        Command::Verify => {
            let opts = VerifyOptions {
                seed: cli.common.seed.unwrap_or(VerifyOptions::default().seed),
                ..VerifyOptions::default()
            };
            let report = cmd_verify(&opts);
            print!("{}", report.render());
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
        }
        Command::GenData => {
            for p in cmd_gen_data(&cfg).map_err(failure)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Compile {
            qubits,
            x,
            z,
            output,
        } => {
            let path =
                output.unwrap_or_else(|| cfg.out_dir.join(format!("weyl_n{qubits}_x{x}_z{z}.txt")));
            let summary = cmd_compile(qubits, x, z, &path).map_err(|e| match e {
                wh_augment::Error::InvalidArgument(m) => usage(m),
                other => failure(other),
            })?;
            let s = summary.stats;
            println!(
                "wrote {}\nH {} RZ {} CP {} depth {}",
                summary.path.display(),
                s.hadamard,
                s.z_rotation,
                s.controlled_phase,
                s.depth
            );
        }
        Command::Spectra => {
            let spectra = cmd_spectra(&cfg).map_err(failure)?;
            let above = |v: &[f64]| v.iter().filter(|&&x| x > 1e-10).count();
            println!(
                "eigenvalues above 1e-10: noisy {} augmented {} clean {}",
                above(&spectra.noisy),
                above(&spectra.augmented),
                above(&spectra.clean)
            );
            for p in &spectra.paths {
                println!("wrote {}", p.display());
            }
        }
        Command::SweepSamples | Command::SweepNoise => {
            let outcome = if matches!(cli.command, Command::SweepSamples) {
                cmd_sweep_samples(&cfg)
            } else {
                cmd_sweep_noise(&cfg)
            }
            .map_err(failure)?;
            print!("{}", render_table(&outcome.table, cfg.normalize_report));
            println!("wrote results to {}", cfg.out_dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
