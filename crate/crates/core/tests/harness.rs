use std::fs;
use std::io::BufReader;
use std::path::Path;

use wh_augment::channel::Backend;
use wh_augment::circuit::{compile_weyl, parse_circuit, Circuit, Gate};
use wh_augment::dataset::read_samples;
use wh_augment::denoise::Variant;
use wh_augment::harness::{
    cmd_compile, cmd_gen_data, cmd_spectra, cmd_sweep_noise, cmd_sweep_samples, run_sweep,
    run_verify, run_verify_with, ChannelBackend, ExperimentConfig, VerifyOptions,
};
use wh_augment::PhasePoint;

fn small(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        qubits: vec![6],
        samples: vec![5, 10],
        realizations: 2,
        batches: 2,
        out_dir: out.to_path_buf(),
        ..ExperimentConfig::sample_sweep()
    }
}

fn body_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn verify_passes_and_reports_gate_counts() {
    let report = run_verify(&VerifyOptions::default());
    assert!(report.passed(), "{}", report.render());
    assert_eq!(report.gate_counts.len(), 7);
    for r in &report.gate_counts {
        assert_eq!(r.claimed_controlled_phase, r.n * (r.n + 2));
        assert_eq!(r.controlled_phase, r.n * (r.n - 1));
    }
    assert!(report.render().contains("n(n+2)"));
}

#[test]
fn corrupted_angle_fails_the_fidelity_check() {
    let broken = |n: usize, p: PhasePoint| -> Circuit<f64> {
        let mut c = compile_weyl(n, p);
        for g in c.gates_mut() {
            if let Gate::ZRotation { angle, .. } = g {
                *angle += 0.1;
                break;
            }
        }
        c
    };
    let report = run_verify_with(&broken, &VerifyOptions::default());
    assert!(!report.passed());
    let fidelity: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("circuit fidelity"))
        .collect();
    assert!(fidelity.iter().all(|c| !c.passed));
    // checks that do not involve the compiler are unaffected
    assert!(report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("twirl"))
        .all(|c| c.passed));
}

#[test]
fn compile_writes_expected_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.txt");
    cmd_compile(1, 1, 0, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = body_lines(&text)
        .into_iter()
        .filter(|l| !l.trim().is_empty())
        .collect();
    assert_eq!(lines[0], "QUBITS 1");
    let lines = &lines[1..];
    assert_eq!(lines[0], "H q0");
    assert!(lines[1].starts_with("RZ q0 "));
    assert_eq!(lines[2], "H q0");

    let s = cmd_compile(4, 5, 11, &path).unwrap().stats;
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("H ")).count(), 8);
    assert_eq!(text.lines().filter(|l| l.starts_with("RZ ")).count(), 8);
    assert_eq!((s.hadamard, s.z_rotation), (8, 8));
    let parsed: Circuit<f64> = parse_circuit(&text).unwrap();
    assert_eq!(parsed.stats(), s);

    let d4 = cmd_compile(4, 3, 3, &path).unwrap().stats.depth;
    let d8 = cmd_compile(8, 3, 3, &path).unwrap().stats.depth;
    assert!(d8 as f64 / d4 as f64 <= 4.5, "{d8} / {d4}");

    assert!(cmd_compile(0, 0, 0, &path).is_err());
    assert!(cmd_compile(17, 0, 0, &path).is_err());
}

#[test]
fn spectra_are_normalized_and_clean_rank_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.samples = vec![40];
    let s = cmd_spectra(&cfg).unwrap();
    for values in [&s.noisy, &s.augmented, &s.clean] {
        assert_eq!(values.len(), 64);
        assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
    assert!(s.clean.iter().filter(|&&v| v > 1e-10).count() <= 12);
    // augmentation spreads weight into the tail
    assert!(s.augmented.iter().filter(|&&v| v > 1e-10).count() > 12);
    let csv = fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
    let body = body_lines(&csv);
    assert_eq!(body[0], "series,index,eigenvalue");
    assert_eq!(body.len() - 1, 3 * 64);
    assert!(dir.path().join("spectra.svg").exists());
}

#[test]
fn stochastic_spectra_track_the_dense_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.samples = vec![20];
    let dense = cmd_spectra(&cfg).unwrap();
    cfg.backend = ChannelBackend::Stochastic {
        shots: 20_000,
        simulator: Backend::Circuit,
    };
    let est = cmd_spectra(&cfg).unwrap();
    assert_eq!(est.noisy, dense.noisy);
    assert!((est.augmented.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    let worst = est
        .augmented
        .iter()
        .zip(&dense.augmented)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst > 0.0 && worst < 0.02, "{worst}");
}

#[test]
fn sweep_files_have_expected_shape_and_headers() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.seed = 4242;
    cmd_sweep_samples(&cfg).unwrap();
    for name in [
        "sweep_samples_trials.csv",
        "sweep_samples_summary.csv",
        "sweep_samples_advantage.csv",
        "sweep_samples_mse.svg",
        "sweep_samples_mse_normalized.svg",
        "sweep_samples_advantage.svg",
    ] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.contains("seed = 4242"), "{name}");
    }
    let summary = fs::read_to_string(dir.path().join("sweep_samples_summary.csv")).unwrap();
    // one n, two m, three variants
    assert_eq!(body_lines(&summary).len() - 1, 2 * 3);
    let trials = fs::read_to_string(dir.path().join("sweep_samples_trials.csv")).unwrap();
    let body = body_lines(&trials);
    assert_eq!(body[0], "n,d,m,sigma,K,variant,trial,mse");
    assert_eq!(body.len() - 1, 2 * 4 * 3);

    let mut noise = small(dir.path());
    noise.samples = vec![20];
    noise.sigmas = vec![0.1, 1.0];
    cmd_sweep_noise(&noise).unwrap();
    let summary = fs::read_to_string(dir.path().join("sweep_noise_summary.csv")).unwrap();
    assert_eq!(body_lines(&summary).len() - 1, 2 * 3);
}

#[test]
fn standard_error_is_sample_std_over_root_trials() {
    let dir = tempfile::tempdir().unwrap();
    let run = |batches: usize| {
        let cfg = ExperimentConfig {
            samples: vec![10],
            realizations: 5,
            batches,
            ..small(dir.path())
        };
        run_sweep(&cfg).unwrap()
    };
    let (few, many) = (run(5), run(20));
    for v in Variant::ALL {
        let errs: Vec<f64> = many
            .trials
            .iter()
            .filter(|t| t.variant == v)
            .map(|t| t.mse)
            .collect();
        let t = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / t;
        let sd = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (t - 1.0)).sqrt();
        let row = many.table.get(6, 10, 0.1, v).unwrap();
        assert_eq!(row.trials, 100);
        assert!((row.mean - mean).abs() < 1e-12 && (row.se - sd / t.sqrt()).abs() < 1e-12);
    }
    // Noisy errors are light tailed, so four times the trials halves the SE
    let a = few.table.get(6, 10, 0.1, Variant::Noisy).unwrap();
    let b = many.table.get(6, 10, 0.1, Variant::Noisy).unwrap();
    let ratio = a.se / b.se;
    assert!((ratio / 2.0 - 1.0).abs() < 0.3, "se ratio {ratio}");
}

#[test]
fn sweep_results_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: usize| {
        let cfg = ExperimentConfig {
            workers: Some(workers),
            ..small(dir.path())
        };
        run_sweep(&cfg).unwrap()
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn generated_data_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let paths = cmd_gen_data(&cfg).unwrap();
    assert_eq!(paths.len(), 2);
    for (path, sigma) in paths.iter().zip([0.0, 0.1]) {
        let text = fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# wh-augment gen-data"));
        let file = read_samples::<f64, _>(BufReader::new(text.as_bytes())).unwrap();
        assert_eq!(
            (file.d, file.samples.len(), file.sigma, file.seed),
            (64, 5, sigma, Some(cfg.seed))
        );
    }
}
