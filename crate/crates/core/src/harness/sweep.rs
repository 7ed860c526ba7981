//! Seeded denoising sweeps.
//!
//! Each trial is identified by `(n, m, sigma, batch, realization)`. Clean data
//! is drawn from a stream keyed by `(n, m, batch)` and noise from one keyed by
//! the full trial id, so every trial is reproducible in isolation and the
//! worker pool only changes scheduling, never results.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::RngCore;
use rayon::prelude::*;

use crate::channel::{build_window_with_variance, AugmentationWindow};
use crate::dataset::{AtomLayout, SignalDataset, SignalSpec};
use crate::denoise::{run_pipeline, Variant};
use crate::error::{Error, Result};
use crate::rng::derive;

use super::config::ExperimentConfig;
use super::output::{header, write_file};
use super::plot::{LinePlot, Series};

const TAG_DATA: u64 = 1;
const TAG_NOISE: u64 = 2;
const TAG_CHANNEL: u64 = 3;

/// MSE of one variant in one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub k: usize,
    pub variant: Variant,
    pub trial: usize,
    pub mse: f64,
}

impl TrialRecord {
    pub fn d(&self) -> usize {
        1 << self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub k: usize,
    pub variant: Variant,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub se: f64,
    pub trials: usize,
}

impl ResultRow {
    pub fn d(&self) -> usize {
        1 << self.n
    }
}

/// Aggregated rows sorted by `(n, m, sigma, variant)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn from_trials(records: &[TrialRecord]) -> Self {
        let mut sorted = records.to_vec();
        sorted.sort_by(|a, b| {
            (a.n, a.m)
                .cmp(&(b.n, b.m))
                .then(a.sigma.total_cmp(&b.sigma))
                .then(a.variant.cmp(&b.variant))
                .then(a.trial.cmp(&b.trial))
        });
        let rows = sorted
            .chunk_by(|a, b| (a.n, a.m, a.variant) == (b.n, b.m, b.variant) && a.sigma == b.sigma)
            .map(|group| {
                let t = group.len() as f64;
                let mean = group.iter().map(|r| r.mse).sum::<f64>() / t;
                let se = if group.len() > 1 {
                    let var = group.iter().map(|r| (r.mse - mean).powi(2)).sum::<f64>() / (t - 1.0);
                    (var / t).sqrt()
                } else {
                    0.0
                };
                let first = group[0];
                ResultRow {
                    n: first.n,
                    m: first.m,
                    sigma: first.sigma,
                    k: first.k,
                    variant: first.variant,
                    mean,
                    se,
                    trials: group.len(),
                }
            })
            .collect();
        Self { rows }
    }

    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn get(&self, n: usize, m: usize, sigma: f64, variant: Variant) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.m == m && r.sigma == sigma && r.variant == variant)
    }

    /// `(mean, se)` of `variant` divided by the mean Noisy MSE of the same slice.
    pub fn normalized(&self, row: &ResultRow) -> Option<(f64, f64)> {
        let base = self.get(row.n, row.m, row.sigma, Variant::Noisy)?.mean;
        (base > 0.0).then(|| (row.mean / base, row.se / base))
    }

    /// Projected minus Harmoniq mean and its pooled standard error.
    pub fn advantage(&self, n: usize, m: usize, sigma: f64) -> Option<(f64, f64)> {
        let p = self.get(n, m, sigma, Variant::Projected)?;
        let h = self.get(n, m, sigma, Variant::Harmoniq)?;
        Some((p.mean - h.mean, p.se.hypot(h.se)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    /// Trial records in `(n, m, sigma, trial, variant)` order.
    pub trials: Vec<TrialRecord>,
    pub table: ResultTable,
}

#[derive(Clone, Copy, Debug)]
struct TrialId {
    n: usize,
    m: usize,
    sigma: f64,
    batch: usize,
    realization: usize,
}

fn run_trial(
    cfg: &ExperimentConfig,
    window: &AugmentationWindow<f64>,
    id: TrialId,
) -> Result<Vec<TrialRecord>> {
    let mut spec = SignalSpec::new(1 << id.n, id.m, id.sigma);
    spec.noise = cfg.noise;
    spec.layout = AtomLayout {
        window_width: cfg.window_width,
        spacing: cfg.atom_spacing,
        ..AtomLayout::default()
    };
    let (n, m, b, r) = (
        id.n as u64,
        id.m as u64,
        id.batch as u64,
        id.realization as u64,
    );
    let s = id.sigma.to_bits();
    let mut data_rng = derive(cfg.seed, &[TAG_DATA, n, m, b]);
    let mut noise_rng = derive(cfg.seed, &[TAG_NOISE, n, m, s, b, r]);
    let channel_seed = derive(cfg.seed, &[TAG_CHANNEL, n, m, s, b, r]).next_u64();

    let mut dataset = SignalDataset::<f64>::clean(&spec, &mut data_rng)?;
    dataset.add_noise(id.sigma, cfg.noise, &mut noise_rng);
    let report = run_pipeline(&dataset, Some(window), &cfg.pipeline(channel_seed))?;
    let trial = id.batch * cfg.realizations + id.realization;
    Ok(report
        .reports()
        .map(|rep| TrialRecord {
            n: id.n,
            m: id.m,
            sigma: id.sigma,
            k: cfg.k,
            variant: rep.variant,
            trial,
            mse: rep.mse,
        })
        .collect())
}

/// Runs every `(n, m, sigma)` slice of `cfg` for `cfg.trials()` trials.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;

    let mut trials = Vec::new();
    for &n in &cfg.qubits {
        let window = build_window_with_variance::<f64>(n, cfg.variance)?;
        let mut ids = Vec::new();
        for &m in &cfg.samples {
            for &sigma in &cfg.sigmas {
                for batch in 0..cfg.batches {
                    for realization in 0..cfg.realizations {
                        ids.push(TrialId {
                            n,
                            m,
                            sigma,
                            batch,
                            realization,
                        });
                    }
                }
            }
        }
        let chunks: Vec<Vec<TrialRecord>> = pool.install(|| {
            ids.par_iter()
                .map(|&id| run_trial(cfg, &window, id))
                .collect::<Result<_>>()
        })?;
        trials.extend(chunks.into_iter().flatten());
    }
    let table = ResultTable::from_trials(&trials);
    Ok(SweepOutcome { trials, table })
}

/// Which parameter a sweep varies along the plot's x axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Samples,
    Noise,
}

impl SweepAxis {
    pub fn command(self) -> &'static str {
        match self {
            SweepAxis::Samples => "sweep-samples",
            SweepAxis::Noise => "sweep-noise",
        }
    }

    fn stem(self) -> &'static str {
        match self {
            SweepAxis::Samples => "sweep_samples",
            SweepAxis::Noise => "sweep_noise",
        }
    }

    fn x(self, row: &ResultRow) -> f64 {
        match self {
            SweepAxis::Samples => row.m as f64,
            SweepAxis::Noise => row.sigma,
        }
    }

    fn label(self) -> &'static str {
        match self {
            SweepAxis::Samples => "samples m",
            SweepAxis::Noise => "noise sigma",
        }
    }

    /// Slices drawn as separate lines besides `n` and variant.
    fn other(self, row: &ResultRow) -> String {
        match self {
            SweepAxis::Samples => format!("sigma={}", row.sigma),
            SweepAxis::Noise => format!("m={}", row.m),
        }
    }
}

pub fn trials_csv(outcome: &SweepOutcome, head: &str) -> String {
    let mut s = head.to_string();
    s.push_str("n,d,m,sigma,K,variant,trial,mse\n");
    for r in &outcome.trials {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.d(),
            r.m,
            r.sigma,
            r.k,
            r.variant,
            r.trial,
            r.mse
        );
    }
    s
}

pub fn summary_csv(table: &ResultTable, head: &str) -> String {
    let mut s = head.to_string();
    s.push_str("n,d,m,sigma,K,variant,trials,mean,se,normalized_mean,normalized_se\n");
    for r in table.rows() {
        let (nm, nse) = table.normalized(r).unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.d(),
            r.m,
            r.sigma,
            r.k,
            r.variant,
            r.trials,
            r.mean,
            r.se,
            nm,
            nse
        );
    }
    s
}

/// Harmoniq advantage (Projected minus Harmoniq) per slice.
pub fn advantage_csv(table: &ResultTable, head: &str) -> String {
    let mut s = head.to_string();
    s.push_str("n,d,m,sigma,advantage,se\n");
    for r in table.rows().iter().filter(|r| r.variant == Variant::Noisy) {
        if let Some((adv, se)) = table.advantage(r.n, r.m, r.sigma) {
            let _ = writeln!(s, "{},{},{},{},{},{}", r.n, r.d(), r.m, r.sigma, adv, se);
        }
    }
    s
}

fn mse_plot(table: &ResultTable, axis: SweepAxis, normalized: bool) -> LinePlot {
    let mut series: Vec<Series> = Vec::new();
    for r in table.rows() {
        let label = format!("n={} {} {}", r.n, axis.other(r), r.variant);
        let y = if normalized {
            table.normalized(r).map_or(f64::NAN, |v| v.0)
        } else {
            r.mean
        };
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((axis.x(r), y)),
            None => series.push(Series {
                label,
                points: vec![(axis.x(r), y)],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    LinePlot {
        title: format!(
            "{} MSE{}",
            axis.command(),
            if normalized { " / mean Noisy MSE" } else { "" }
        ),
        x_label: axis.label().into(),
        y_label: if normalized { "normalized MSE" } else { "MSE" }.into(),
        log_x: axis == SweepAxis::Samples,
        series,
    }
}

fn advantage_plot(table: &ResultTable, axis: SweepAxis) -> LinePlot {
    let mut series: Vec<Series> = Vec::new();
    for r in table.rows().iter().filter(|r| r.variant == Variant::Noisy) {
        let Some((adv, _)) = table.advantage(r.n, r.m, r.sigma) else {
            continue;
        };
        let label = match axis {
            SweepAxis::Samples => format!("m={}", r.m),
            SweepAxis::Noise => format!("sigma={}", r.sigma),
        };
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((r.n as f64, adv)),
            None => series.push(Series {
                label,
                points: vec![(r.n as f64, adv)],
            }),
        }
    }
    LinePlot {
        title: "Harmoniq advantage (Projected - Harmoniq)".into(),
        x_label: "qubits n".into(),
        y_label: "MSE difference".into(),
        log_x: false,
        series,
    }
}

/// Writes the trial table, summary, advantage table and the three plots into
/// `cfg.out_dir`. Returns the written paths.
pub fn write_sweep(
    cfg: &ExperimentConfig,
    axis: SweepAxis,
    outcome: &SweepOutcome,
) -> Result<Vec<PathBuf>> {
    let csv_head = header(axis.command(), cfg, "# ");
    let stem = axis.stem();
    let dir = &cfg.out_dir;
    let svg = |plot: LinePlot| {
        let note = header(axis.command(), cfg, "");
        plot.render(&note)
    };
    Ok(vec![
        write_file(
            dir,
            &format!("{stem}_trials.csv"),
            &trials_csv(outcome, &csv_head),
        )?,
        write_file(
            dir,
            &format!("{stem}_summary.csv"),
            &summary_csv(&outcome.table, &csv_head),
        )?,
        write_file(
            dir,
            &format!("{stem}_advantage.csv"),
            &advantage_csv(&outcome.table, &csv_head),
        )?,
        write_file(
            dir,
            &format!("{stem}_mse.svg"),
            &svg(mse_plot(&outcome.table, axis, false)),
        )?,
        write_file(
            dir,
            &format!("{stem}_mse_normalized.svg"),
            &svg(mse_plot(&outcome.table, axis, true)),
        )?,
        write_file(
            dir,
            &format!("{stem}_advantage.svg"),
            &svg(advantage_plot(&outcome.table, axis)),
        )?,
    ])
}

/// Plain-text table for the terminal.
pub fn render_table(table: &ResultTable, normalized: bool) -> String {
    let mut s = format!(
        "{:>3} {:>5} {:>5} {:>7} {:<10} {:>10} {:>10} {:>6}\n",
        "n",
        "d",
        "m",
        "sigma",
        "variant",
        if normalized { "norm.mse" } else { "mse" },
        "se",
        "trials"
    );
    for r in table.rows() {
        let (mean, se) = if normalized {
            table.normalized(r).unwrap_or((f64::NAN, f64::NAN))
        } else {
            (r.mean, r.se)
        };
        let _ = writeln!(
            s,
            "{:>3} {:>5} {:>5} {:>7} {:<10} {:>10.5} {:>10.5} {:>6}",
            r.n,
            r.d(),
            r.m,
            r.sigma,
            r.variant.to_string(),
            mean,
            se,
            r.trials
        );
    }
    s
}
