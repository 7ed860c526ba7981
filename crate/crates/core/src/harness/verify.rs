//! Self-check suite behind the `verify` command.

use std::fmt::Write as _;

use rand::Rng;

use crate::channel::{apply_channel_dense, uniform_window};
use crate::circuit::{circuit_unitary, compile_weyl, Circuit, DEFAULT_VERIFICATION_CAP};
use crate::density::DensityMatrix;
use crate::error::Result;
use crate::rng::derive;
use crate::weyl::{build_weyl, compose_weyl, PhasePoint};

/// Minimum projective fidelity between compiled and dense Weyl operators.
pub const FIDELITY_TOLERANCE: f64 = 1e-10;
pub const TWIRL_TOLERANCE: f64 = 1e-10;
pub const COMPOSITION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Measured gate counts next to the closed-form claims `2n`, `2n`, `n(n + 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateCountRow {
    pub n: usize,
    pub hadamard: usize,
    pub z_rotation: usize,
    pub controlled_phase: usize,
    pub depth: usize,
    pub claimed_controlled_phase: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub gate_counts: Vec<GateCountRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<4} {:<34} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        let _ = writeln!(s, "\n  n    H   RZ   CP  depth  claimed CP n(n+2)");
        for r in &self.gate_counts {
            let _ = writeln!(
                s,
                "{:>3} {:>4} {:>4} {:>4} {:>6} {:>18}",
                r.n,
                r.hadamard,
                r.z_rotation,
                r.controlled_phase,
                r.depth,
                r.claimed_controlled_phase
            );
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Exhaustive fidelity check for every `n` up to this value.
    pub exhaustive_max: usize,
    /// Random displacement pairs per `n` in `exhaustive_max + 1 ..= random_max`.
    pub random_pairs: usize,
    pub random_max: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            exhaustive_max: 4,
            random_pairs: 100,
            random_max: 6,
            seed: 7,
        }
    }
}

/// Lowest fidelity `|tr(U_circ^dagger U)| / d` over `points`.
pub fn min_fidelity<F>(compiler: &F, n: usize, points: &[PhasePoint]) -> Result<f64>
where
    F: Fn(usize, PhasePoint) -> Circuit<f64>,
{
    let d = 1usize << n;
    let mut worst = f64::INFINITY;
    for &p in points {
        let circ = circuit_unitary(&compiler(n, p), DEFAULT_VERIFICATION_CAP)?;
        worst = worst.min(circ.fidelity(&build_weyl(d, p)?));
    }
    Ok(worst)
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Runs the suite with the standard compiler.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    run_verify_with(&compile_weyl::<f64>, opts)
}

/// Runs the suite against an arbitrary Weyl compiler. Errors from the
/// compiled circuits are reported as failed checks.
pub fn run_verify_with<F>(compiler: &F, opts: &VerifyOptions) -> VerifyReport
where
    F: Fn(usize, PhasePoint) -> Circuit<f64>,
{
    let mut report = VerifyReport::default();
    let mut rng = derive(opts.seed, &[]);

    for n in 1..=opts.random_max {
        let d = 1usize << n;
        let (label, points): (&str, Vec<PhasePoint>) = if n <= opts.exhaustive_max {
            let all = (0..d as i64)
                .flat_map(|x| (0..d as i64).map(move |z| PhasePoint::new(x, z, d)))
                .collect();
            ("exhaustive", all)
        } else {
            let pts = (0..opts.random_pairs)
                .map(|_| {
                    PhasePoint::new(
                        rng.random_range(0..d as i64),
                        rng.random_range(0..d as i64),
                        d,
                    )
                })
                .collect();
            ("random", pts)
        };
        let name = format!("circuit fidelity n={n} ({label})");
        report
            .checks
            .push(match min_fidelity(compiler, n, &points) {
                Ok(f) => check(
                    name,
                    f >= 1.0 - FIDELITY_TOLERANCE,
                    format!(
                        "{} points, max 1 - fidelity {:.1e}",
                        points.len(),
                        (1.0 - f).max(0.0)
                    ),
                ),
                Err(e) => check(name, false, e.to_string()),
            });
    }

    for d in [8usize, 16, 32] {
        let name = format!("twirl to I/d, d={d}");
        let outcome = (|| -> Result<f64> {
            let window = uniform_window::<f64>(d)?;
            let target = DensityMatrix::<f64>::maximally_mixed(d);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let rho = DensityMatrix::random(d, &mut rng);
                worst = worst.max(apply_channel_dense(&window, &rho)?.trace_distance(&target)?);
            }
            Ok(worst)
        })();
        report.checks.push(match outcome {
            Ok(td) => check(
                name,
                td < TWIRL_TOLERANCE,
                format!("10 states, max trace distance {td:.1e}"),
            ),
            Err(e) => check(name, false, e.to_string()),
        });
    }

    let d = 8usize;
    let outcome = (|| -> Result<f64> {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let mut draw = || {
                PhasePoint::new(
                    rng.random_range(0..d as i64),
                    rng.random_range(0..d as i64),
                    d,
                )
            };
            let (p, q) = (draw(), draw());
            let comp = compose_weyl::<f64>(d, p, q)?;
            let lhs = build_weyl::<f64>(d, p)?.matmul(&build_weyl(d, q)?);
            let rhs = build_weyl::<f64>(d, comp.sum)?.scale(comp.phase);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        Ok(worst)
    })();
    report.checks.push(match outcome {
        Ok(dev) => check(
            "composition law, d=8",
            dev < COMPOSITION_TOLERANCE,
            format!("200 pairs, max deviation {dev:.1e}"),
        ),
        Err(e) => check("composition law, d=8", false, e.to_string()),
    });

    let mut structure_ok = true;
    for n in 2..=8usize {
        let d = 1usize << n;
        let p = PhasePoint::new(1, 1, d);
        let stats = compiler(n, p).stats();
        structure_ok &= stats.hadamard == 2 * n && stats.z_rotation == 2 * n;
        report.gate_counts.push(GateCountRow {
            n,
            hadamard: stats.hadamard,
            z_rotation: stats.z_rotation,
            controlled_phase: stats.controlled_phase,
            depth: stats.depth,
            claimed_controlled_phase: n * (n + 2),
        });
    }
    let cp = |n: usize| {
        report
            .gate_counts
            .iter()
            .find(|r| r.n == n)
            .map_or(0, |r| r.controlled_phase)
    };
    let ratio = cp(8) as f64 / cp(4).max(1) as f64;
    report.checks.push(check(
        "gate structure n=2..8",
        structure_ok && (3.0..=5.0).contains(&ratio),
        format!("2n H and 2n RZ: {structure_ok}; CP(8)/CP(4) = {ratio:.3}"),
    ));
    report
}
