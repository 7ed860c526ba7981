use std::f64::consts::PI;

use rand::Rng;
use wh_augment::channel::{
    apply_channel_dense, apply_channel_stochastic, build_window, draw_augmented_state,
    identity_window, uniform_window, AugmentationWindow, Backend,
};
use wh_augment::dataset::{encode, ensemble_density, EncodedEnsemble};
use wh_augment::density::DensityMatrix;
use wh_augment::matrix::DenseOperator;
use wh_augment::rng::derive;
use wh_augment::spectral::eigvalsh;
use wh_augment::{PhasePoint, C};

/// `W(x, z) = exp(-i pi x z / d) Z^z X^x` written out entrywise from the
/// clock and shift definitions.
fn weyl_oracle(d: usize, x: i64, z: i64) -> DenseOperator<f64> {
    let phase = C::from_polar(1.0, -PI * (x * z) as f64 / d as f64);
    DenseOperator::from_fn(d, |r, c| {
        // (X^x)|c> = |c + x>, then Z^z multiplies row r by omega^{z r}
        if r as i64 == (c as i64 + x).rem_euclid(d as i64) {
            phase * C::from_polar(1.0, 2.0 * PI * (z * r as i64) as f64 / d as f64)
        } else {
            C::new(0.0, 0.0)
        }
    })
}

fn channel_oracle(w: &AugmentationWindow<f64>, rho: &DenseOperator<f64>) -> DenseOperator<f64> {
    let d = w.dim();
    let mut out = DenseOperator::zeros(d);
    for (&(x, z), &lam) in w.offsets().iter().zip(w.weights()) {
        let u = weyl_oracle(d, x, z);
        out.add_scaled(&u.matmul(rho).matmul(&u.adjoint()), lam);
    }
    out
}

fn random_state(d: usize, seed: u64) -> DensityMatrix<f64> {
    DensityMatrix::random(d, &mut derive(seed, &[d as u64]))
}

fn random_ensemble(d: usize, m: usize, seed: u64) -> EncodedEnsemble<f64> {
    let mut rng = derive(seed, &[]);
    let vecs: Vec<Vec<C<f64>>> = (0..m)
        .map(|_| {
            (0..d)
                .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect();
    encode(&vecs, false).unwrap()
}

#[test]
fn dense_channel_matches_explicit_products() {
    for n in [2, 3, 4, 5] {
        let w = build_window::<f64>(n).unwrap();
        let rho = random_state(w.dim(), 1);
        let got = apply_channel_dense(&w, &rho).unwrap();
        let want = channel_oracle(&w, rho.as_operator());
        assert!(got.as_operator().max_abs_diff(&want) < 1e-13, "n = {n}");
    }
}

#[test]
fn identity_window_is_a_fixed_point() {
    for d in [2, 8, 32] {
        let rho = random_state(d, 2);
        let out = apply_channel_dense(&identity_window::<f64>(d).unwrap(), &rho).unwrap();
        assert!(out.as_operator().max_abs_diff(rho.as_operator()) < 1e-15);
    }
}

#[test]
fn full_twirl_is_maximally_mixed() {
    for d in [8, 16, 32] {
        let w = uniform_window::<f64>(d).unwrap();
        assert_eq!(w.len(), d * d);
        let target = DensityMatrix::maximally_mixed(d);
        for seed in 0..10 {
            let out = apply_channel_dense(&w, &random_state(d, seed)).unwrap();
            assert!(out.trace_distance(&target).unwrap() < 1e-10);
        }
    }
}

#[test]
fn dense_output_is_a_state() {
    for n in [3, 4, 6] {
        let w = build_window::<f64>(n).unwrap();
        for seed in 0..3 {
            let out = apply_channel_dense(&w, &random_state(w.dim(), seed)).unwrap();
            let op = out.as_operator();
            assert!((op.trace() - C::new(1.0, 0.0)).norm() < 1e-12);
            assert!(op.hermiticity_defect() < 1e-12);
            assert!(*eigvalsh(op).unwrap().last().unwrap() > -1e-10);
        }
    }
}

#[test]
fn channel_is_linear_unital_and_contractive() {
    let w = build_window::<f64>(4).unwrap();
    let d = w.dim();
    let (a, b) = (random_state(d, 3), random_state(d, 4));
    let t = 0.3;
    let mut mix = a.as_operator().scale(C::new(t, 0.0));
    mix.add_scaled(b.as_operator(), 1.0 - t);
    let mix = DensityMatrix::new(mix).unwrap();
    let pa = apply_channel_dense(&w, &a).unwrap();
    let pb = apply_channel_dense(&w, &b).unwrap();
    let mut want = pa.as_operator().scale(C::new(t, 0.0));
    want.add_scaled(pb.as_operator(), 1.0 - t);
    let got = apply_channel_dense(&w, &mix).unwrap();
    assert!(got.as_operator().max_abs_diff(&want) < 1e-14);

    let mixed = DensityMatrix::maximally_mixed(d);
    let out = apply_channel_dense(&w, &mixed).unwrap();
    assert!(out.as_operator().max_abs_diff(mixed.as_operator()) < 1e-15);

    assert!(pa.trace_distance(&pb).unwrap() <= a.trace_distance(&b).unwrap() + 1e-12);
}

#[test]
fn dimension_mismatch_is_rejected() {
    let w = build_window::<f64>(3).unwrap();
    assert!(apply_channel_dense(&w, &random_state(4, 0)).is_err());
    assert!(
        apply_channel_stochastic(&w, &random_ensemble(4, 3, 0), 10, 0, Backend::Dense).is_err()
    );
}

#[test]
fn sampling_matches_weights_chi_square() {
    let w = build_window::<f64>(3).unwrap();
    let draws = 100_000;
    let mut counts = vec![0usize; w.len()];
    let mut rng = derive(99, &[]);
    for _ in 0..draws {
        let p = w.sample_displacement(&mut rng);
        counts[w.points().iter().position(|&q| q == p).unwrap()] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(w.weights())
        .map(|(&c, &lam)| {
            let e = lam * draws as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    // 99.9% quantile of chi-square with 8 degrees of freedom
    assert!(chi2 < 26.12, "chi2 = {chi2}");
    for (&c, &lam) in counts.iter().zip(w.weights()) {
        let e = lam * draws as f64;
        assert!((c as f64 - e).abs() < 3.0 * (e * (1.0 - lam)).sqrt() + 1.0);
    }
}

#[test]
fn two_equal_weight_points_split_evenly() {
    let d = 8;
    let w = AugmentationWindow::<f64>::from_parts(d, vec![(0, 0), (1, 2)], vec![0.5, 0.5], 1.0)
        .unwrap();
    let mut rng = derive(5, &[]);
    let hits = (0..10_000)
        .filter(|_| w.sample_displacement(&mut rng) == PhasePoint::new(1, 2, d))
        .count();
    let ratio = hits as f64 / (10_000 - hits) as f64;
    assert!((ratio - 1.0).abs() < 0.05, "ratio = {ratio}");
}

#[test]
fn single_shot_single_state_identity_window() {
    let d = 8;
    let psi = random_ensemble(d, 2, 7).states()[0].clone();
    let e = EncodedEnsemble::new(vec![psi.clone()], vec![1.0]).unwrap();
    let out = apply_channel_stochastic(
        &identity_window::<f64>(d).unwrap(),
        &e,
        1,
        3,
        Backend::Dense,
    )
    .unwrap();
    let want = DenseOperator::outer(&psi, &psi, 1.0);
    assert!(out.as_operator().max_abs_diff(&want) < 1e-15);
}

#[test]
fn stochastic_output_is_hermitian_unit_trace() {
    let w = build_window::<f64>(4).unwrap();
    let e = random_ensemble(16, 5, 8);
    for backend in [Backend::Dense, Backend::Circuit] {
        let out = apply_channel_stochastic(&w, &e, 3000, 1, backend).unwrap();
        let op = out.as_operator();
        assert!((op.trace() - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!(op.hermiticity_defect() < 1e-12);
    }
}

#[test]
fn stochastic_estimate_approaches_dense_output() {
    let w = build_window::<f64>(6).unwrap();
    let e = random_ensemble(64, 10, 9);
    let dense = apply_channel_dense(&w, &ensemble_density(&e)).unwrap();
    let td = |n: usize| {
        apply_channel_stochastic(&w, &e, n, 17, Backend::Dense)
            .unwrap()
            .trace_distance(&dense)
            .unwrap()
    };
    let (small, large) = (td(200), td(20_000));
    assert!(large < 0.05, "{large}");
    assert!(large < small / 3.0, "{small} -> {large}");
}

#[test]
fn circuit_backend_matches_dense_on_identical_streams() {
    let w = build_window::<f64>(5).unwrap();
    let e = random_ensemble(32, 6, 10);
    let mut a = derive(21, &[]);
    let mut b = derive(21, &[]);
    for _ in 0..50 {
        let u = draw_augmented_state(&w, &e, &mut a, Backend::Dense).unwrap();
        let v = draw_augmented_state(&w, &e, &mut b, Backend::Circuit).unwrap();
        // conjugation removes the global phase, so compare the projectors
        let pu = DenseOperator::outer(&u, &u, 1.0);
        let pv = DenseOperator::outer(&v, &v, 1.0);
        assert!(pu.max_abs_diff(&pv) < 1e-9);
    }
    let dense = apply_channel_stochastic(&w, &e, 2500, 4, Backend::Dense).unwrap();
    let circ = apply_channel_stochastic(&w, &e, 2500, 4, Backend::Circuit).unwrap();
    assert!(dense.as_operator().max_abs_diff(circ.as_operator()) < 1e-9);
}

#[test]
fn stochastic_estimate_is_independent_of_worker_count() {
    let w = build_window::<f64>(4).unwrap();
    let e = random_ensemble(16, 4, 11);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| apply_channel_stochastic(&w, &e, 5000, 12, Backend::Dense).unwrap())
    };
    assert_eq!(run(1), run(4));
    let rho = ensemble_density(&e);
    let dense = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| apply_channel_dense(&w, &rho).unwrap())
    };
    assert_eq!(dense(1), dense(3));
}
