use proptest::prelude::*;
use rand::Rng;
use wh_augment::channel::build_window;
use wh_augment::dataset::{SignalDataset, SignalSpec};
use wh_augment::denoise::{
    eigendecompose, mse, project_topk, run_pipeline, PipelineConfig, SpectralDecomposition, Variant,
};
use wh_augment::density::DensityMatrix;
use wh_augment::matrix::DenseOperator;
use wh_augment::rng::derive;
use wh_augment::C;

type V = Vec<C<f64>>;

fn dot(a: &[C<f64>], b: &[C<f64>]) -> C<f64> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[C<f64>]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

fn random_unit(d: usize, rng: &mut impl Rng) -> V {
    let v: V = (0..d)
        .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let n = norm_sqr(&v).sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn decomposition(d: usize, seed: u64) -> SpectralDecomposition<f64> {
    eigendecompose(&DensityMatrix::random(d, &mut derive(seed, &[]))).unwrap()
}

#[test]
fn random_psd_is_reconstructed() {
    let rho = DensityMatrix::<f64>::random(16, &mut derive(1, &[]));
    let dec = eigendecompose(&rho).unwrap();
    let mut rebuilt = DenseOperator::zeros(16);
    for (lam, v) in dec.eigenvalues.iter().zip(&dec.eigenvectors) {
        rebuilt.add_outer(v, *lam);
    }
    assert!(rebuilt.max_abs_diff(rho.as_operator()) < 1e-10);
    assert!(dec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    for (j, a) in dec.eigenvectors.iter().enumerate() {
        for (k, b) in dec.eigenvectors.iter().enumerate() {
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((dot(a, b) - C::new(want, 0.0)).norm() < 1e-10);
        }
    }
}

#[test]
fn decomposition_is_deterministic() {
    let rho = DensityMatrix::<f64>::random(32, &mut derive(2, &[]));
    assert_eq!(eigendecompose(&rho).unwrap(), eigendecompose(&rho).unwrap());
}

#[test]
fn full_rank_projection_and_leading_vector_are_unchanged() {
    let dec = decomposition(16, 3);
    let psi = random_unit(16, &mut derive(4, &[]));
    let full = project_topk(&dec, &psi, 16, true).unwrap().vector;
    assert!(full.iter().zip(&psi).all(|(a, b)| (a - b).norm() < 1e-12));
    let v1 = dec.eigenvectors[0].clone();
    let top = project_topk(&dec, &v1, 1, true).unwrap().vector;
    assert!(top.iter().zip(&v1).all(|(a, b)| (a - b).norm() < 1e-12));
}

#[test]
fn orthogonal_input_is_flagged() {
    let dec = decomposition(8, 5);
    let psi = dec.eigenvectors[7].clone();
    let raw = project_topk(&dec, &psi, 3, false).unwrap();
    assert!(norm_sqr(&raw.vector) < 1e-24 && !raw.flagged);
    let renorm = project_topk(&dec, &psi, 3, true).unwrap();
    assert!(renorm.flagged);
    assert!(renorm.vector.iter().all(|x| *x == C::new(0.0, 0.0)));
    assert!(project_topk(&dec, &psi, 0, true).is_err());
    assert!(project_topk(&dec, &psi, 9, true).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent_and_orthogonal(seed in any::<u64>(), k in 1usize..=16) {
        let dec = decomposition(16, seed);
        let psi = random_unit(16, &mut derive(seed, &[1]));
        let once = project_topk(&dec, &psi, k, false).unwrap().vector;
        let twice = project_topk(&dec, &once, k, false).unwrap().vector;
        prop_assert!(once.iter().zip(&twice).all(|(a, b)| (a - b).norm() < 1e-12));
        let residual: V = psi.iter().zip(&once).map(|(a, b)| a - b).collect();
        prop_assert!((norm_sqr(&psi) - norm_sqr(&once) - norm_sqr(&residual)).abs() < 1e-10);
    }

    #[test]
    fn unit_pair_error_is_overlap_identity(seed in any::<u64>()) {
        let mut rng = derive(seed, &[]);
        let a: Vec<V> = (0..5).map(|_| random_unit(12, &mut rng)).collect();
        let b: Vec<V> = (0..5).map(|_| random_unit(12, &mut rng)).collect();
        let r = mse(&a, &b, Variant::Projected, 3).unwrap();
        for ((x, y), e) in a.iter().zip(&b).zip(&r.per_sample) {
            prop_assert!((e - (2.0 - 2.0 * dot(x, y).re)).abs() < 1e-12);
        }
        let mean = r.per_sample.iter().sum::<f64>() / 5.0;
        prop_assert!((r.mse - mean).abs() < 1e-12);
        prop_assert!((0.0..=4.0).contains(&r.mse));
    }
}

#[test]
fn mse_examples() {
    let mut rng = derive(6, &[]);
    let a = random_unit(8, &mut rng);
    let neg: V = a.iter().map(|x| -x).collect();
    let mut perp = vec![C::new(0.0, 0.0); 8];
    perp[0] = -a[1].conj();
    perp[1] = a[0].conj();
    let n = norm_sqr(&perp).sqrt();
    perp.iter_mut().for_each(|x| *x /= n);
    let one = |b: &V| {
        mse(
            std::slice::from_ref(&a),
            std::slice::from_ref(b),
            Variant::Noisy,
            0,
        )
        .unwrap()
        .mse
    };
    assert_eq!(one(&a), 0.0);
    assert!((one(&perp) - 2.0).abs() < 1e-12);
    assert!((one(&neg) - 4.0).abs() < 1e-12);
    assert!(mse(std::slice::from_ref(&a), &[], Variant::Noisy, 0).is_err());
}

fn dataset(n: usize, m: usize, sigma: f64, seed: u64) -> SignalDataset<f64> {
    SignalDataset::generate(&SignalSpec::new(1 << n, m, sigma), &mut derive(seed, &[])).unwrap()
}

#[test]
fn clean_data_projects_to_itself() {
    let ds = dataset(6, 30, 0.0, 7);
    let cfg = PipelineConfig {
        k: 12,
        ..PipelineConfig::default()
    };
    let r = run_pipeline(&ds, None, &cfg).unwrap();
    assert!(r.noisy.mse < 1e-20);
    assert!(r.projected.mse < 1e-10, "{}", r.projected.mse);
}

#[test]
fn heavy_noise_saturates_the_baseline() {
    let ds = dataset(8, 100, 1.5, 8);
    let r = run_pipeline(&ds, None, &PipelineConfig::default()).unwrap();
    assert!(r.noisy.mse > 1.5, "{}", r.noisy.mse);
    assert!(r.noisy.mse <= 4.0);
}

#[test]
fn pipeline_ignores_a_global_phase() {
    let ds = dataset(6, 20, 0.2, 9);
    let phase = C::from_polar(1.0, 0.7);
    let mut rotated = ds.clone();
    for v in rotated.noisy.iter_mut().chain(rotated.clean.iter_mut()) {
        v.iter_mut().for_each(|x| *x *= phase);
    }
    let w = build_window::<f64>(6).unwrap();
    let cfg = PipelineConfig::default();
    let a = run_pipeline(&ds, Some(&w), &cfg).unwrap();
    let b = run_pipeline(&rotated, Some(&w), &cfg).unwrap();
    for (x, y) in a.reports().zip(b.reports()) {
        assert!((x.mse - y.mse).abs() < 1e-10, "{:?}", x.variant);
    }
}

#[test]
fn augmentation_beats_plain_projection_on_few_samples() {
    let w = build_window::<f64>(6).unwrap();
    let (mut p, mut h) = (0.0, 0.0);
    for seed in 0..10 {
        let r = run_pipeline(
            &dataset(6, 5, 0.1, 100 + seed),
            Some(&w),
            &PipelineConfig::default(),
        )
        .unwrap();
        p += r.projected.mse;
        h += r.harmoniq.unwrap().mse;
    }
    assert!(h < p, "harmoniq {h} projected {p}");
}

#[test]
fn single_precision_pipeline_tracks_double() {
    let ds = dataset(6, 20, 0.1, 10);
    let ds32 = SignalDataset::<f32>::generate(&SignalSpec::new(64, 20, 0.1), &mut derive(10, &[]))
        .unwrap();
    let cfg = PipelineConfig::default();
    let a = run_pipeline(&ds, Some(&build_window::<f64>(6).unwrap()), &cfg).unwrap();
    let b = run_pipeline(&ds32, Some(&build_window::<f32>(6).unwrap()), &cfg).unwrap();
    for (x, y) in a.reports().zip(b.reports()) {
        assert!(
            (x.mse - y.mse).abs() < 1e-3,
            "{:?}: {} vs {}",
            x.variant,
            x.mse,
            y.mse
        );
    }
}
