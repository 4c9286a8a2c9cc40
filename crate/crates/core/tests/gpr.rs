use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use simbench::gpr::{
    concentrated_neg_log_likelihood, fit_with, kernel_eval, model_at, refit_from, FitOptions,
};
use simbench::optimizers::generate_training_data_with;
use simbench::rng::rng_from_seed;
use simbench::testbed::{illustration, make_instance, FunctionId, ILLUSTRATION_SAMPLES};
use simbench::TrainingSet;

/// Draws y ~ N(0, K(theta)) at `points` with an independent dense Cholesky.
fn gp_sample(points: &[Vec<f64>], theta: &[f64], seed: u64) -> Vec<f64> {
    let m = points.len();
    let k = DMatrix::from_fn(m, m, |i, j| {
        let d2: f64 = points[i]
            .iter()
            .zip(&points[j])
            .zip(theta)
            .map(|((a, b), t)| t * (a - b) * (a - b))
            .sum();
        (-d2).exp() + if i == j { 1e-10 } else { 0.0 }
    });
    let l = k
        .cholesky()
        .expect("sampling covariance is positive definite")
        .l();
    let mut rng = rng_from_seed(seed);
    let eps = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    (l * eps).iter().copied().collect()
}

fn random_points(seed: u64, m: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

fn quick() -> FitOptions {
    FitOptions {
        restarts: Some(4),
        ..FitOptions::default()
    }
}

#[test]
fn maximum_likelihood_recovers_known_theta() {
    let theta_star = 10.0;
    let points: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 * 0.1]).collect();
    let y = gp_sample(&points, &[theta_star], 2024);
    let set = TrainingSet::new(points, y).unwrap();

    // grid oracle over log theta
    let grid: Vec<f64> = (0..=480)
        .map(|i| 10f64.powf(-2.0 + i as f64 * 0.0125))
        .collect();
    let (grid_theta, grid_min) = grid
        .iter()
        .map(|t| (*t, concentrated_neg_log_likelihood(&set, &[*t]).unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(
        grid_theta > theta_star / 3.0 && grid_theta < theta_star * 3.0,
        "grid argmin {grid_theta}"
    );

    let model = fit_with(&set, &FitOptions::default()).unwrap();
    let theta = model.theta()[0];
    assert!(
        theta > theta_star / 3.0 && theta < theta_star * 3.0,
        "fitted {theta}"
    );
    assert!(model.neg_log_likelihood() <= grid_min + 1e-6);
}

#[test]
fn refit_from_optimum_is_idempotent() {
    let points = random_points(5, 30, 2, 0.0, 3.0);
    let y = gp_sample(&points, &[2.0, 6.0], 99);
    let set = TrainingSet::new(points, y).unwrap();
    let model = fit_with(&set, &FitOptions::default()).unwrap();
    let again = refit_from(&set, model.theta(), &FitOptions::default()).unwrap();
    let a = model.neg_log_likelihood();
    let b = again.neg_log_likelihood();
    assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {b}");
}

#[test]
fn linear_data_is_interpolated() {
    let points: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 9.0]).collect();
    let y: Vec<f64> = points.iter().map(|p| 3.0 + 2.0 * p[0]).collect();
    let set = TrainingSet::new(points.clone(), y.clone()).unwrap();
    let model = fit_with(&set, &FitOptions::default()).unwrap();
    for (p, v) in points.iter().zip(&y) {
        assert!((model.predict(p).unwrap() - v).abs() <= 1e-6);
    }
}

#[test]
fn illustration_estimate_is_flat_in_the_sparse_region() {
    let points: Vec<Vec<f64>> = ILLUSTRATION_SAMPLES.iter().map(|x| vec![*x]).collect();
    let y: Vec<f64> = ILLUSTRATION_SAMPLES
        .iter()
        .map(|x| illustration(*x))
        .collect();
    let model = fit_with(
        &TrainingSet::new(points, y).unwrap(),
        &FitOptions::default(),
    )
    .unwrap();

    let std_over = |lo: f64, hi: f64, open: bool| {
        let values: Vec<f64> = (0..50)
            .map(|i| {
                let t = if open {
                    (i as f64 + 1.0) / 51.0
                } else {
                    i as f64 / 49.0
                };
                model.predict(&[lo + (hi - lo) * t]).unwrap()
            })
            .collect();
        let mean = values.iter().sum::<f64>() / 50.0;
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 50.0).sqrt()
    };
    let sparse = std_over(0.2, 0.55, true);
    let full = std_over(0.0, 1.0, false);
    assert!(sparse < 0.25 * full, "sparse {sparse}, full {full}");
}

#[test]
fn fitted_models_translate_with_the_data() {
    let points = random_points(8, 20, 2, -1.0, 1.0);
    let y: Vec<f64> = points
        .iter()
        .map(|p| (3.0 * p[0]).sin() + p[1] * p[1])
        .collect();
    let shifted: Vec<f64> = y.iter().map(|v| v + 250.0).collect();
    let a = fit_with(&TrainingSet::new(points.clone(), y).unwrap(), &quick()).unwrap();
    let b = fit_with(&TrainingSet::new(points, shifted).unwrap(), &quick()).unwrap();
    for x in random_points(9, 20, 2, -1.5, 1.5) {
        let pa = a.predict(&x).unwrap() + 250.0;
        let pb = b.predict(&x).unwrap();
        assert!((pa - pb).abs() <= 1e-6 * pb.abs(), "{pa} vs {pb}");
    }
}

#[test]
fn near_flat_models_still_interpolate() {
    // smooth data drives theta toward the flat limit, where K is close to
    // all ones and the weights cancel heavily
    let inst = make_instance(FunctionId::Sphere, 5, 7).unwrap();
    let set = generate_training_data_with(&inst, 75, 25, 20).unwrap();
    let model = fit_with(&set, &FitOptions::default()).unwrap();
    assert!(
        model.theta().iter().all(|t| *t < 1e-2),
        "theta {:?}",
        model.theta()
    );
    let range = set.value_range();
    for (p, v) in set.points().iter().zip(set.values()) {
        assert!((model.predict(p).unwrap() - v).abs() <= 1e-6 * range);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric_and_bounded(
        x in prop::collection::vec(-2.0f64..2.0, 1..5),
        shift in prop::collection::vec(-2.0f64..2.0, 4),
        log_theta in prop::collection::vec(-3.0f64..1.0, 4),
    ) {
        let n = x.len();
        let x2: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + s).collect();
        let theta: Vec<f64> = log_theta[..n].iter().map(|l| 10f64.powf(*l)).collect();
        let k = kernel_eval(&x, &x2, &theta).unwrap();
        prop_assert_eq!(k, kernel_eval(&x2, &x, &theta).unwrap());
        prop_assert!(k > 0.0 && k <= 1.0);
        prop_assert_eq!(kernel_eval(&x, &x, &theta).unwrap(), 1.0);
        let d2: f64 = x.iter().zip(&x2).zip(&theta).map(|((a, b), t)| t * (a - b) * (a - b)).sum();
        if d2 > 1e-12 {
            prop_assert!(k < 1.0);
        }
    }

    #[test]
    fn shift_at_fixed_theta_moves_predictions_by_the_shift(
        seed in 0u64..1000,
        c in -1e3f64..1e3,
        log_theta in 1.0f64..2.0,
    ) {
        let mut rng = rng_from_seed(seed);
        let points: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![i as f64 * 0.2 + rng.random_range(0.0..0.05)])
            .collect();
        let y: Vec<f64> = points.iter().map(|p| (2.0 * p[0]).cos() + 0.3 * p[0]).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let theta = [10f64.powf(log_theta)];
        let a = model_at(&TrainingSet::new(points.clone(), y).unwrap(), &theta).unwrap();
        let b = model_at(&TrainingSet::new(points, shifted).unwrap(), &theta).unwrap();
        for i in 0..25 {
            let x = [i as f64 * 0.1 - 0.2];
            let pa = a.predict(&x).unwrap() + c;
            let pb = b.predict(&x).unwrap();
            prop_assert!((pa - pb).abs() <= 1e-8 * pb.abs().max(1.0), "{} vs {}", pa, pb);
        }
    }

    #[test]
    fn fitted_models_interpolate(seed in 0u64..10_000, m in 5usize..25, n in 1usize..4) {
        let points = random_points(seed, m, n, -2.0, 2.0);
        let y: Vec<f64> = points
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, v)| ((i + 1) as f64 * v).sin()).sum())
            .collect();
        let set = TrainingSet::new(points, y).unwrap();
        let model = fit_with(&set, &quick()).unwrap();
        if model.jitter() == 0.0 {
            let range = set.value_range();
            for (p, v) in set.points().iter().zip(set.values()) {
                prop_assert!((model.predict(p).unwrap() - v).abs() <= 1e-6 * range);
            }
        }
    }
}
