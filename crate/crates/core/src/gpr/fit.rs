//! Maximum-likelihood fitting of `theta`.
//!
//! The concentrated likelihood is minimized in `log10 theta` over
//! `[-6, 12]^n` by a projected BFGS method with analytic gradients, started
//! from `10 n` Latin-hypercube points. The best local optimum wins.

use rand::seq::SliceRandom;
use rand::Rng;

use super::likelihood::NegLogLikelihood;
use super::{GprModel, KernelParams, TrainingSet, THETA_LOWER, THETA_UPPER};
use crate::error::{check_dim, Error, Result};
use crate::rng::rng_from_seed;

#[derive(Clone, Debug)]
pub struct FitOptions {
    /// Number of local searches; `None` means `10 n`.
    pub restarts: Option<usize>,
    /// Seed of the Latin-hypercube start design.
    pub seed: u64,
    pub max_iterations: usize,
    pub penalty: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: None,
            seed: 0,
            max_iterations: 200,
            penalty: super::DEFAULT_PENALTY,
        }
    }
}

fn log_bounds() -> (f64, f64) {
    (THETA_LOWER.log10(), THETA_UPPER.log10())
}

pub fn fit(training: &TrainingSet) -> Result<GprModel> {
    fit_with(training, &FitOptions::default())
}

pub fn fit_with(training: &TrainingSet, options: &FitOptions) -> Result<GprModel> {
    let n = training.dim();
    let restarts = options.restarts.unwrap_or(10 * n).max(1);
    let (lo, hi) = log_bounds();
    let mut rng = rng_from_seed(options.seed);
    let starts = latin_hypercube(&mut rng, restarts, n, lo, hi);
    let likelihood = NegLogLikelihood::new(training).with_penalty(options.penalty);

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let (x, f) = local_search(&likelihood, start, options.max_iterations);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((x, f));
        }
    }
    finish(training, &likelihood, best)
}

/// Runs only the local search, from `theta` (not in log space).
pub fn refit_from(training: &TrainingSet, theta: &[f64], options: &FitOptions) -> Result<GprModel> {
    check_dim(training.dim(), theta.len())?;
    let start: Vec<f64> = theta.iter().map(|t| t.log10()).collect();
    let likelihood = NegLogLikelihood::new(training).with_penalty(options.penalty);
    let best = local_search(&likelihood, start, options.max_iterations);
    finish(training, &likelihood, Some(best))
}

fn finish(
    training: &TrainingSet,
    likelihood: &NegLogLikelihood<'_>,
    best: Option<(Vec<f64>, f64)>,
) -> Result<GprModel> {
    let Some((log_theta, value)) = best else {
        return Err(Error::FitFailed("no likelihood evaluations".into()));
    };
    if value >= likelihood.penalty() {
        return Err(Error::FitFailed(
            "every likelihood evaluation hit the penalty (singular correlation or constant data)"
                .into(),
        ));
    }
    let theta: Vec<f64> = log_theta
        .iter()
        .map(|l| 10f64.powf(*l).clamp(THETA_LOWER, THETA_UPPER))
        .collect();
    let parts = likelihood
        .parts(&theta)
        .ok_or_else(|| Error::FitFailed("optimum fell into the penalty region".into()))?;
    log::debug!(
        "fitted theta {:?}, mu {:.6e}, sigma2 {:.6e}, nll {:.6}",
        theta,
        parts.mu_hat,
        parts.sigma2_hat,
        parts.value
    );
    let params = KernelParams::new(theta, parts.mu_hat, parts.sigma2_hat)?;
    GprModel::from_params(training.clone(), params)
}

/// Model with a fixed `theta` and the maximum-likelihood `mu` and `sigma^2`
/// that go with it.
pub fn model_at(training: &TrainingSet, theta: &[f64]) -> Result<GprModel> {
    check_dim(training.dim(), theta.len())?;
    let likelihood = NegLogLikelihood::new(training);
    let parts = likelihood
        .parts(theta)
        .ok_or_else(|| Error::FitFailed(format!("likelihood is singular at theta {theta:?}")))?;
    let params = KernelParams::new(theta.to_vec(), parts.mu_hat, parts.sigma2_hat)?;
    GprModel::from_params(training.clone(), params)
}

/// Latin-hypercube design of `count` points in `[lo, hi]^dim`.
pub(crate) fn latin_hypercube(
    rng: &mut impl Rng,
    count: usize,
    dim: usize,
    lo: f64,
    hi: f64,
) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; dim]; count];
    let width = (hi - lo) / count as f64;
    for d in 0..dim {
        let mut strata: Vec<usize> = (0..count).collect();
        strata.shuffle(rng);
        for (point, stratum) in points.iter_mut().zip(strata) {
            point[d] = lo + width * (stratum as f64 + rng.random::<f64>());
        }
    }
    points
}

/// Projected BFGS on the box `[lo, hi]^n` in log10 space.
fn local_search(
    likelihood: &NegLogLikelihood<'_>,
    start: Vec<f64>,
    max_iterations: usize,
) -> (Vec<f64>, f64) {
    const MAX_STEP: f64 = 3.0;
    const ARMIJO: f64 = 1e-4;

    let (lo, hi) = log_bounds();
    let n = start.len();
    let project = |x: &mut [f64]| x.iter_mut().for_each(|v| *v = v.clamp(lo, hi));

    let mut x = start;
    project(&mut x);
    let (mut f, mut g) = likelihood.value_and_log10_gradient(&x);
    if f >= likelihood.penalty() {
        return (x, f);
    }
    let mut h = identity(n);

    for _ in 0..max_iterations {
        let free: Vec<bool> = (0..n)
            .map(|i| !((x[i] <= lo && g[i] > 0.0) || (x[i] >= hi && g[i] < 0.0)))
            .collect();
        let pg: Vec<f64> = (0..n).map(|i| if free[i] { g[i] } else { 0.0 }).collect();
        if pg.iter().all(|v| v.abs() < 1e-7) {
            break;
        }

        let mut d = mat_vec(&h, &pg);
        d.iter_mut()
            .zip(&free)
            .for_each(|(di, fr)| *di = if *fr { -*di } else { 0.0 });
        if dot(&d, &pg) >= 0.0 {
            h = identity(n);
            d = pg.iter().map(|v| -v).collect();
        }
        let longest = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if longest > MAX_STEP {
            d.iter_mut().for_each(|v| *v *= MAX_STEP / longest);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            project(&mut trial);
            let moved: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let ft = likelihood.value_at_log10(&trial);
            if ft < likelihood.penalty() && ft <= f + ARMIJO * dot(&g, &moved) {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(x_new) = accepted else { break };

        let (f_new, g_new) = likelihood.value_and_log10_gradient(&x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            bfgs_update(&mut h, &s, &y, sy);
        }
        let small_step = s.iter().all(|v| v.abs() < 1e-10);
        let small_change = (f - f_new).abs() <= 1e-13 * (1.0 + f.abs());
        x = x_new;
        f = f_new;
        g = g_new;
        if small_step || small_change {
            break;
        }
    }
    (x, f)
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Inverse-Hessian update `H <- (I - r s y') H (I - r y s') + r s s'`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
