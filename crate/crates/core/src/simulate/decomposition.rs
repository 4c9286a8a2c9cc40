use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::gpr::{correlation_matrix, euclidean, factorize, GprModel, DUPLICATE_TOLERANCE};
use crate::rng::rng_from_seed;

/// Largest number of simulation points accepted by default.
pub const DEFAULT_DECOMPOSITION_CAP: usize = 10_000;

/// Values drawn at a fixed set of simulation points.
#[derive(Clone, Debug)]
pub struct SimulationSampleSet {
    pub points: Vec<Vec<f64>>,
    /// `1 mu + L eps`
    pub values: Vec<f64>,
    /// Lower factor `L` with `L L' = sigma^2 K_s` (plus jitter, if needed).
    pub chol_factor: DMatrix<f64>,
    pub noise: Vec<f64>,
    pub jitter: f64,
}

/// Cholesky-based sampler for one point set. Factorizes once and then
/// draws any number of samples.
#[derive(Clone, Debug)]
pub struct DecompositionSimulator {
    points: Vec<Vec<f64>>,
    mu_hat: f64,
    factor: DMatrix<f64>,
    jitter: f64,
}

impl DecompositionSimulator {
    pub fn new(model: &GprModel, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_cap(model, points, DEFAULT_DECOMPOSITION_CAP)
    }

    pub fn with_cap(model: &GprModel, points: Vec<Vec<f64>>, cap: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("no simulation points".into()));
        }
        if points.len() > cap {
            return Err(Error::Infeasible {
                requested: points.len(),
                cap,
            });
        }
        for p in &points {
            check_dim(model.dim(), p.len())?;
        }
        for j in 0..points.len() {
            for l in (j + 1)..points.len() {
                if euclidean(&points[j], &points[l]) < DUPLICATE_TOLERANCE {
                    return Err(Error::InvalidInput(format!(
                        "simulation points {j} and {l} coincide"
                    )));
                }
            }
        }
        let mut covariance = if points.len() == 1 {
            DMatrix::from_element(1, 1, 1.0)
        } else {
            correlation_matrix(&points, model.theta())
        };
        covariance *= model.sigma2_hat();
        let f = factorize(&covariance)?;
        Ok(Self {
            points,
            mu_hat: model.mu_hat(),
            factor: f.chol.l(),
            jitter: f.jitter,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Draw with standard-normal noise from `seed`.
    pub fn sample(&self, seed: u64) -> SimulationSampleSet {
        let mut rng = rng_from_seed(seed);
        let noise = (0..self.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        self.sample_with_noise(noise)
            .expect("noise length matches the point count")
    }

    /// Draw with caller-supplied noise; `noise = 0` gives `1 mu`.
    pub fn sample_with_noise(&self, noise: Vec<f64>) -> Result<SimulationSampleSet> {
        check_dim(self.len(), noise.len())?;
        let values = (&self.factor * DVector::from_column_slice(&noise)).add_scalar(self.mu_hat);
        Ok(SimulationSampleSet {
            points: self.points.clone(),
            values: values.iter().copied().collect(),
            chol_factor: self.factor.clone(),
            noise,
            jitter: self.jitter,
        })
    }

    /// Values only, for Monte-Carlo loops.
    pub fn draw_values(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        let noise: Vec<f64> = (0..self.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        (0..self.len())
            .map(|i| self.mu_hat + (0..=i).map(|j| self.factor[(i, j)] * noise[j]).sum::<f64>())
            .collect()
    }
}

/// One decomposition draw at `points`.
pub fn simulate_decomposition(
    model: &GprModel,
    points: Vec<Vec<f64>>,
    seed: u64,
) -> Result<SimulationSampleSet> {
    Ok(DecompositionSimulator::new(model, points)?.sample(seed))
}
