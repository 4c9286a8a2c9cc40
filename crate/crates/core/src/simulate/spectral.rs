use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gpr::{correlation, Dot2, GprModel, THETA_LOWER};
use crate::objective::Objective;
use crate::rng::rng_from_seed;

/// Number of cosine terms used when none is given: `100 n`.
pub fn default_terms(dim: usize) -> usize {
    100 * dim
}

/// Draws `n_terms` frequency vectors from the spectral density of the
/// Gaussian kernel: component `i` is `Normal(0, 2 theta_i)`.
pub fn sample_frequencies(model: &GprModel, n_terms: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let (flat, dim) = draw_spectrum(model.theta(), n_terms, seed)?.0;
    Ok(flat.chunks(dim).map(<[f64]>::to_vec).collect())
}

type Spectrum = ((Vec<f64>, usize), Vec<f64>);

/// Frequencies (flat, row per term) then phases, from one seeded stream.
fn draw_spectrum(theta: &[f64], n_terms: usize, seed: u64) -> Result<Spectrum> {
    if n_terms == 0 {
        return Err(Error::InvalidInput("need at least one cosine term".into()));
    }
    if theta.is_empty() {
        return Err(Error::InvalidInput("theta must not be empty".into()));
    }
    if let Some(t) = theta.iter().find(|t| !(**t >= THETA_LOWER)) {
        return Err(Error::InvalidInput(format!(
            "theta component {t} below the lower bound {THETA_LOWER:e}"
        )));
    }
    let dim = theta.len();
    let std_devs: Vec<f64> = theta.iter().map(|t| (2.0 * t).sqrt()).collect();
    let mut rng = rng_from_seed(seed);
    let mut frequencies = Vec::with_capacity(n_terms * dim);
    for _ in 0..n_terms {
        for sd in &std_devs {
            let z: f64 = rng.sample(StandardNormal);
            frequencies.push(sd * z);
        }
    }
    let phases = (0..n_terms).map(|_| rng.random_range(-PI..PI)).collect();
    Ok(((frequencies, dim), phases))
}

/// Data that turn an unconditional draw into one that interpolates the
/// training observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningData {
    pub points: Vec<Vec<f64>>,
    /// `K^-1 (y - 1 mu - y_sc)`, with `y_sc` the unconditional draw at the
    /// training points.
    pub weights: Vec<f64>,
    pub theta: Vec<f64>,
    pub mu_hat: f64,
}

/// A random function `sigma sqrt(2/N) sum_v cos(w_v . x + phi_v)`, optionally
/// plus a kriging correction of its residuals at the training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpectralDocument", try_from = "SpectralDocument")]
pub struct SpectralFunction {
    dim: usize,
    /// N x n, row-major.
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    amplitude: f64,
    scale: f64,
    conditioning: Option<ConditioningData>,
    seed: u64,
}

impl SpectralFunction {
    /// Unconditional draw for kernel parameters `theta` and standard
    /// deviation `amplitude`.
    pub fn sample(theta: &[f64], amplitude: f64, n_terms: usize, seed: u64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidInput(format!(
                "invalid amplitude {amplitude}"
            )));
        }
        let ((frequencies, dim), phases) = draw_spectrum(theta, n_terms, seed)?;
        Ok(Self {
            dim,
            frequencies,
            phases,
            amplitude,
            scale: (2.0 / n_terms as f64).sqrt(),
            conditioning: None,
            seed,
        })
    }

    /// Builds a function from explicit frequencies and phases.
    pub fn from_parts(
        frequencies: Vec<Vec<f64>>,
        phases: Vec<f64>,
        amplitude: f64,
    ) -> Result<Self> {
        SpectralDocument {
            frequencies,
            phases,
            amplitude,
            scale: None,
            conditioning: None,
            seed: 0,
        }
        .try_into()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_terms(&self) -> usize {
        self.phases.len()
    }

    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        self.frequencies
            .chunks(self.dim)
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn conditioning(&self) -> Option<&ConditioningData> {
        self.conditioning.as_ref()
    }

    pub fn is_conditional(&self) -> bool {
        self.conditioning.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value_unchecked(x))
    }

    /// The cosine sum alone, without any conditioning correction.
    pub fn unconditional_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.cosine_sum(x))
    }

    #[inline]
    fn cosine_sum(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        if self.dim == 1 {
            let x0 = x[0];
            for (w, phi) in self.frequencies.iter().zip(&self.phases) {
                sum += (w * x0 + phi).cos();
            }
        } else {
            for (w, phi) in self.frequencies.chunks_exact(self.dim).zip(&self.phases) {
                let arg: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phi;
                sum += arg.cos();
            }
        }
        self.amplitude * self.scale * sum
    }

    fn value_unchecked(&self, x: &[f64]) -> f64 {
        let base = self.cosine_sum(x);
        match &self.conditioning {
            None => base,
            Some(c) => {
                let mut acc = Dot2::new(base + c.mu_hat);
                for (p, w) in c.points.iter().zip(&c.weights) {
                    acc.add_product(correlation(p, x, &c.theta), *w);
                }
                acc.value()
            }
        }
    }
}

impl Objective for SpectralFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_unchecked(x)
    }
}

/// A centered draw from the model's process. Add `mu_hat` for a mean level.
pub fn simulate_unconditional(
    model: &GprModel,
    n_terms: usize,
    seed: u64,
) -> Result<SpectralFunction> {
    SpectralFunction::sample(model.theta(), model.sigma2_hat().sqrt(), n_terms, seed)
}

/// A draw that reproduces the training observations.
///
/// The unconditional draw's residuals at the training points are kriged
/// with the model's kernel: `f(x) + mu + k(x)' K^-1 (y - 1 mu - f(X))`.
pub fn simulate_conditional(
    model: &GprModel,
    n_terms: usize,
    seed: u64,
) -> Result<SpectralFunction> {
    let mut sim = simulate_unconditional(model, n_terms, seed)?;
    let training = model.training();
    let mu = model.mu_hat();
    let rhs = DVector::from_iterator(
        training.len(),
        training
            .points()
            .iter()
            .zip(training.values())
            .map(|(p, y)| y - mu - sim.cosine_sum(p)),
    );
    let weights = model.solve(&rhs);
    sim.conditioning = Some(ConditioningData {
        points: training.points().to_vec(),
        weights: weights.iter().copied().collect(),
        theta: model.theta().to_vec(),
        mu_hat: mu,
    });
    Ok(sim)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpectralDocument {
    frequencies: Vec<Vec<f64>>,
    phases: Vec<f64>,
    amplitude: f64,
    #[serde(default)]
    scale: Option<f64>,
    #[serde(default)]
    conditioning: Option<ConditioningData>,
    #[serde(default)]
    seed: u64,
}

impl From<SpectralFunction> for SpectralDocument {
    fn from(f: SpectralFunction) -> Self {
        Self {
            frequencies: f.frequencies(),
            phases: f.phases,
            amplitude: f.amplitude,
            scale: Some(f.scale),
            conditioning: f.conditioning,
            seed: f.seed,
        }
    }
}

impl TryFrom<SpectralDocument> for SpectralFunction {
    type Error = Error;

    fn try_from(doc: SpectralDocument) -> Result<Self> {
        let n_terms = doc.phases.len();
        if n_terms == 0 || doc.frequencies.len() != n_terms {
            return Err(Error::InvalidInput(format!(
                "{} frequency vectors for {} phases",
                doc.frequencies.len(),
                n_terms
            )));
        }
        let dim = doc.frequencies[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("frequency vectors are empty".into()));
        }
        for w in &doc.frequencies {
            check_dim(dim, w.len())?;
        }
        if let Some(c) = &doc.conditioning {
            check_dim(dim, c.theta.len())?;
            if c.points.len() != c.weights.len() {
                return Err(Error::InvalidInput(
                    "conditioning points/weights differ in length".into(),
                ));
            }
            for p in &c.points {
                check_dim(dim, p.len())?;
            }
        }
        Ok(Self {
            dim,
            frequencies: doc.frequencies.concat(),
            phases: doc.phases,
            amplitude: doc.amplitude,
            scale: doc.scale.unwrap_or((2.0 / n_terms as f64).sqrt()),
            conditioning: doc.conditioning,
            seed: doc.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    use crate::gpr::{KernelParams, TrainingSet};

    fn model_1d(theta: f64) -> GprModel {
        let points: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 5.0]).collect();
        let values = points.iter().map(|p| (6.0 * p[0]).sin()).collect();
        let set = TrainingSet::new(points, values).unwrap();
        GprModel::from_params(set, KernelParams::new(vec![theta], 0.3, 1.7).unwrap()).unwrap()
    }

    #[test]
    fn single_term_examples() {
        let flat = SpectralFunction::from_parts(vec![vec![0.0]], vec![0.0], 1.0).unwrap();
        for x in [-3.0, 0.0, 2.5] {
            assert!((flat.eval(&[x]).unwrap() - SQRT_2).abs() < 1e-15);
        }
        let wave = SpectralFunction::from_parts(vec![vec![PI]], vec![0.0], 1.0).unwrap();
        assert!((wave.eval(&[1.0]).unwrap() + SQRT_2).abs() < 1e-15);
        assert!(wave.eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn frequencies_reject_degenerate_theta_and_zero_terms() {
        assert!(SpectralFunction::sample(&[0.0], 1.0, 10, 1).is_err());
        assert!(SpectralFunction::sample(&[1.0], 1.0, 0, 1).is_err());
    }

    #[test]
    fn frequency_variance_is_two_theta() {
        let model = model_1d(8.0);
        let w = sample_frequencies(&model, 100_000, 5).unwrap();
        let mean = w.iter().map(|v| v[0]).sum::<f64>() / w.len() as f64;
        let var = w.iter().map(|v| (v[0] - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
        assert!((var - 16.0).abs() / 16.0 < 0.02, "variance {var}");
        assert_eq!(w, sample_frequencies(&model, 100_000, 5).unwrap());
    }

    #[test]
    fn unconditional_values_respect_cosine_bound() {
        let model = model_1d(30.0);
        let sim = simulate_unconditional(&model, 50, 9).unwrap();
        let bound = model.sigma2_hat().sqrt() * (2.0 * 50.0f64).sqrt();
        for i in 0..200 {
            let v = sim.eval(&[i as f64 * 0.05 - 5.0]).unwrap();
            assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn conditional_draw_interpolates() {
        let model = model_1d(30.0);
        let range = model.training().value_range();
        for seed in 0..5 {
            let sim = simulate_conditional(&model, 100, seed).unwrap();
            for (p, y) in model
                .training()
                .points()
                .iter()
                .zip(model.training().values())
            {
                assert!((sim.eval(p).unwrap() - y).abs() <= 1e-6 * range);
            }
        }
    }

    #[test]
    fn json_round_trip_preserves_values() {
        let model = model_1d(30.0);
        let sim = simulate_conditional(&model, 40, 3).unwrap();
        let json = serde_json::to_string(&sim).unwrap();
        let back: SpectralFunction = serde_json::from_str(&json).unwrap();
        for i in 0..50 {
            let x = [i as f64 / 49.0];
            assert_eq!(sim.eval(&x).unwrap(), back.eval(&x).unwrap());
        }
        assert_eq!(back.seed(), 3);
    }
}
