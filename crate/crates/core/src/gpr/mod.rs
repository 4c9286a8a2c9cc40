//! Gaussian process regression (kriging) with a Gaussian kernel, constant
//! mean and no nugget.

mod fit;
mod kernel;
mod likelihood;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::objective::Objective;

pub use fit::{fit, fit_with, model_at, refit_from, FitOptions};
pub use kernel::{build_correlation_matrix, factorize, kernel_eval, Factorization};
pub use kernel::{JITTER_MAX, JITTER_START, PIVOT_FLOOR};
pub use likelihood::{concentrated_neg_log_likelihood, NegLogLikelihood, DEFAULT_PENALTY};

pub(crate) use kernel::{correlation, correlation_matrix, solve_refined, Dot2};

pub const THETA_LOWER: f64 = 1e-6;
pub const THETA_UPPER: f64 = 1e12;

/// Points closer than this (Euclidean) are treated as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-10;

/// Observed points and values.
///
/// Construction validates dimensions and drops duplicate points, keeping
/// the first observation of each.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainingSet {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl TrainingSet {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let n = points.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidInput(
                "points must have dimension >= 1".into(),
            ));
        }
        for p in &points {
            check_dim(n, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite coordinate in {p:?}"
                )));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite observation {v}")));
        }

        let mut kept_points: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        let mut kept_values = Vec::with_capacity(values.len());
        for (p, v) in points.into_iter().zip(values) {
            let duplicate = kept_points
                .iter()
                .any(|q| euclidean(q, &p) < DUPLICATE_TOLERANCE);
            if duplicate {
                log::debug!("dropping duplicate training point {p:?}");
            } else {
                kept_points.push(p);
                kept_values.push(v);
            }
        }
        if kept_points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 distinct training points, got {}",
                kept_points.len()
            )));
        }
        Ok(Self {
            points: kept_points,
            values: kept_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
        hi - lo
    }
}

impl<'de> Deserialize<'de> for TrainingSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            points: Vec<Vec<f64>>,
            values: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        TrainingSet::new(raw.points, raw.values).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Fitted kernel parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Per-dimension activity (inverse squared length scale).
    pub theta: Vec<f64>,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
}

impl KernelParams {
    pub fn new(theta: Vec<f64>, mu_hat: f64, sigma2_hat: f64) -> Result<Self> {
        let params = Self {
            theta,
            mu_hat,
            sigma2_hat,
        };
        params.validate()?;
        Ok(params)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(Error::InvalidInput("theta must not be empty".into()));
        }
        if let Some(t) = self
            .theta
            .iter()
            .find(|t| !(**t >= THETA_LOWER && **t <= THETA_UPPER))
        {
            return Err(Error::InvalidInput(format!(
                "theta component {t} outside [{THETA_LOWER:e}, {THETA_UPPER:e}]"
            )));
        }
        if !(self.sigma2_hat > 0.0) || !self.sigma2_hat.is_finite() {
            return Err(Error::InvalidInput(format!(
                "process variance must be positive, got {}",
                self.sigma2_hat
            )));
        }
        if !self.mu_hat.is_finite() {
            return Err(Error::InvalidInput("process mean must be finite".into()));
        }
        Ok(())
    }
}

/// A fitted, immutable Gaussian process model.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "ModelDocument", try_from = "ModelDocument")]
pub struct GprModel {
    training: TrainingSet,
    params: KernelParams,
    correlation: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    jitter: f64,
    alpha: DVector<f64>,
}

impl GprModel {
    /// Assembles a model from a training set and given parameters. The
    /// correlation factor and predictor weights are computed here.
    pub fn from_params(training: TrainingSet, params: KernelParams) -> Result<Self> {
        params.validate()?;
        check_dim(training.dim(), params.theta.len())?;
        let correlation = correlation_matrix(training.points(), &params.theta);
        let Factorization { chol, jitter } = factorize(&correlation)?;
        let residual = DVector::from_column_slice(training.values()).add_scalar(-params.mu_hat);
        let alpha = solve_refined(&correlation, &chol, &residual);
        Ok(Self {
            training,
            params,
            correlation,
            chol,
            jitter,
            alpha,
        })
    }

    pub fn training(&self) -> &TrainingSet {
        &self.training
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn theta(&self) -> &[f64] {
        &self.params.theta
    }

    pub fn mu_hat(&self) -> f64 {
        self.params.mu_hat
    }

    pub fn sigma2_hat(&self) -> f64 {
        self.params.sigma2_hat
    }

    pub fn dim(&self) -> usize {
        self.training.dim()
    }

    /// Absolute diagonal jitter the factorization needed (zero normally).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn correlation_matrix(&self) -> &DMatrix<f64> {
        &self.correlation
    }

    /// Lower-triangular Cholesky factor of the (jittered) correlation matrix.
    pub fn chol_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `K^-1 (y - 1 mu)`
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// Concentrated negative log-likelihood of the fitted parameters.
    pub fn neg_log_likelihood(&self) -> f64 {
        concentrated_neg_log_likelihood(&self.training, &self.params.theta)
            .unwrap_or(DEFAULT_PENALTY)
    }

    /// Kriging predictor `mu + k' K^-1 (y - 1 mu)`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let theta = &self.params.theta;
        let mut acc = Dot2::new(self.params.mu_hat);
        for (p, a) in self.training.points().iter().zip(self.alpha.iter()) {
            acc.add_product(correlation(p, x, theta), *a);
        }
        acc.value()
    }

    /// Solves `K w = rhs` against the model's correlation matrix.
    pub(crate) fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        solve_refined(&self.correlation, &self.chol, rhs)
    }
}

impl Objective for GprModel {
    fn dim(&self) -> usize {
        self.training.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.predict_unchecked(x)
    }
}

/// On-disk form of a model. Factors are recomputed on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDocument {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub theta: Vec<f64>,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
}

impl From<GprModel> for ModelDocument {
    fn from(model: GprModel) -> Self {
        Self {
            points: model.training.points,
            values: model.training.values,
            theta: model.params.theta,
            mu_hat: model.params.mu_hat,
            sigma2_hat: model.params.sigma2_hat,
        }
    }
}

impl TryFrom<ModelDocument> for GprModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        let training = TrainingSet::new(doc.points, doc.values)?;
        let params = KernelParams::new(doc.theta, doc.mu_hat, doc.sigma2_hat)?;
        GprModel::from_params(training, params)
    }
}
