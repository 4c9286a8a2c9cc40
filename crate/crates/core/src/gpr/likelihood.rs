//! Concentrated negative log-likelihood of the constant-mean Gaussian
//! process.
//!
//! With `mu` and `sigma^2` replaced by their closed-form maximizers
//!
//! ```text
//! mu(theta)      = (1' K^-1 y) / (1' K^-1 1)
//! sigma^2(theta) = (y - 1 mu)' K^-1 (y - 1 mu) / m
//! ```
//!
//! the quantity minimized over `theta` is `m ln sigma^2 + ln det K`.

use nalgebra::{Cholesky, DVector, Dyn};

use super::kernel::{cholesky_strict, correlation_matrix};
use super::{TrainingSet, THETA_LOWER, THETA_UPPER};
use crate::error::{check_dim, Error, Result};

/// Value returned for parameter vectors whose correlation matrix is
/// singular or whose data give a degenerate variance.
pub const DEFAULT_PENALTY: f64 = 1e10;

/// Concentrated negative log-likelihood at `theta` with the default penalty.
pub fn concentrated_neg_log_likelihood(training: &TrainingSet, theta: &[f64]) -> Result<f64> {
    NegLogLikelihood::new(training).value(theta)
}

pub(crate) struct LikelihoodParts {
    pub value: f64,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
    pub chol: Cholesky<f64, Dyn>,
    /// `K^-1 (y - 1 mu)`
    pub alpha: DVector<f64>,
}

#[derive(Clone, Copy)]
pub struct NegLogLikelihood<'a> {
    training: &'a TrainingSet,
    penalty: f64,
}

impl<'a> NegLogLikelihood<'a> {
    pub fn new(training: &'a TrainingSet) -> Self {
        Self {
            training,
            penalty: DEFAULT_PENALTY,
        }
    }

    pub fn with_penalty(mut self, penalty: f64) -> Self {
        self.penalty = penalty;
        self
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn value(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.training.dim(), theta.len())?;
        if let Some(t) = theta
            .iter()
            .find(|t| !(**t >= THETA_LOWER && **t <= THETA_UPPER))
        {
            return Err(Error::InvalidInput(format!(
                "theta component {t} outside [{THETA_LOWER:e}, {THETA_UPPER:e}]"
            )));
        }
        Ok(self.parts(theta).map_or(self.penalty, |p| p.value))
    }

    /// Everything the likelihood computes on the way, or `None` where the
    /// penalty applies.
    pub(crate) fn parts(&self, theta: &[f64]) -> Option<LikelihoodParts> {
        let y = DVector::from_column_slice(self.training.values());
        if self.training.value_range() == 0.0 {
            return None;
        }
        let m = y.len();
        let k = correlation_matrix(self.training.points(), theta);
        let chol = cholesky_strict(&k)?;
        let ones = DVector::from_element(m, 1.0);
        let k_inv_ones = chol.solve(&ones);
        let k_inv_y = chol.solve(&y);
        let mu_hat = k_inv_y.sum() / k_inv_ones.sum();
        let alpha = &k_inv_y - &k_inv_ones * mu_hat;
        let residual = y.add_scalar(-mu_hat);
        let sigma2_hat = residual.dot(&alpha) / m as f64;
        if !(sigma2_hat > 0.0) || !mu_hat.is_finite() {
            return None;
        }
        let log_det: f64 = 2.0
            * chol
                .l_dirty()
                .diagonal()
                .iter()
                .map(|d| d.ln())
                .sum::<f64>();
        let value = m as f64 * sigma2_hat.ln() + log_det;
        value.is_finite().then_some(LikelihoodParts {
            value,
            mu_hat,
            sigma2_hat,
            chol,
            alpha,
        })
    }

    /// Value and gradient with respect to `log10 theta`. Inside the penalty
    /// region the gradient is zero.
    pub(crate) fn value_and_log10_gradient(&self, log10_theta: &[f64]) -> (f64, Vec<f64>) {
        let n = log10_theta.len();
        let theta: Vec<f64> = log10_theta.iter().map(|l| 10f64.powf(*l)).collect();
        let Some(parts) = self.parts(&theta) else {
            return (self.penalty, vec![0.0; n]);
        };
        // d/dtheta_i = sum_jl W_jl dK_jl / dtheta_i with
        // W = K^-1 - alpha alpha' / sigma^2 and dK_jl/dtheta_i = -d_i^2 K_jl.
        let k_inv = parts.chol.inverse();
        let points = self.training.points();
        let m = points.len();
        let mut grad = vec![0.0; n];
        for j in 0..m {
            for l in (j + 1)..m {
                let (pj, pl) = (&points[j], &points[l]);
                let w = k_inv[(j, l)] - parts.alpha[j] * parts.alpha[l] / parts.sigma2_hat;
                // both triangles contribute
                let factor = -2.0 * w * super::kernel::correlation(pj, pl, &theta);
                for i in 0..n {
                    let d = pj[i] - pl[i];
                    grad[i] += factor * d * d;
                }
            }
        }
        let ln10 = std::f64::consts::LN_10;
        for (g, t) in grad.iter_mut().zip(&theta) {
            *g *= t * ln10;
        }
        (parts.value, grad)
    }

    /// Value at `log10 theta` without the bounds check.
    pub(crate) fn value_at_log10(&self, log10_theta: &[f64]) -> f64 {
        let theta: Vec<f64> = log10_theta.iter().map(|l| 10f64.powf(*l)).collect();
        self.parts(&theta).map_or(self.penalty, |p| p.value)
    }
}
