//! The Gaussian (squared-exponential) correlation kernel and the dense
//! linear algebra built on it.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};

/// First jitter tried when a Cholesky factorization fails, relative to the
/// mean of the diagonal.
pub const JITTER_START: f64 = 1e-10;
/// Largest relative jitter before giving up.
pub const JITTER_MAX: f64 = 1e-4;

/// Smallest accepted squared Cholesky pivot, relative to the mean diagonal.
///
/// A pivot below this means a point is predicted by the others to nearly
/// full precision and the matrix is singular for practical purposes, even if
/// the factorization technically succeeds.
pub const PIVOT_FLOOR: f64 = 1e-13;

/// Correlation between `x` and `x2`: `exp(-sum_i theta_i (x_i - x2_i)^2)`.
pub fn kernel_eval(x: &[f64], x2: &[f64], theta: &[f64]) -> Result<f64> {
    check_dim(theta.len(), x.len())?;
    check_dim(theta.len(), x2.len())?;
    if let Some(t) = theta.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "kernel parameters must be positive, got {t}"
        )));
    }
    Ok(correlation(x, x2, theta))
}

#[inline]
pub(crate) fn correlation(x: &[f64], x2: &[f64], theta: &[f64]) -> f64 {
    let mut s = 0.0;
    for ((a, b), t) in x.iter().zip(x2).zip(theta) {
        let d = a - b;
        s += t * d * d;
    }
    (-s).exp()
}

/// Accumulates a sum of products with error-free transformations, giving
/// roughly twice the working precision. Near-flat correlation matrices make
/// the interpolation weights large and of alternating sign; a plain sum then
/// loses the cancellation that reproduces the training values.
#[derive(Clone, Copy, Default)]
pub(crate) struct Dot2 {
    sum: f64,
    err: f64,
}

impl Dot2 {
    pub(crate) fn new(start: f64) -> Self {
        Self {
            sum: start,
            err: 0.0,
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        let z = t - self.sum;
        self.err += (self.sum - (t - z)) + (v - z);
        self.sum = t;
    }

    #[inline]
    pub(crate) fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.err += a.mul_add(b, -p);
        self.add(p);
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.err
    }
}

/// The m x m correlation matrix of `points`. Exactly symmetric with a unit
/// diagonal.
pub fn build_correlation_matrix(points: &[Vec<f64>], theta: &[f64]) -> Result<DMatrix<f64>> {
    if points.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 points for a correlation matrix, got {}",
            points.len()
        )));
    }
    for p in points {
        check_dim(theta.len(), p.len())?;
    }
    Ok(correlation_matrix(points, theta))
}

pub(crate) fn correlation_matrix(points: &[Vec<f64>], theta: &[f64]) -> DMatrix<f64> {
    let m = points.len();
    let mut k = DMatrix::<f64>::identity(m, m);
    for j in 0..m {
        for l in (j + 1)..m {
            let c = correlation(&points[j], &points[l], theta);
            k[(j, l)] = c;
            k[(l, j)] = c;
        }
    }
    k
}

/// Cholesky factorization that rejects numerically singular matrices.
pub(crate) fn cholesky_strict(matrix: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let mean_diag = matrix.diagonal().mean();
    let chol = Cholesky::new(matrix.clone())?;
    let l = chol.l_dirty();
    let floor = PIVOT_FLOOR * mean_diag;
    (0..matrix.nrows())
        .all(|i| l[(i, i)] * l[(i, i)] > floor)
        .then_some(chol)
}

/// A Cholesky factor together with the diagonal jitter it needed.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub chol: Cholesky<f64, Dyn>,
    /// Absolute value added to the diagonal; zero when none was needed.
    pub jitter: f64,
}

/// Factorizes a covariance-like matrix, escalating diagonal jitter from
/// `JITTER_START` to `JITTER_MAX` (relative to the mean diagonal) by factors
/// of ten. On failure the error names the most correlated pair of points.
pub fn factorize(matrix: &DMatrix<f64>) -> Result<Factorization> {
    if let Some(chol) = cholesky_strict(matrix) {
        return Ok(Factorization { chol, jitter: 0.0 });
    }
    let mean_diag = matrix.diagonal().mean();
    let mut rel = JITTER_START;
    while rel <= JITTER_MAX * (1.0 + 1e-9) {
        let jitter = rel * mean_diag;
        let mut jittered = matrix.clone();
        for i in 0..jittered.nrows() {
            jittered[(i, i)] += jitter;
        }
        if let Some(chol) = cholesky_strict(&jittered) {
            log::debug!("cholesky needed relative jitter {rel:e}");
            return Ok(Factorization { chol, jitter });
        }
        rel *= 10.0;
    }
    let (first, second) = most_correlated_pair(matrix);
    Err(Error::SingularMatrix { first, second })
}

fn most_correlated_pair(matrix: &DMatrix<f64>) -> (usize, usize) {
    let m = matrix.nrows();
    let mut best = (0, 1.min(m.saturating_sub(1)), f64::NEG_INFINITY);
    for j in 0..m {
        for l in (j + 1)..m {
            let scale = (matrix[(j, j)] * matrix[(l, l)]).sqrt();
            let c = matrix[(j, l)] / scale;
            if c > best.2 {
                best = (j, l, c);
            }
        }
    }
    (best.0, best.1)
}

/// Solves `matrix * x = rhs` with a (possibly jittered) factor of `matrix`,
/// followed by a few steps of iterative refinement against the exact
/// matrix.
pub(crate) fn solve_refined(
    matrix: &DMatrix<f64>,
    chol: &Cholesky<f64, Dyn>,
    rhs: &DVector<f64>,
) -> DVector<f64> {
    let mut x = chol.solve(rhs);
    let mut residual = residual(matrix, &x, rhs);
    let mut norm = residual.norm();
    for _ in 0..REFINEMENT_STEPS {
        if norm == 0.0 {
            break;
        }
        let candidate = &x + chol.solve(&residual);
        let next = self::residual(matrix, &candidate, rhs);
        let next_norm = next.norm();
        if !(next_norm < norm) {
            break;
        }
        x = candidate;
        residual = next;
        norm = next_norm;
    }
    x
}

const REFINEMENT_STEPS: usize = 10;

/// `rhs - matrix * x` with compensated row sums.
fn residual(matrix: &DMatrix<f64>, x: &DVector<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(rhs.len(), |i, _| {
        let mut acc = Dot2::new(rhs[i]);
        for (j, xj) in x.iter().enumerate() {
            acc.add_product(-matrix[(i, j)], *xj);
        }
        acc.value()
    })
}
