//! Ground-truth test functions with randomized instances.
//!
//! Eight functions covering the landscape categories that matter for
//! surrogate fidelity: separable and rotated unimodal bowls, a narrow
//! valley, regular multimodality, boundary-driven non-stationarity,
//! fine-grained local ruggedness, plateaus with discontinuities, and a 1-D
//! illustration function. Instances apply a shift `x_opt`, an orthogonal
//! rotation and a value offset `f_opt`, all derived deterministically from
//! `(function, dimension, instance index)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::objective::Objective;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionId {
    Sphere,
    Ellipsoid,
    Rosenbrock,
    Rastrigin,
    Schwefel,
    Schaffer,
    StepEllipsoid,
    Illustration1d,
}

impl FunctionId {
    pub const ALL: [FunctionId; 8] = [
        FunctionId::Sphere,
        FunctionId::Ellipsoid,
        FunctionId::Rosenbrock,
        FunctionId::Rastrigin,
        FunctionId::Schwefel,
        FunctionId::Schaffer,
        FunctionId::StepEllipsoid,
        FunctionId::Illustration1d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionId::Sphere => "sphere",
            FunctionId::Ellipsoid => "ellipsoid",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::Schwefel => "schwefel",
            FunctionId::Schaffer => "schaffer",
            FunctionId::StepEllipsoid => "step-ellipsoid",
            FunctionId::Illustration1d => "illustration1d",
        }
    }

    pub fn modality(self) -> Modality {
        match self {
            FunctionId::Sphere
            | FunctionId::Ellipsoid
            | FunctionId::Rosenbrock
            | FunctionId::StepEllipsoid => Modality::Unimodal,
            FunctionId::Rastrigin
            | FunctionId::Schwefel
            | FunctionId::Schaffer
            | FunctionId::Illustration1d => Modality::Multimodal,
        }
    }

    pub fn supports_dim(self, n: usize) -> bool {
        match self {
            FunctionId::Illustration1d => n == 1,
            FunctionId::Rosenbrock | FunctionId::Schaffer => n >= 2,
            _ => n >= 1,
        }
    }

    fn rotated(self) -> bool {
        matches!(
            self,
            FunctionId::Ellipsoid | FunctionId::Schaffer | FunctionId::StepEllipsoid
        )
    }

    fn description(self) -> &'static str {
        match self {
            FunctionId::Sphere => "separable quadratic bowl",
            FunctionId::Ellipsoid => "rotated ellipsoid, condition 1e6",
            FunctionId::Rosenbrock => "narrow curved valley",
            FunctionId::Rastrigin => "regular cosine multimodality",
            FunctionId::Schwefel => "schwefel sine landscape with boundary penalty",
            FunctionId::Schaffer => "schaffer F7, fine-grained local structure",
            FunctionId::StepEllipsoid => "rotated step ellipsoid with plateaus",
            FunctionId::Illustration1d => "sin(33x) + sin(49x - 0.5) + x on [0, 1]",
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Unimodal,
    Multimodal,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Unimodal => "unimodal",
            Modality::Multimodal => "multimodal",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionInfo {
    pub id: FunctionId,
    pub modality: Modality,
    pub min_dim: usize,
    pub max_dim: Option<usize>,
    pub description: &'static str,
}

pub fn catalog() -> Vec<FunctionInfo> {
    FunctionId::ALL
        .into_iter()
        .map(|id| {
            let (min_dim, max_dim) = match id {
                FunctionId::Illustration1d => (1, Some(1)),
                FunctionId::Rosenbrock | FunctionId::Schaffer => (2, None),
                _ => (1, None),
            };
            FunctionInfo {
                id,
                modality: id.modality(),
                min_dim,
                max_dim,
                description: id.description(),
            }
        })
        .collect()
}

pub const DEFAULT_BOX: (f64, f64) = (-5.0, 5.0);
pub const DEFAULT_INSTANCES: usize = 15;

/// One randomized instance of a test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub function: FunctionId,
    pub dim: usize,
    pub index: usize,
    pub x_opt: Vec<f64>,
    pub f_opt: f64,
    /// Orthogonal matrix, row-major.
    pub rotation: Vec<Vec<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Builds instance `index` (1-based) of `function` in dimension `n`.
pub fn make_instance(function: FunctionId, n: usize, index: usize) -> Result<ProblemInstance> {
    if !function.supports_dim(n) {
        return Err(Error::InvalidInput(format!(
            "{function} does not support dimension {n}"
        )));
    }
    if index == 0 {
        return Err(Error::InvalidInput("instance indices start at 1".into()));
    }
    let seed = derive_seed(
        0,
        &[
            "testbed",
            function.as_str(),
            &n.to_string(),
            &index.to_string(),
        ],
    );
    let mut rng = rng_from_seed(seed);

    if function == FunctionId::Illustration1d {
        let (x, f) = *illustration_optimum();
        return Ok(ProblemInstance {
            function,
            dim: 1,
            index,
            x_opt: vec![x],
            f_opt: f,
            rotation: vec![vec![1.0]],
            lower: vec![0.0],
            upper: vec![1.0],
        });
    }

    let x_opt: Vec<f64> = match function {
        FunctionId::Schwefel => {
            let at = schwefel_argmin() / 100.0;
            (0..n)
                .map(|_| if rng.random::<bool>() { at } else { -at })
                .collect()
        }
        _ => (0..n).map(|_| rng.random_range(-4.0..4.0)).collect(),
    };
    let f_opt = rng.random_range(-100.0..100.0);
    let rotation = if function.rotated() {
        random_rotation(&mut rng, n)
    } else {
        identity(n)
    };
    Ok(ProblemInstance {
        function,
        dim: n,
        index,
        x_opt,
        f_opt,
        rotation,
        lower: vec![DEFAULT_BOX.0; n],
        upper: vec![DEFAULT_BOX.1; n],
    })
}

impl ProblemInstance {
    /// Instance with no shift, rotation or offset. Useful for checking the
    /// raw formulas.
    pub fn identity(function: FunctionId, n: usize) -> Result<Self> {
        let mut inst = make_instance(function, n, 1)?;
        if function != FunctionId::Illustration1d {
            inst.x_opt = vec![0.0; n];
            inst.f_opt = 0.0;
            inst.rotation = identity(n);
        }
        Ok(inst)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value(x))
    }

    pub fn modality(&self) -> Modality {
        self.function.modality()
    }

    pub fn descriptor(&self) -> String {
        format!("{}/n{}/i{}", self.function, self.dim, self.index)
    }

    fn transformed(&self, x: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = x.iter().zip(&self.x_opt).map(|(a, b)| a - b).collect();
        self.rotation
            .iter()
            .map(|row| row.iter().zip(&shifted).map(|(r, s)| r * s).sum())
            .collect()
    }
}

impl Objective for ProblemInstance {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let raw = match self.function {
            FunctionId::Sphere => self.transformed(x).iter().map(|z| z * z).sum(),
            FunctionId::Ellipsoid => {
                let z = self.transformed(x);
                z.iter()
                    .enumerate()
                    .map(|(i, zi)| 10f64.powf(6.0 * ratio(i, n)) * zi * zi)
                    .sum()
            }
            FunctionId::Rosenbrock => {
                let c = 1f64.max((n as f64).sqrt() / 8.0);
                let w: Vec<f64> = self.transformed(x).iter().map(|z| c * z + 1.0).collect();
                w.windows(2)
                    .map(|p| 100.0 * (p[0] * p[0] - p[1]).powi(2) + (p[0] - 1.0).powi(2))
                    .sum()
            }
            FunctionId::Rastrigin => {
                let z = self.transformed(x);
                10.0 * (n as f64 - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
                    + z.iter().map(|v| v * v).sum::<f64>()
            }
            FunctionId::Schwefel => {
                let best = schwefel_term(schwefel_argmin());
                let s: f64 = x
                    .iter()
                    .zip(&self.x_opt)
                    .map(|(xi, xo)| {
                        let u = (100.0 * xo.signum() * xi).clamp(-500.0, 500.0);
                        schwefel_term(u) - best
                    })
                    .sum();
                s / (100.0 * n as f64) + 100.0 * box_penalty(x)
            }
            FunctionId::Schaffer => {
                let z: Vec<f64> = self
                    .transformed(x)
                    .iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(0.5 * ratio(i, n)) * v)
                    .collect();
                let mean: f64 = z
                    .windows(2)
                    .map(|p| {
                        let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
                        s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2)
                    })
                    .sum::<f64>()
                    / (n - 1) as f64;
                mean * mean + 10.0 * box_penalty(x)
            }
            FunctionId::StepEllipsoid => {
                let z_hat: Vec<f64> = self
                    .transformed(x)
                    .iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(0.5 * ratio(i, n)) * v)
                    .collect();
                let stepped = z_hat.iter().enumerate().map(|(i, v)| {
                    let r = if v.abs() > 0.5 {
                        (0.5 + v).floor()
                    } else {
                        (0.5 + 10.0 * v).floor() / 10.0
                    };
                    10f64.powf(2.0 * ratio(i, n)) * r * r
                });
                0.1 * (z_hat[0].abs() / 1e4).max(stepped.sum()) + box_penalty(x)
            }
            FunctionId::Illustration1d => return illustration(x[0]),
        };
        raw + self.f_opt
    }
}

/// `i / (n - 1)`, zero in one dimension.
fn ratio(i: usize, n: usize) -> f64 {
    if n > 1 {
        i as f64 / (n - 1) as f64
    } else {
        0.0
    }
}

fn box_penalty(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| (v.abs() - DEFAULT_BOX.1).max(0.0).powi(2))
        .sum()
}

fn schwefel_term(u: f64) -> f64 {
    -u * u.abs().sqrt().sin()
}

/// Minimizer of `-u sin(sqrt|u|)` on [-500, 500], refined by Newton steps.
fn schwefel_argmin() -> f64 {
    static ARGMIN: OnceLock<f64> = OnceLock::new();
    *ARGMIN.get_or_init(|| {
        let mut u: f64 = 420.968_746;
        for _ in 0..20 {
            let r = u.sqrt();
            // g'(u) and g''(u) of g(u) = -u sin(sqrt u)
            let d1 = -r.sin() - 0.5 * r * r.cos();
            let d2 = -0.75 * r.cos() / r + 0.25 * r.sin();
            u -= d1 / d2;
        }
        u
    })
}

/// The eleven training inputs of the one-dimensional illustration: one
/// isolated sample and a dense cluster near the right edge.
pub const ILLUSTRATION_SAMPLES: [f64; 11] = [
    0.13, 0.6, 0.62, 0.67, 0.75, 0.79, 0.8, 0.86, 0.9, 0.95, 0.98,
];

pub fn illustration(x: f64) -> f64 {
    (33.0 * x).sin() + (49.0 * x - 0.5).sin() + x
}

/// Global minimum of the illustration function on [0, 1]: dense grid, then
/// golden-section refinement.
fn illustration_optimum() -> &'static (f64, f64) {
    static OPT: OnceLock<(f64, f64)> = OnceLock::new();
    OPT.get_or_init(|| {
        let steps = 100_000;
        let best = (0..=steps)
            .map(|i| i as f64 / steps as f64)
            .min_by(|a, b| illustration(*a).total_cmp(&illustration(*b)))
            .unwrap_or(0.0);
        let (mut a, mut b) = ((best - 1e-5).max(0.0), (best + 1e-5).min(1.0));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - golden * (b - a);
            let d = a + golden * (b - a);
            if illustration(c) < illustration(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let x = 0.5 * (a + b);
        (x, illustration(x))
    })
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
fn random_rotation(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    (0..n).map(|i| q.row(i).iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_instance_examples() {
        let sphere = ProblemInstance::identity(FunctionId::Sphere, 3).unwrap();
        assert_eq!(sphere.evaluate(&[0.0; 3]).unwrap(), 0.0);
        let rastrigin = ProblemInstance::identity(FunctionId::Rastrigin, 4).unwrap();
        assert!(rastrigin.evaluate(&[0.0; 4]).unwrap().abs() < 1e-12);
        assert!((rastrigin.evaluate(&[1.0; 4]).unwrap() - 4.0).abs() < 1e-12);
        assert!((illustration(0.0) - -0.479_425_538_604_203).abs() < 1e-12);
        let ill = make_instance(FunctionId::Illustration1d, 1, 3).unwrap();
        assert_eq!(ill.evaluate(&[0.0]).unwrap(), illustration(0.0));
    }

    #[test]
    fn dimension_and_catalog_errors() {
        let sphere = make_instance(FunctionId::Sphere, 2, 1).unwrap();
        assert!(matches!(
            sphere.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            "nope".parse::<FunctionId>(),
            Err(Error::UnknownFunction(_))
        ));
        assert!(make_instance(FunctionId::Illustration1d, 2, 1).is_err());
        assert!(make_instance(FunctionId::Rosenbrock, 1, 1).is_err());
        assert!(make_instance(FunctionId::Sphere, 2, 0).is_err());
    }

    #[test]
    fn ids_round_trip_through_strings() {
        for id in FunctionId::ALL {
            assert_eq!(id.as_str().parse::<FunctionId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{id}\""));
        }
        assert_eq!(catalog().len(), 8);
    }

    #[test]
    fn instances_are_deterministic_and_distinct() {
        let a = make_instance(FunctionId::Sphere, 3, 1).unwrap();
        let b = make_instance(FunctionId::Sphere, 3, 1).unwrap();
        let c = make_instance(FunctionId::Sphere, 3, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.x_opt, c.x_opt);
    }

    #[test]
    fn optimum_value_holds_for_every_function() {
        for id in FunctionId::ALL {
            for n in [1, 2, 5] {
                if !id.supports_dim(n) {
                    continue;
                }
                let inst = make_instance(id, n, 4).unwrap();
                let f = inst.evaluate(&inst.x_opt).unwrap();
                assert!(
                    (f - inst.f_opt).abs() < 1e-9,
                    "{id} n={n}: {f} vs {}",
                    inst.f_opt
                );
                assert!(inst.x_opt.iter().zip(&inst.lower).all(|(x, l)| x > l));
                assert!(inst.x_opt.iter().zip(&inst.upper).all(|(x, u)| x < u));
            }
        }
    }

    #[test]
    fn schwefel_argmin_is_stationary() {
        let u = schwefel_argmin();
        assert!((u - 420.9687).abs() < 1e-3);
        let h = 1e-3;
        assert!(schwefel_term(u) <= schwefel_term(u + h));
        assert!(schwefel_term(u) <= schwefel_term(u - h));
    }
}
