//! Reference optimizers with a uniform budgeted interface.
//!
//! Every run consumes exactly its evaluation budget and records the best
//! objective value seen after each evaluation. Runs are deterministic in
//! their seed.

mod de;
mod nelder_mead;
mod random_search;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpr::TrainingSet;
use crate::objective::Objective;
use crate::testbed::ProblemInstance;

pub use de::run_de;
pub use nelder_mead::run_nelder_mead;
pub use random_search::run_random_search;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "DE")]
    De,
    #[serde(rename = "NM")]
    Nm,
    #[serde(rename = "RS")]
    Rs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::De, Algorithm::Nm, Algorithm::Rs];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::De => "DE",
            Algorithm::Nm => "NM",
            Algorithm::Rs => "RS",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self { lower, upper };
        b.validate()?;
        Ok(b)
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
        }
    }

    pub fn of_instance(instance: &ProblemInstance) -> Self {
        Self {
            lower: instance.lower.clone(),
            upper: instance.upper.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::InvalidInput(
                "bounds must be non-empty and of equal length".into(),
            ));
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if !l.is_finite() || !u.is_finite() || l >= u {
                return Err(Error::InvalidInput(format!(
                    "invalid bound interval [{l}, {u}]"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| rng.random_range(*l..*u))
            .collect()
    }

    pub(crate) fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadParams {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Initial edge length as a fraction of the box width.
    pub initial_step: f64,
    /// Simplex diameter below which the search restarts.
    pub collapse_diameter: f64,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.1,
            collapse_diameter: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub budget: usize,
    pub population_size: usize,
    /// DE differential weight.
    pub de_f: f64,
    /// DE crossover probability.
    pub de_cr: f64,
    pub nelder_mead: NelderMeadParams,
    pub bounds: Bounds,
    pub seed: u64,
    /// Keep every evaluated point in the trace.
    pub keep_points: bool,
}

impl OptimizerConfig {
    /// Testing defaults: budget `1000 n`, DE population `10 n`,
    /// F = 0.8, CR = 0.5.
    pub fn new(algorithm: Algorithm, bounds: Bounds, seed: u64) -> Self {
        let n = bounds.dim();
        Self {
            algorithm,
            budget: 1000 * n,
            population_size: 10 * n,
            de_f: 0.8,
            de_cr: 0.5,
            nelder_mead: NelderMeadParams::default(),
            bounds,
            seed,
            keep_points: false,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_population(mut self, size: usize) -> Self {
        self.population_size = size;
        self
    }

    pub fn keeping_points(mut self) -> Self {
        self.keep_points = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if self.budget == 0 {
            return Err(Error::InvalidInput("budget must be positive".into()));
        }
        if self.algorithm == Algorithm::De {
            if self.population_size < 4 {
                return Err(Error::InvalidInput(
                    "DE needs a population of at least 4".into(),
                ));
            }
            if self.budget < self.population_size {
                return Err(Error::InvalidInput(format!(
                    "budget {} is smaller than the population {}",
                    self.budget, self.population_size
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedPoint {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Best-so-far values of one run, one entry per evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub instance: String,
    pub best_so_far: Vec<f64>,
    /// The first point the algorithm evaluated.
    #[serde(default)]
    pub first_point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<EvaluatedPoint>>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.best_so_far.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best_so_far.is_empty()
    }

    pub fn final_best(&self) -> f64 {
        self.best_so_far.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn with_instance(mut self, descriptor: impl Into<String>) -> Self {
        self.instance = descriptor.into();
        self
    }
}

/// Wraps an objective, enforces the budget and records the trace.
pub(crate) struct Recorder<'a, O: Objective + ?Sized> {
    objective: &'a O,
    budget: usize,
    best: f64,
    best_so_far: Vec<f64>,
    first_point: Vec<f64>,
    points: Option<Vec<EvaluatedPoint>>,
}

impl<'a, O: Objective + ?Sized> Recorder<'a, O> {
    pub(crate) fn new(objective: &'a O, config: &OptimizerConfig) -> Self {
        Self {
            objective,
            budget: config.budget,
            best: f64::INFINITY,
            best_so_far: Vec::with_capacity(config.budget),
            first_point: Vec::new(),
            points: config.keep_points.then(Vec::new),
        }
    }

    /// Evaluates `x`, or returns `None` once the budget is spent.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        let v = self.objective.value(x);
        if self.best_so_far.is_empty() {
            self.first_point = x.to_vec();
        }
        if v < self.best {
            self.best = v;
        }
        self.best_so_far.push(self.best);
        if let Some(points) = &mut self.points {
            points.push(EvaluatedPoint {
                x: x.to_vec(),
                value: v,
            });
        }
        Some(v)
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.best_so_far.len() >= self.budget
    }

    pub(crate) fn finish(self, config: &OptimizerConfig) -> RunTrace {
        RunTrace {
            algorithm: config.algorithm,
            seed: config.seed,
            instance: String::new(),
            best_so_far: self.best_so_far,
            first_point: self.first_point,
            points: self.points,
        }
    }
}

fn check_objective<O: Objective + ?Sized>(objective: &O, config: &OptimizerConfig) -> Result<()> {
    config.validate()?;
    crate::error::check_dim(config.bounds.dim(), objective.dim())
}

/// Runs the configured algorithm.
pub fn run<O: Objective + ?Sized>(objective: &O, config: &OptimizerConfig) -> Result<RunTrace> {
    match config.algorithm {
        Algorithm::De => run_de(objective, config),
        Algorithm::Nm => run_nelder_mead(objective, config),
        Algorithm::Rs => run_random_search(objective, config),
    }
}

/// Training data as produced by a short DE run: budget `50 n`, population
/// `20 n`, every evaluation recorded.
pub fn generate_training_data(instance: &ProblemInstance, seed: u64) -> Result<TrainingSet> {
    let n = instance.dim;
    generate_training_data_with(instance, 50 * n, 20 * n, seed)
}

pub fn generate_training_data_with(
    instance: &ProblemInstance,
    budget: usize,
    population: usize,
    seed: u64,
) -> Result<TrainingSet> {
    let config = OptimizerConfig::new(Algorithm::De, Bounds::of_instance(instance), seed)
        .with_budget(budget)
        .with_population(population)
        .keeping_points();
    let trace = run_de(instance, &config)?;
    let points = trace.points.unwrap_or_default();
    let (xs, ys) = points.into_iter().map(|p| (p.x, p.value)).unzip();
    TrainingSet::new(xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::testbed::{make_instance, FunctionId};

    #[test]
    fn training_data_sizes() {
        let inst = make_instance(FunctionId::Sphere, 2, 1).unwrap();
        let set = generate_training_data(&inst, 1).unwrap();
        assert_eq!(set.len(), 100);
        let inst5 = make_instance(FunctionId::Rastrigin, 5, 2).unwrap();
        let set5 = generate_training_data(&inst5, 2).unwrap();
        assert_eq!(set5.len(), 250);
        let bounds = Bounds::of_instance(&inst5);
        assert!(set5.points().iter().all(|p| bounds.contains(p)));
    }

    #[test]
    fn training_data_contains_run_best() {
        let inst = make_instance(FunctionId::Ellipsoid, 3, 1).unwrap();
        let set = generate_training_data(&inst, 11).unwrap();
        let config = OptimizerConfig::new(Algorithm::De, Bounds::of_instance(&inst), 11)
            .with_budget(150)
            .with_population(60);
        let trace = run_de(&inst, &config).unwrap();
        let min = set.values().iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, trace.final_best());
    }

    #[test]
    fn config_validation() {
        let b = Bounds::uniform(2, -1.0, 1.0);
        assert!(OptimizerConfig::new(Algorithm::De, b.clone(), 0)
            .with_budget(5)
            .validate()
            .is_err());
        assert!(OptimizerConfig::new(Algorithm::Rs, b.clone(), 0)
            .with_budget(0)
            .validate()
            .is_err());
        assert!(Bounds::new(vec![0.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0], vec![f64::INFINITY]).is_err());
        let f = FnObjective::new(3, |x: &[f64]| x[0]);
        assert!(run(&f, &OptimizerConfig::new(Algorithm::Rs, b, 0)).is_err());
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
    }
}
