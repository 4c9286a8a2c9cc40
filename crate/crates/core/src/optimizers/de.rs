//! DE/rand/1/bin with synchronous generations.

use rand::Rng;

use super::{check_objective, OptimizerConfig, Recorder, RunTrace};
use crate::error::Result;
use crate::objective::Objective;
use crate::rng::rng_from_seed;

/// Mutants `x_r1 + F (x_r2 - x_r3)` with binomial crossover and greedy
/// replacement. Mutant components outside the box are redrawn uniformly in
/// their interval. The run stops at the budget, mid-generation if needed.
pub fn run_de<O: Objective + ?Sized>(objective: &O, config: &OptimizerConfig) -> Result<RunTrace> {
    check_objective(objective, config)?;
    let bounds = &config.bounds;
    let n = bounds.dim();
    let np = config.population_size;
    let mut rng = rng_from_seed(config.seed);
    let mut rec = Recorder::new(objective, config);

    let mut population: Vec<Vec<f64>> = (0..np).map(|_| bounds.sample(&mut rng)).collect();
    let mut fitness = Vec::with_capacity(np);
    for x in &population {
        match rec.eval(x) {
            Some(v) => fitness.push(v),
            None => return Ok(rec.finish(config)),
        }
    }

    let mut trial = vec![0.0; n];
    while !rec.exhausted() {
        let mut next = population.clone();
        let mut next_fitness = fitness.clone();
        for i in 0..np {
            let [r1, r2, r3] = distinct_others(&mut rng, np, i);
            let j_rand = rng.random_range(0..n);
            for j in 0..n {
                if j == j_rand || rng.random::<f64>() < config.de_cr {
                    let mut v =
                        population[r1][j] + config.de_f * (population[r2][j] - population[r3][j]);
                    if !(v >= bounds.lower[j] && v <= bounds.upper[j]) {
                        v = rng.random_range(bounds.lower[j]..bounds.upper[j]);
                    }
                    trial[j] = v;
                } else {
                    trial[j] = population[i][j];
                }
            }
            let Some(f) = rec.eval(&trial) else {
                return Ok(rec.finish(config));
            };
            if f <= fitness[i] {
                next[i].copy_from_slice(&trial);
                next_fitness[i] = f;
            }
        }
        population = next;
        fitness = next_fitness;
    }
    Ok(rec.finish(config))
}

fn distinct_others(rng: &mut impl Rng, np: usize, exclude: usize) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let c = rng.random_range(0..np);
        if c != exclude && !picked[..k].contains(&c) {
            picked[k] = c;
            k += 1;
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::optimizers::{Algorithm, Bounds};

    fn sphere() -> FnObjective<impl Fn(&[f64]) -> f64 + Send + Sync> {
        FnObjective::new(2, |x: &[f64]| x.iter().map(|v| v * v).sum())
    }

    #[test]
    fn converges_on_sphere() {
        let config =
            OptimizerConfig::new(Algorithm::De, Bounds::uniform(2, -5.0, 5.0), 3).with_budget(2000);
        let trace = run_de(&sphere(), &config).unwrap();
        assert_eq!(trace.len(), 2000);
        assert!(trace.final_best() <= 1e-3, "{}", trace.final_best());
    }

    #[test]
    fn budget_equal_to_population_is_initial_running_minimum() {
        let config = OptimizerConfig::new(Algorithm::De, Bounds::uniform(2, -5.0, 5.0), 8)
            .with_budget(20)
            .with_population(20)
            .keeping_points();
        let trace = run_de(&sphere(), &config).unwrap();
        let mut best = f64::INFINITY;
        let expected: Vec<f64> = trace
            .points
            .as_ref()
            .unwrap()
            .iter()
            .map(|p| {
                best = best.min(p.value);
                best
            })
            .collect();
        assert_eq!(trace.best_so_far, expected);
    }

    #[test]
    fn same_seed_same_trace_and_points_stay_in_box() {
        let config = OptimizerConfig::new(Algorithm::De, Bounds::uniform(2, -1.0, 2.0), 5)
            .with_budget(333)
            .keeping_points();
        let a = run_de(&sphere(), &config).unwrap();
        let b = run_de(&sphere(), &config).unwrap();
        assert_eq!(a, b);
        assert!(a
            .points
            .unwrap()
            .iter()
            .all(|p| config.bounds.contains(&p.x)));
    }
}
