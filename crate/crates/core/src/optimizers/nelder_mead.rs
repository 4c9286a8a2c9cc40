//! Nelder-Mead simplex search with random restarts.
//!
//! Trial points are projected onto the box. When the simplex diameter
//! drops below the collapse threshold, the search restarts from a fresh
//! uniform point until the budget is spent.

use super::{check_objective, OptimizerConfig, Recorder, RunTrace};
use crate::error::Result;
use crate::objective::Objective;
use crate::rng::rng_from_seed;

pub fn run_nelder_mead<O: Objective + ?Sized>(
    objective: &O,
    config: &OptimizerConfig,
) -> Result<RunTrace> {
    check_objective(objective, config)?;
    let mut rng = rng_from_seed(config.seed);
    let mut rec = Recorder::new(objective, config);
    while !rec.exhausted() {
        let start = config.bounds.sample(&mut rng);
        if search(&mut rec, config, start).is_none() {
            break;
        }
    }
    Ok(rec.finish(config))
}

/// One simplex search. Returns `None` when the budget ran out, `Some(())`
/// when the simplex collapsed.
fn search<O: Objective + ?Sized>(
    rec: &mut Recorder<'_, O>,
    config: &OptimizerConfig,
    start: Vec<f64>,
) -> Option<()> {
    let p = &config.nelder_mead;
    let bounds = &config.bounds;
    let n = start.len();

    let mut simplex = Vec::with_capacity(n + 1);
    let f0 = rec.eval(&start)?;
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let step = p.initial_step * (bounds.upper[i] - bounds.lower[i]);
        let mut x = start.clone();
        // step away from the nearer wall so the vertex stays in the box
        x[i] = if start[i] + step <= bounds.upper[i] {
            start[i] + step
        } else {
            start[i] - step
        };
        let f = rec.eval(&x)?;
        simplex.push((x, f));
    }

    let point = |from: &[f64], towards: &[f64], coef: f64| -> Vec<f64> {
        let mut x: Vec<f64> = from
            .iter()
            .zip(towards)
            .map(|(c, t)| c + coef * (t - c))
            .collect();
        bounds.clamp(&mut x);
        x
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if diameter < p.collapse_diameter {
            return Some(());
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        // reflection: c + a (c - worst)
        let xr = point(&centroid, &worst, -p.reflection);
        let fr = rec.eval(&xr)?;
        if fr < f_best {
            let xe = point(&centroid, &xr, p.expansion);
            let fe = rec.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let accepted = if fr < f_worst {
            let xc = point(&centroid, &xr, p.contraction);
            let fc = rec.eval(&xc)?;
            (fc <= fr).then_some((xc, fc))
        } else {
            let xc = point(&centroid, &worst, p.contraction);
            let fc = rec.eval(&xc)?;
            (fc < f_worst).then_some((xc, fc))
        };
        match accepted {
            Some(v) => simplex[n] = v,
            None => {
                for vertex in simplex.iter_mut().skip(1) {
                    let x = point(&best, &vertex.0, p.shrink);
                    let f = rec.eval(&x)?;
                    *vertex = (x, f);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::optimizers::{Algorithm, Bounds};

    #[test]
    fn converges_on_convex_quadratic() {
        let f = FnObjective::new(2, |x: &[f64]| {
            (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 0.5 * (x[0] - 1.0) * (x[1] + 0.5)
        });
        let config =
            OptimizerConfig::new(Algorithm::Nm, Bounds::uniform(2, -5.0, 5.0), 4).with_budget(2000);
        let t = run_nelder_mead(&f, &config).unwrap();
        assert_eq!(t.len(), 2000);
        assert!(t.final_best() <= 1e-6, "{}", t.final_best());
    }

    #[test]
    fn budget_one_is_initial_point() {
        let f = FnObjective::new(2, |x: &[f64]| x[0] + 2.0 * x[1]);
        let config = OptimizerConfig::new(Algorithm::Nm, Bounds::uniform(2, -5.0, 5.0), 9)
            .with_budget(1)
            .keeping_points();
        let t = run_nelder_mead(&f, &config).unwrap();
        let p = &t.points.as_ref().unwrap()[0];
        assert_eq!(t.best_so_far, vec![p.x[0] + 2.0 * p.x[1]]);
    }

    #[test]
    fn restarts_keep_consuming_budget_on_flat_functions() {
        let f = FnObjective::new(3, |_: &[f64]| 1.0);
        let config =
            OptimizerConfig::new(Algorithm::Nm, Bounds::uniform(3, -5.0, 5.0), 1).with_budget(5000);
        let t = run_nelder_mead(&f, &config).unwrap();
        assert_eq!(t.best_so_far, vec![1.0; 5000]);
    }

    #[test]
    fn monotone_on_multimodal_function() {
        let f = FnObjective::new(2, |x: &[f64]| {
            x.iter()
                .map(|v| v * v - 10.0 * (std::f64::consts::TAU * v).cos())
                .sum::<f64>()
        });
        let config =
            OptimizerConfig::new(Algorithm::Nm, Bounds::uniform(2, -5.0, 5.0), 2).with_budget(3000);
        let t = run_nelder_mead(&f, &config).unwrap();
        assert!(t.best_so_far.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(t, run_nelder_mead(&f, &config).unwrap());
    }
}
