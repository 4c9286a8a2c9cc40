use proptest::prelude::*;

use simbench::objective::FnObjective;
use simbench::optimizers::{generate_training_data, run, Algorithm, Bounds, OptimizerConfig};
use simbench::testbed::{make_instance, FunctionId};

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::De),
        Just(Algorithm::Nm),
        Just(Algorithm::Rs)
    ]
}

fn function() -> impl Strategy<Value = FunctionId> {
    prop_oneof![
        Just(FunctionId::Sphere),
        Just(FunctionId::Ellipsoid),
        Just(FunctionId::Rosenbrock),
        Just(FunctionId::Rastrigin),
        Just(FunctionId::Schwefel),
        Just(FunctionId::Schaffer),
        Just(FunctionId::StepEllipsoid),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traces_are_exact_monotone_and_reproducible(
        alg in algorithm(),
        f in function(),
        n in 2usize..6,
        budget in 40usize..600,
        seed in any::<u64>(),
    ) {
        let inst = make_instance(f, n, 1 + (seed % 5) as usize).unwrap();
        let config = OptimizerConfig::new(alg, Bounds::of_instance(&inst), seed)
            .with_budget(budget)
            .with_population(4 * n)
            .keeping_points();
        let a = run(&inst, &config).unwrap();
        prop_assert_eq!(a.len(), budget);
        prop_assert!(a.best_so_far.windows(2).all(|w| w[1] <= w[0]));
        let points = a.points.as_ref().unwrap();
        prop_assert_eq!(points.len(), budget);
        prop_assert!(points.iter().all(|p| config.bounds.contains(&p.x)));
        prop_assert_eq!(&a.first_point, &points[0].x);
        let b = run(&inst, &config).unwrap();
        prop_assert_eq!(a.best_so_far, b.best_so_far);
    }
}

#[test]
fn de_solves_sphere_with_a_grid_checked_basin() {
    let sphere = FnObjective::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1]);
    // grid oracle: the only grid cell below 1e-3 is the one at the origin
    let step = 0.01;
    let below: Vec<(f64, f64)> = (-500..=500)
        .flat_map(|i| (-500..=500).map(move |j| (i as f64 * step, j as f64 * step)))
        .filter(|(a, b)| a * a + b * b <= 1e-3)
        .collect();
    assert!(below.iter().all(|(a, b)| a.abs() < 0.04 && b.abs() < 0.04));

    for seed in [1, 2, 3] {
        let config = OptimizerConfig::new(Algorithm::De, Bounds::uniform(2, -5.0, 5.0), seed)
            .with_budget(2000);
        let trace = run(&sphere, &config).unwrap();
        assert!(
            trace.final_best() <= 1e-3,
            "seed {seed}: {}",
            trace.final_best()
        );
    }
}

#[test]
fn generated_training_data_uses_default_budgets() {
    for (f, n) in [(FunctionId::Sphere, 2), (FunctionId::Schaffer, 5)] {
        let inst = make_instance(f, n, 2).unwrap();
        let set = generate_training_data(&inst, 3).unwrap();
        assert_eq!(set.len(), 50 * n);
        let bounds = Bounds::of_instance(&inst);
        assert!(set.points().iter().all(|p| bounds.contains(p)));
    }
}
