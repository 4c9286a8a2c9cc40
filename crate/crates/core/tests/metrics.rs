use proptest::prelude::*;

use simbench::metrics::{
    aggregate, performance_error, quantile_sorted, scale_performance, CurveKey, ErrorCurve, Source,
};
use simbench::optimizers::{run, Algorithm, Bounds, OptimizerConfig};
use simbench::testbed::{make_instance, FunctionId};
use simbench::RunTrace;

fn trace(values: Vec<f64>) -> RunTrace {
    RunTrace {
        algorithm: Algorithm::Rs,
        seed: 0,
        instance: String::new(),
        best_so_far: values,
        first_point: Vec::new(),
        points: None,
    }
}

fn key() -> CurveKey {
    CurveKey {
        function: FunctionId::Rastrigin,
        dimension: 5,
        algorithm: Algorithm::De,
        source: Source::Simulation,
    }
}

/// Trace from 1 down to 0 whose value at evaluation 200 (index 199) is
/// `at_200`, so scaling leaves it unchanged.
fn worked_example_trace(at_200: f64) -> RunTrace {
    let v = (0..400)
        .map(|i| match i {
            0..199 => 1.0 - (1.0 - at_200) * i as f64 / 199.0,
            199 => at_200,
            _ => at_200 * (399 - i) as f64 / 200.0,
        })
        .collect();
    trace(v)
}

#[test]
fn worked_example_error_at_evaluation_200() {
    let truth = worked_example_trace(0.25);
    let model = worked_example_trace(0.34);
    assert_eq!(scale_performance(&truth).unwrap()[199], 0.25);
    assert_eq!(scale_performance(&model).unwrap()[199], 0.34);
    let err = performance_error(&model, &truth).unwrap();
    assert!((err[199] - 0.09).abs() < 1e-15);
}

#[test]
fn median_of_fifteen_constant_curves_is_the_eighth() {
    let curves: Vec<ErrorCurve> = (1..=15)
        .rev()
        .map(|v| ErrorCurve {
            key: key(),
            instance: v,
            errors: vec![v as f64 / 15.0; 10],
        })
        .collect();
    let agg = aggregate(&curves).unwrap();
    // order-statistics oracle: sort, take the middle element
    let mut values: Vec<f64> = (1..=15).map(|v| v as f64 / 15.0).collect();
    values.sort_by(f64::total_cmp);
    assert!(agg.median.iter().all(|m| *m == values[7]));
    assert!(agg.q1.iter().all(|m| *m == quantile_sorted(&values, 0.25)));
}

#[test]
fn error_curves_of_real_runs_are_bounded() {
    let inst = make_instance(FunctionId::Rastrigin, 2, 1).unwrap();
    let other = make_instance(FunctionId::Sphere, 2, 1).unwrap();
    let config =
        OptimizerConfig::new(Algorithm::De, Bounds::of_instance(&inst), 4).with_budget(500);
    let a = run(&inst, &config).unwrap();
    let b = run(&other, &config).unwrap();
    let err = performance_error(&a, &b).unwrap();
    assert!(err.iter().all(|e| (0.0..=1.0).contains(e)));
}

fn monotone(len: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(0.0f64..1.0, len), -1e3f64..1e3).prop_map(|(steps, start)| {
        let mut v = Vec::with_capacity(steps.len());
        let mut cur = start;
        for s in steps {
            cur -= s * s * 10.0;
            v.push(cur);
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn errors_are_affine_invariant(
        (a, b) in (5usize..200).prop_flat_map(|n| (monotone(n), monotone(n))),
        scale in 1e-3f64..1e3,
        offset in -1e4f64..1e4,
    ) {
        let base = performance_error(&trace(a.clone()), &trace(b.clone())).unwrap();
        let t = |v: &[f64]| trace(v.iter().map(|x| scale * x + offset).collect());
        let moved = performance_error(&t(&a), &t(&b)).unwrap();
        for (x, y) in base.iter().zip(&moved) {
            prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
        }
        prop_assert!(base.iter().all(|e| (0.0..=1.0).contains(e)));
        let s = scale_performance(&trace(a)).unwrap();
        prop_assert!(s.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn aggregation_keeps_bounds_and_quartile_order(
        curves in (1usize..20, 1usize..30).prop_flat_map(|(k, len)| {
            prop::collection::vec(prop::collection::vec(0.0f64..=1.0, len), k)
        })
    ) {
        let curves: Vec<ErrorCurve> = curves
            .into_iter()
            .enumerate()
            .map(|(i, errors)| ErrorCurve { key: key(), instance: i + 1, errors })
            .collect();
        let agg = aggregate(&curves).unwrap();
        for t in 0..agg.median.len() {
            prop_assert!(0.0 <= agg.q1[t] && agg.q1[t] <= agg.median[t]);
            prop_assert!(agg.median[t] <= agg.q3[t] && agg.q3[t] <= 1.0);
        }
    }
}
