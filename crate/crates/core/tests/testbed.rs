use rand::Rng;

use simbench::rng::{content_hash, rng_from_seed};
use simbench::testbed::{catalog, make_instance, FunctionId, Modality};
use simbench::Objective;

fn supported_dims(f: FunctionId) -> Vec<usize> {
    [1, 2, 5]
        .into_iter()
        .filter(|n| f.supports_dim(*n))
        .collect()
}

#[test]
fn no_random_sample_beats_the_optimum() {
    for f in FunctionId::ALL {
        for n in supported_dims(f) {
            for index in [1, 7] {
                let inst = make_instance(f, n, index).unwrap();
                let mut rng = rng_from_seed(index as u64);
                for _ in 0..100_000 {
                    let x: Vec<f64> = inst
                        .lower
                        .iter()
                        .zip(&inst.upper)
                        .map(|(l, u)| rng.random_range(*l..*u))
                        .collect();
                    let v = inst.value(&x);
                    assert!(
                        v >= inst.f_opt - 1e-9,
                        "{} at {x:?}: {v} < {}",
                        inst.descriptor(),
                        inst.f_opt
                    );
                    if f.modality() == Modality::Unimodal
                        && f != FunctionId::StepEllipsoid
                        && v - inst.f_opt <= 1e-9
                    {
                        let dist: f64 = x
                            .iter()
                            .zip(&inst.x_opt)
                            .map(|(a, b)| (a - b).powi(2))
                            .sum();
                        assert!(dist.sqrt() < 1e-3);
                    }
                }
            }
        }
    }
}

#[test]
fn rotations_are_orthogonal() {
    for f in FunctionId::ALL {
        for n in [2, 3, 5, 10, 20] {
            if !f.supports_dim(n) {
                continue;
            }
            for index in 1..=15 {
                let r = make_instance(f, n, index).unwrap().rotation;
                for i in 0..n {
                    for j in 0..n {
                        let dot: f64 = (0..n).map(|k| r[k][i] * r[k][j]).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((dot - want).abs() <= 1e-10, "{f} n={n} i={index}");
                    }
                }
            }
        }
    }
}

#[test]
fn instances_are_deterministic_and_inside_the_box() {
    for f in FunctionId::ALL {
        for n in supported_dims(f) {
            let probe = |index| {
                let inst = make_instance(f, n, index).unwrap();
                let mut rng = rng_from_seed(42);
                let mut bytes = Vec::new();
                for _ in 0..100 {
                    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
                    bytes.extend_from_slice(&inst.value(&x).to_le_bytes());
                }
                (content_hash(&bytes), inst)
            };
            let (h1, a) = probe(3);
            let (h2, _) = probe(3);
            assert_eq!(h1, h2);
            assert!(a
                .x_opt
                .iter()
                .zip(a.lower.iter().zip(&a.upper))
                .all(|(x, (l, u))| x > l && x < u));
            if f != FunctionId::Illustration1d {
                let b = make_instance(f, n, 4).unwrap();
                // schwefel optima only vary by sign pattern, which can repeat in low n
                if f == FunctionId::Schwefel {
                    assert_ne!(a.f_opt, b.f_opt);
                } else {
                    assert_ne!(a.x_opt, b.x_opt);
                }
                assert!(a.f_opt.abs() <= 100.0);
            }
        }
    }
}

#[test]
fn catalog_lists_every_function_once() {
    let ids: Vec<FunctionId> = catalog().iter().map(|i| i.id).collect();
    assert_eq!(ids, FunctionId::ALL.to_vec());
    let multimodal = catalog()
        .iter()
        .filter(|i| i.modality == Modality::Multimodal)
        .count();
    assert_eq!(multimodal, 4);
}
