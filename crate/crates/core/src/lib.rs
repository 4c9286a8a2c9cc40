//! Continuous optimization benchmarks generated from logged evaluations.
//!
//! A Gaussian process is fitted to evaluations of an expensive objective and
//! then turned into cheap test functions, either by kriging *estimation*
//! (the posterior mean) or by *simulation* (a random draw from the fitted
//! process, generated with the spectral method). The rest of the crate is
//! the machinery to check how faithfully those test functions reproduce
//! optimizer behavior on the ground truth: a stand-in testbed, three
//! reference optimizers, the scaled-performance error metric, and a cached
//! experiment pipeline.
//!
//! ```
//! use simbench::gpr::fit;
//! use simbench::metrics::performance_error;
//! use simbench::optimizers::{generate_training_data, run, Algorithm, Bounds, OptimizerConfig};
//! use simbench::simulate::{default_terms, simulate_conditional};
//! use simbench::testbed::{make_instance, FunctionId};
//!
//! let truth = make_instance(FunctionId::Rastrigin, 2, 1)?;
//! let data = generate_training_data(&truth, 0)?;
//! let model = fit(&data)?;
//! let sim = simulate_conditional(&model, default_terms(2), 42)?;
//!
//! let config = OptimizerConfig::new(Algorithm::De, Bounds::of_instance(&truth), 7);
//! let on_truth = run(&truth, &config)?;
//! let on_sim = run(&sim, &config)?;
//! let error = performance_error(&on_sim, &on_truth)?;
//! assert_eq!(error.len(), 2000);
//! # Ok::<(), simbench::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gpr;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod objective;
pub mod optimizers;
pub mod rng;
pub mod simulate;
pub mod testbed;

pub use error::{Error, Result};
pub use gpr::{FitOptions, GprModel, KernelParams, TrainingSet};
pub use metrics::{AggregateCurve, ErrorCurve, Source};
pub use objective::Objective;
pub use optimizers::{Algorithm, Bounds, OptimizerConfig, RunTrace};
pub use simulate::{EstimationFunction, SimulationSampleSet, SpectralFunction};
pub use testbed::{FunctionId, Modality, ProblemInstance};
