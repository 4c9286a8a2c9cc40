//! Test functions generated from a fitted model.
//!
//! * [`EstimationFunction`]: the kriging predictor itself. Smooth, and close
//!   to constant wherever the data are sparse.
//! * [`SpectralFunction`]: a random draw from the fitted process as a sum of
//!   cosines, unconditional or conditioned on the training data. Evaluable
//!   anywhere at `O(N n + m n)` cost.
//! * [`DecompositionSimulator`]: draws at a fixed point set through the
//!   Cholesky factor of the covariance matrix. Memory grows with the square
//!   of the point count, which is why it is capped.

mod decomposition;
mod estimation;
mod spectral;

pub use decomposition::{
    simulate_decomposition, DecompositionSimulator, SimulationSampleSet, DEFAULT_DECOMPOSITION_CAP,
};
pub use estimation::{make_estimation_function, EstimationFunction};
pub use spectral::{
    default_terms, sample_frequencies, simulate_conditional, simulate_unconditional,
    ConditioningData, SpectralFunction,
};
