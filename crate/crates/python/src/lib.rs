//! Python bindings for the simbench library.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use simbench::gpr::{fit_with, FitOptions};
use simbench::metrics::{
    performance_error as perf_error, quartiles as aggregate_quartiles, scale_values,
};
use simbench::optimizers::{
    generate_training_data_with, run, Algorithm, Bounds, OptimizerConfig, RunTrace,
};
use simbench::simulate::{default_terms, simulate_conditional, simulate_unconditional};
use simbench::testbed::{catalog, make_instance, FunctionId};
use simbench::{Error, Objective, TrainingSet};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn check_point(objective: &dyn Objective, x: &[f64]) -> PyResult<()> {
    if x.len() != objective.dim() {
        return Err(to_py(Error::DimensionMismatch {
            expected: objective.dim(),
            found: x.len(),
        }));
    }
    Ok(())
}

/// A fitted Gaussian-process model (Gaussian kernel, constant mean).
#[pyclass(name = "GprModel", module = "pysimbench", frozen)]
struct PyGprModel(simbench::GprModel);

#[pymethods]
impl PyGprModel {
    /// Fits a model by maximum likelihood to `points` (m x n) and `values`.
    #[staticmethod]
    #[pyo3(signature = (points, values, restarts=None, seed=0))]
    fn fit(
        py: Python<'_>,
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        restarts: Option<usize>,
        seed: u64,
    ) -> PyResult<Self> {
        let set = TrainingSet::new(points, values).map_err(to_py)?;
        let options = FitOptions {
            restarts,
            seed,
            ..FitOptions::default()
        };
        py.detach(|| fit_with(&set, &options))
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.predict(&x).map_err(to_py)
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.predict(x)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.0.theta().to_vec()
    }

    #[getter]
    fn mu_hat(&self) -> f64 {
        self.0.mu_hat()
    }

    #[getter]
    fn sigma2_hat(&self) -> f64 {
        self.0.sigma2_hat()
    }

    #[getter]
    fn jitter(&self) -> f64 {
        self.0.jitter()
    }

    #[getter]
    fn neg_log_likelihood(&self) -> f64 {
        self.0.neg_log_likelihood()
    }

    #[getter]
    fn training_points(&self) -> Vec<Vec<f64>> {
        self.0.training().points().to_vec()
    }

    #[getter]
    fn training_values(&self) -> Vec<f64> {
        self.0.training().values().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "GprModel(dim={}, theta={:?}, mu_hat={}, sigma2_hat={})",
            self.0.dim(),
            self.0.theta(),
            self.0.mu_hat(),
            self.0.sigma2_hat()
        )
    }
}

/// A spectral simulation of a fitted process, optionally conditioned on the
/// training data.
#[pyclass(name = "SpectralFunction", module = "pysimbench", frozen)]
struct PySpectralFunction(simbench::SpectralFunction);

#[pymethods]
impl PySpectralFunction {
    /// Draws a simulation conditioned on the model's training data.
    #[staticmethod]
    #[pyo3(signature = (model, seed=0, terms=None))]
    fn conditional(model: &PyGprModel, seed: u64, terms: Option<usize>) -> PyResult<Self> {
        let terms = terms.unwrap_or_else(|| default_terms(model.0.dim()));
        simulate_conditional(&model.0, terms, seed)
            .map(Self)
            .map_err(to_py)
    }

    /// Draws an unconditional simulation with the model's parameters.
    #[staticmethod]
    #[pyo3(signature = (model, seed=0, terms=None))]
    fn unconditional(model: &PyGprModel, seed: u64, terms: Option<usize>) -> PyResult<Self> {
        let terms = terms.unwrap_or_else(|| default_terms(model.0.dim()));
        simulate_unconditional(&model.0, terms, seed)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.eval(&x).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn n_terms(&self) -> usize {
        self.0.n_terms()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed()
    }

    #[getter]
    fn is_conditional(&self) -> bool {
        self.0.is_conditional()
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectralFunction(dim={}, terms={}, conditional={})",
            self.0.dim(),
            self.0.n_terms(),
            self.0.is_conditional()
        )
    }
}

/// One randomized instance of a testbed function.
#[pyclass(name = "ProblemInstance", module = "pysimbench", frozen)]
struct PyProblemInstance(simbench::ProblemInstance);

#[pymethods]
impl PyProblemInstance {
    /// Builds instance `index` (1-based) of `function` in dimension `dim`.
    #[new]
    #[pyo3(signature = (function, dim, index=1))]
    fn new(function: &str, dim: usize, index: usize) -> PyResult<Self> {
        let id: FunctionId = function.parse().map_err(to_py)?;
        make_instance(id, dim, index).map(Self).map_err(to_py)
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.evaluate(&x).map_err(to_py)
    }

    /// Training data from a short DE run: `(points, values)`. Budget and
    /// population default to 50 n and 20 n.
    #[pyo3(signature = (seed=0, budget=None, population=None))]
    fn training_data(
        &self,
        seed: u64,
        budget: Option<usize>,
        population: Option<usize>,
    ) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
        let n = self.0.dim;
        let set = generate_training_data_with(
            &self.0,
            budget.unwrap_or(50 * n),
            population.unwrap_or(20 * n),
            seed,
        )
        .map_err(to_py)?;
        Ok((set.points().to_vec(), set.values().to_vec()))
    }

    #[getter]
    fn function(&self) -> &'static str {
        self.0.function.as_str()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn index(&self) -> usize {
        self.0.index
    }

    #[getter]
    fn x_opt(&self) -> Vec<f64> {
        self.0.x_opt.clone()
    }

    #[getter]
    fn f_opt(&self) -> f64 {
        self.0.f_opt
    }

    #[getter]
    fn lower(&self) -> Vec<f64> {
        self.0.lower.clone()
    }

    #[getter]
    fn upper(&self) -> Vec<f64> {
        self.0.upper.clone()
    }

    fn __repr__(&self) -> String {
        self.0.descriptor()
    }
}

/// Runs DE, NM or RS on a ground-truth instance, a model's estimation or a
/// simulation and returns the best-so-far trace. The search box defaults to
/// the instance box, or [-5, 5]^n for models.
#[pyfunction]
#[pyo3(signature = (objective, algorithm, seed=0, budget=None, population=None, lower=None, upper=None))]
#[allow(clippy::too_many_arguments)]
fn run_optimizer(
    py: Python<'_>,
    objective: &Bound<'_, PyAny>,
    algorithm: &str,
    seed: u64,
    budget: Option<usize>,
    population: Option<usize>,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
) -> PyResult<Vec<f64>> {
    let algorithm: Algorithm = algorithm.parse().map_err(to_py)?;
    let (target, default_bounds): (&dyn Objective, Bounds) =
        if let Ok(inst) = objective.cast::<PyProblemInstance>() {
            let inst = &inst.get().0;
            (inst, Bounds::of_instance(inst))
        } else if let Ok(model) = objective.cast::<PyGprModel>() {
            let model = &model.get().0;
            (model, Bounds::uniform(model.dim(), -5.0, 5.0))
        } else if let Ok(sim) = objective.cast::<PySpectralFunction>() {
            let sim = &sim.get().0;
            (sim, Bounds::uniform(sim.dim(), -5.0, 5.0))
        } else {
            return Err(PyValueError::new_err(
                "objective must be a ProblemInstance, GprModel or SpectralFunction",
            ));
        };
    let bounds = match (lower, upper) {
        (Some(lo), Some(hi)) => Bounds::new(lo, hi).map_err(to_py)?,
        (None, None) => default_bounds,
        _ => {
            return Err(PyValueError::new_err(
                "give both lower and upper or neither",
            ))
        }
    };
    check_point(target, &bounds.lower)?;
    let mut config = OptimizerConfig::new(algorithm, bounds, seed);
    if let Some(budget) = budget {
        config = config.with_budget(budget);
    }
    if let Some(population) = population {
        config = config.with_population(population);
    }
    py.detach(|| run(target, &config))
        .map(|t| t.best_so_far)
        .map_err(to_py)
}

/// Gaussian correlation exp(-sum theta_i (x_i - x2_i)^2).
#[pyfunction]
fn kernel_eval(x: Vec<f64>, x2: Vec<f64>, theta: Vec<f64>) -> PyResult<f64> {
    simbench::gpr::kernel_eval(&x, &x2, &theta).map_err(to_py)
}

/// Min-max scales a best-so-far trace to [0, 1].
#[pyfunction]
fn scale_performance(trace: Vec<f64>) -> PyResult<Vec<f64>> {
    if trace.is_empty() {
        return Err(PyValueError::new_err("cannot scale an empty trace"));
    }
    Ok(scale_values(&trace))
}

fn as_trace(values: Vec<f64>) -> RunTrace {
    RunTrace {
        algorithm: Algorithm::De,
        seed: 0,
        instance: String::new(),
        best_so_far: values,
        first_point: Vec::new(),
        points: None,
    }
}

/// Absolute difference of the scaled traces at every evaluation.
#[pyfunction]
fn performance_error(model_trace: Vec<f64>, truth_trace: Vec<f64>) -> PyResult<Vec<f64>> {
    perf_error(&as_trace(model_trace), &as_trace(truth_trace)).map_err(to_py)
}

/// Pointwise `(median, q1, q3)` of equally long curves.
#[pyfunction]
fn quartiles(curves: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let slices: Vec<&[f64]> = curves.iter().map(Vec::as_slice).collect();
    aggregate_quartiles(&slices).map_err(to_py)
}

/// The testbed catalog as a list of dicts.
#[pyfunction]
fn functions(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    catalog()
        .into_iter()
        .map(|info| {
            let d = PyDict::new(py);
            d.set_item("id", info.id.as_str())?;
            d.set_item("modality", info.modality.to_string())?;
            d.set_item("min_dim", info.min_dim)?;
            d.set_item("max_dim", info.max_dim)?;
            d.set_item("description", info.description)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pysimbench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGprModel>()?;
    m.add_class::<PySpectralFunction>()?;
    m.add_class::<PyProblemInstance>()?;
    m.add_function(wrap_pyfunction!(run_optimizer, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_eval, m)?)?;
    m.add_function(wrap_pyfunction!(scale_performance, m)?)?;
    m.add_function(wrap_pyfunction!(performance_error, m)?)?;
    m.add_function(wrap_pyfunction!(quartiles, m)?)?;
    m.add_function(wrap_pyfunction!(functions, m)?)?;
    Ok(())
}
