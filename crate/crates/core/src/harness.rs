//! Experiment pipeline: training data, model fit, test-function generation,
//! optimizer runs and error curves, driven by one [`ExperimentConfig`].
//!
//! Every artifact is a file under the output directory, recorded in
//! `manifest.json` together with a key hashed from everything it depends
//! on. A rerun skips artifacts whose file exists and whose key matches.
//!
//! ```text
//! out/
//!   config.json  manifest.json
//!   training/{f}_n{n}_i{k}.csv
//!   models/{f}_n{n}_i{k}.json
//!   simulations/{f}_n{n}_i{k}.json            (+ _unconditional.json)
//!   traces/{f}_n{n}_i{k}_{alg}_{source}.csv   (+ .json sidecar)
//!   errors/{f}_n{n}_i{k}_{alg}_{source}.csv
//!   aggregate.csv  summary.txt                (written by `report`)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpr::{fit_with, FitOptions, GprModel, TrainingSet};
use crate::io;
use crate::metrics::{self, AggregateCurve, CurveKey, ErrorCurve, Source};
use crate::objective::Objective;
use crate::optimizers::{
    self, generate_training_data_with, Algorithm, Bounds, OptimizerConfig, RunTrace,
};
use crate::rng::{content_hash, derive_seed};
use crate::simulate::{
    simulate_conditional, simulate_unconditional, EstimationFunction, SpectralFunction,
};
use crate::testbed::{make_instance, FunctionId, Modality, ProblemInstance, DEFAULT_INSTANCES};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub functions: Vec<FunctionId>,
    pub dimensions: Vec<usize>,
    pub instances: usize,
    pub sources: Vec<Source>,
    pub algorithms: Vec<Algorithm>,
    /// Training budget per dimension.
    pub training_budget: usize,
    /// Training DE population per dimension.
    pub training_population: usize,
    /// Testing budget per dimension.
    pub testing_budget: usize,
    /// Testing DE population per dimension.
    pub testing_population: usize,
    /// Spectral terms per dimension.
    pub spectral_terms: usize,
    /// Likelihood restarts; `None` means `10 n`.
    pub fit_restarts: Option<usize>,
    pub seed: u64,
    pub output: PathBuf,
    /// Worker threads; 0 uses all cores.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            functions: FunctionId::ALL.to_vec(),
            dimensions: vec![2, 3, 5, 10, 20],
            instances: DEFAULT_INSTANCES,
            sources: vec![Source::Groundtruth, Source::Estimation, Source::Simulation],
            algorithms: Algorithm::ALL.to_vec(),
            training_budget: 50,
            training_population: 20,
            testing_budget: 1000,
            testing_population: 10,
            spectral_terms: 100,
            fit_restarts: None,
            seed: 0,
            output: PathBuf::from("results"),
            workers: 0,
        }
    }
}

/// One problem instance of the experiment grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub function: FunctionId,
    pub dimension: usize,
    pub instance: usize,
}

impl Triple {
    pub fn stem(&self) -> String {
        format!("{}_n{}_i{}", self.function, self.dimension, self.instance)
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults: every function at n in {2, 5}, 5 instances.
    pub fn desk_scale() -> Self {
        Self {
            dimensions: vec![2, 5],
            instances: 5,
            ..Self::default()
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        let config: Self = if is_json {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    /// Applies `key=value` overrides. Values are parsed as JSON when
    /// possible, otherwise taken as strings; list fields also accept
    /// comma-separated items.
    pub fn with_overrides<S: AsRef<str>>(self, overrides: &[S]) -> Result<Self> {
        let mut doc = serde_json::to_value(&self)?;
        let map = doc.as_object_mut().expect("config serializes to an object");
        for item in overrides {
            let item = item.as_ref();
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
            let key = key.trim();
            let slot = map
                .get_mut(key)
                .ok_or_else(|| Error::Config(format!("unknown config key `{key}`")))?;
            let parse =
                |s: &str| serde_json::from_str(s.trim()).unwrap_or_else(|_| s.trim().into());
            *slot = match serde_json::from_str::<serde_json::Value>(raw) {
                Ok(v) if v.is_array() || !slot.is_array() => v,
                _ if slot.is_array() => {
                    serde_json::Value::Array(raw.split(',').map(parse).collect())
                }
                _ => raw.into(),
            };
        }
        let config: Self = serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.functions.is_empty() || self.dimensions.is_empty() || self.algorithms.is_empty() {
            return fail("functions, dimensions and algorithms must be non-empty");
        }
        if self.dimensions.contains(&0) {
            return fail("dimensions must be positive");
        }
        if self.instances == 0 {
            return fail("instance count must be at least 1");
        }
        if self.sources.iter().any(|s| s.is_model()) && !self.sources.contains(&Source::Groundtruth)
        {
            return fail("model sources need the groundtruth source for error curves");
        }
        if self.training_budget == 0 || self.testing_budget == 0 || self.spectral_terms == 0 {
            return fail("budgets and spectral terms must be positive");
        }
        Ok(())
    }

    /// Supported (function, dimension, instance) combinations, in order.
    pub fn triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for &function in &self.functions {
            for &dimension in &self.dimensions {
                if !function.supports_dim(dimension) {
                    continue;
                }
                for instance in 1..=self.instances {
                    out.push(Triple {
                        function,
                        dimension,
                        instance,
                    });
                }
            }
        }
        out
    }

    /// (function, dimension) cells that the catalog cannot instantiate.
    pub fn unsupported(&self) -> Vec<(FunctionId, usize)> {
        let mut out = Vec::new();
        for &f in &self.functions {
            for &n in &self.dimensions {
                if !f.supports_dim(n) {
                    out.push((f, n));
                }
            }
        }
        out
    }

    fn model_sources(&self) -> Vec<Source> {
        self.sources
            .iter()
            .copied()
            .filter(|s| s.is_model())
            .collect()
    }

    /// The config with output location and worker count cleared; these do
    /// not influence results.
    fn normalized(&self) -> Self {
        Self {
            output: PathBuf::new(),
            workers: 0,
            ..self.clone()
        }
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.normalized()).expect("config serializes");
        content_hash(&bytes)
    }

    fn optimizer_config(
        &self,
        algorithm: Algorithm,
        instance: &ProblemInstance,
        seed: u64,
    ) -> OptimizerConfig {
        let n = instance.dim;
        OptimizerConfig::new(algorithm, Bounds::of_instance(instance), seed)
            .with_budget(self.testing_budget * n)
            .with_population(self.testing_population * n)
    }
}

/// Seed of the optimizer runs of one (triple, algorithm). It does not
/// depend on the source, so ground-truth and model-based runs start alike.
pub fn run_seed(master: u64, triple: &Triple, algorithm: Algorithm) -> u64 {
    derive_seed(
        master,
        &[
            "run",
            triple.function.as_str(),
            &triple.dimension.to_string(),
            &triple.instance.to_string(),
            algorithm.as_str(),
        ],
    )
}

fn stage_seed(master: u64, stage: &str, triple: &Triple) -> u64 {
    derive_seed(
        master,
        &[
            stage,
            triple.function.as_str(),
            &triple.dimension.to_string(),
            &triple.instance.to_string(),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub key: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// Artifacts by path relative to the output directory.
    pub entries: BTreeMap<String, ManifestEntry>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        io::read_json(&dir.join(MANIFEST))
    }

    pub fn failures(&self) -> Vec<(&str, &str)> {
        self.entries
            .iter()
            .filter(|(_, e)| e.status == Status::Failed)
            .map(|(p, e)| (p.as_str(), e.message.as_deref().unwrap_or("")))
            .collect()
    }
}

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG: &str = "config.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub computed: usize,
    pub cached: usize,
    pub failed: usize,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub manifest: Manifest,
}

impl PipelineResult {
    pub fn is_complete(&self) -> bool {
        self.summary.failed == 0
    }
}

struct Pipeline<'a> {
    config: &'a ExperimentConfig,
    dir: PathBuf,
    previous: BTreeMap<String, ManifestEntry>,
    state: Mutex<(BTreeMap<String, ManifestEntry>, RunSummary)>,
}

enum Lookup {
    Hit,
    CachedFailure(String),
    Miss,
}

impl Pipeline<'_> {
    fn lookup(&self, rel: &str, key: &str) -> Lookup {
        match self.previous.get(rel) {
            Some(e) if e.key == key => match e.status {
                Status::Ok if self.dir.join(rel).is_file() => Lookup::Hit,
                Status::Failed => Lookup::CachedFailure(e.message.clone().unwrap_or_default()),
                Status::Ok => Lookup::Miss,
            },
            _ => Lookup::Miss,
        }
    }

    fn record(&self, rel: &str, key: &str, outcome: std::result::Result<bool, String>) {
        let mut state = self.state.lock().expect("manifest lock");
        let (status, message) = match &outcome {
            Ok(cached) => {
                if *cached {
                    state.1.cached += 1;
                } else {
                    state.1.computed += 1;
                }
                (Status::Ok, None)
            }
            Err(m) => {
                state.1.failed += 1;
                (Status::Failed, Some(m.clone()))
            }
        };
        state.0.insert(
            rel.to_string(),
            ManifestEntry {
                key: key.to_string(),
                status,
                message,
            },
        );
    }

    /// Loads a cached artifact or computes and stores it. Returns `None`
    /// when the stage failed (now or in a previous run with the same key).
    fn stage<T>(
        &self,
        rel: &str,
        key: &str,
        load: impl FnOnce(&Path) -> Result<T>,
        compute: impl FnOnce(&Path) -> Result<T>,
    ) -> Option<T> {
        let path = self.dir.join(rel);
        match self.lookup(rel, key) {
            Lookup::Hit => match load(&path) {
                Ok(v) => {
                    self.record(rel, key, Ok(true));
                    return Some(v);
                }
                Err(e) => log::warn!("cached {rel} unreadable ({e}), recomputing"),
            },
            Lookup::CachedFailure(m) => {
                self.record(rel, key, Err(m));
                return None;
            }
            Lookup::Miss => {}
        }
        match compute(&path) {
            Ok(v) => {
                self.record(rel, key, Ok(false));
                Some(v)
            }
            Err(e) => {
                log::error!("{rel}: {e}");
                self.record(rel, key, Err(e.to_string()));
                None
            }
        }
    }

    fn run_triple(&self, t: &Triple) {
        let config = self.config;
        let n = t.dimension;
        let stem = t.stem();
        let instance = match make_instance(t.function, n, t.instance) {
            Ok(i) => i,
            Err(e) => {
                log::error!("{stem}: {e}");
                return;
            }
        };

        let training_seed = stage_seed(config.seed, "training", t);
        let training_key = key_of(&(
            "training",
            &stem,
            training_seed,
            config.training_budget,
            config.training_population,
        ));
        let model_sources = config.model_sources();

        let mut models: Option<(Arc<GprModel>, String)> = None;
        if !model_sources.is_empty() {
            let rel = format!("training/{stem}.csv");
            let training = self.stage(&rel, &training_key, io::read_training_csv, |path| {
                let set = generate_training_data_with(
                    &instance,
                    config.training_budget * n,
                    config.training_population * n,
                    training_seed,
                )?;
                io::write_training_csv(path, &set)?;
                Ok(set)
            });
            if let Some(training) = training {
                let fit_seed = stage_seed(config.seed, "fit", t);
                let model_key = key_of(&("model", &training_key, fit_seed, config.fit_restarts));
                let rel = format!("models/{stem}.json");
                models = self
                    .stage(&rel, &model_key, io::read_json::<GprModel>, |path| {
                        let model = fit_model(&training, fit_seed, config.fit_restarts)?;
                        io::write_json(path, &model)?;
                        Ok(model)
                    })
                    .map(|m| (Arc::new(m), model_key));
            }
        }

        let mut sims: BTreeMap<Source, (SpectralFunction, String)> = BTreeMap::new();
        if let Some((model, model_key)) = &models {
            for source in [Source::Simulation, Source::Unconditional] {
                if !model_sources.contains(&source) {
                    continue;
                }
                let conditional = source == Source::Simulation;
                let suffix = if conditional { "" } else { "_unconditional" };
                let seed = stage_seed(config.seed, &format!("{source}"), t);
                let terms = config.spectral_terms * n;
                let key = key_of(&("simulation", model_key, source.as_str(), seed, terms));
                let rel = format!("simulations/{stem}{suffix}.json");
                let sim = self.stage(&rel, &key, io::read_json::<SpectralFunction>, |path| {
                    let sim = if conditional {
                        simulate_conditional(model, terms, seed)?
                    } else {
                        simulate_unconditional(model, terms, seed)?
                    };
                    io::write_json(path, &sim)?;
                    Ok(sim)
                });
                if let Some(sim) = sim {
                    sims.insert(source, (sim, key));
                }
            }
        }
        let estimation = models
            .as_ref()
            .map(|(m, k)| (EstimationFunction::new(Arc::clone(m)), k.clone()));

        let instance_key = key_of(&("instance", &stem));
        config.algorithms.par_iter().for_each(|&algorithm| {
            let seed = run_seed(config.seed, t, algorithm);
            let opt = config.optimizer_config(algorithm, &instance, seed);
            let run_on = |source: Source, objective: &dyn Objective, upstream: &str| {
                let key = key_of(&("trace", upstream, &opt));
                let rel = format!("traces/{stem}_{algorithm}_{source}.csv");
                let trace = self.stage(&rel, &key, io::read_trace, |path| {
                    let trace =
                        optimizers::run(objective, &opt)?.with_instance(instance.descriptor());
                    io::write_trace(path, &trace, &opt)?;
                    Ok(trace)
                });
                trace.map(|tr| (tr, key))
            };

            let truth = if config.sources.contains(&Source::Groundtruth) {
                run_on(Source::Groundtruth, &instance, &instance_key)
            } else {
                None
            };
            for &source in &model_sources {
                let model_run = match source {
                    Source::Estimation => {
                        estimation.as_ref().and_then(|(f, k)| run_on(source, f, k))
                    }
                    _ => sims.get(&source).and_then(|(f, k)| run_on(source, f, k)),
                };
                let (Some((model_trace, mk)), Some((truth_trace, tk))) = (&model_run, &truth)
                else {
                    continue;
                };
                let key = key_of(&("error", mk, tk));
                let rel = format!("errors/{stem}_{algorithm}_{source}.csv");
                let curve_key = CurveKey {
                    function: t.function,
                    dimension: n,
                    algorithm,
                    source,
                };
                self.stage(
                    &rel,
                    &key,
                    |_| Ok(()),
                    |path| {
                        let curve = ErrorCurve::from_traces(
                            curve_key,
                            t.instance,
                            model_trace,
                            truth_trace,
                        )?;
                        let mut bytes = Vec::new();
                        curve.write_csv(&mut bytes)?;
                        io::write_atomic(path, &bytes)
                    },
                );
            }
        });
    }
}

fn fit_model(training: &TrainingSet, seed: u64, restarts: Option<usize>) -> Result<GprModel> {
    let options = FitOptions {
        restarts,
        seed,
        ..FitOptions::default()
    };
    fit_with(training, &options)
}

fn key_of<T: Serialize>(value: &T) -> String {
    content_hash(&serde_json::to_vec(value).expect("cache key serializes"))
}

/// Runs the whole pipeline into `config.output`.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<PipelineResult> {
    config.validate()?;
    let dir = config.output.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let previous = match Manifest::load(&dir) {
        Ok(m) => m.entries,
        Err(Error::Io { .. }) => BTreeMap::new(),
        Err(e) => {
            log::warn!("ignoring unreadable manifest: {e}");
            BTreeMap::new()
        }
    };
    for (f, n) in config.unsupported() {
        log::warn!("skipping {f} at n={n}: dimension not supported");
    }

    let pipeline = Pipeline {
        config,
        dir: dir.clone(),
        previous,
        state: Mutex::new((BTreeMap::new(), RunSummary::default())),
    };
    let triples = config.triples();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| {
        triples.par_iter().for_each(|t| {
            log::info!("{}", t.stem());
            pipeline.run_triple(t);
        })
    });

    let (entries, summary) = pipeline.state.into_inner().expect("manifest lock");
    let manifest = Manifest {
        config_hash: config.hash(),
        config: config.normalized(),
        entries,
    };
    io::write_json(&dir.join(CONFIG), config)?;
    io::write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(PipelineResult {
        dir,
        summary,
        manifest,
    })
}

/// One row of the summary table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub modality: Modality,
    pub key: CurveKey,
    pub instances: usize,
    pub time_averaged_median: f64,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub aggregates: Vec<AggregateCurve>,
    pub rows: Vec<SummaryRow>,
    /// Expected error curves that were not found.
    pub missing: Vec<String>,
}

impl Report {
    pub fn row(
        &self,
        function: FunctionId,
        dimension: usize,
        algorithm: Algorithm,
        source: Source,
    ) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| {
            r.key.function == function
                && r.key.dimension == dimension
                && r.key.algorithm == algorithm
                && r.key.source == source
        })
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "time-averaged median performance error");
        let _ = writeln!(
            s,
            "{:<12} {:<16} {:>3} {:<4} {:<14} {:>9} {:>10}",
            "modality", "function", "n", "alg", "source", "instances", "error"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<12} {:<16} {:>3} {:<4} {:<14} {:>9} {:>10.6}",
                r.modality.to_string(),
                r.key.function.as_str(),
                r.key.dimension,
                r.key.algorithm.as_str(),
                r.key.source.as_str(),
                r.instances,
                r.time_averaged_median
            );
        }
        let mut strata: BTreeMap<(String, &str), Vec<f64>> = BTreeMap::new();
        for r in &self.rows {
            strata
                .entry((r.modality.to_string(), r.key.source.as_str()))
                .or_default()
                .push(r.time_averaged_median);
        }
        let _ = writeln!(s, "\nmean by modality");
        for ((modality, source), v) in &strata {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let _ = writeln!(
                s,
                "{modality:<12} {source:<14} {mean:>10.6} ({} rows)",
                v.len()
            );
        }
        if !self.missing.is_empty() {
            let _ = writeln!(
                s,
                "\nWARNING: {} expected error curves missing",
                self.missing.len()
            );
            for m in &self.missing {
                let _ = writeln!(s, "  {m}");
            }
        }
        s
    }
}

/// Aggregates the error curves of a result directory and writes
/// `aggregate.csv` and `summary.txt` next to them.
pub fn report(dir: &Path) -> Result<Report> {
    let manifest = match Manifest::load(dir) {
        Ok(m) => m,
        Err(Error::Io { .. }) => {
            return Err(Error::Config(format!(
                "{} is not a result directory; missing: {MANIFEST}, {CONFIG}, training/, models/, simulations/, traces/, errors/",
                dir.display()
            )))
        }
        Err(e) => return Err(e),
    };
    let config = &manifest.config;
    let mut groups: BTreeMap<CurveKey, Vec<ErrorCurve>> = BTreeMap::new();
    let mut missing = Vec::new();
    for t in config.triples() {
        for &algorithm in &config.algorithms {
            for source in config.model_sources() {
                let rel = format!("errors/{}_{algorithm}_{source}.csv", t.stem());
                let path = dir.join(&rel);
                let curve = fs::File::open(&path)
                    .map_err(|e| Error::io(&path, e))
                    .and_then(|f| ErrorCurve::read_csv(f, t.instance));
                match curve {
                    Ok(c) => groups.entry(c.key.clone()).or_default().push(c),
                    Err(_) => missing.push(rel),
                }
            }
        }
    }
    if !missing.is_empty() {
        log::warn!(
            "{} expected error curves missing; report is partial",
            missing.len()
        );
    }
    let mut aggregates = Vec::with_capacity(groups.len());
    for curves in groups.values() {
        aggregates.push(metrics::aggregate(curves)?);
    }
    let rows = aggregates
        .iter()
        .map(|a| SummaryRow {
            modality: a.key.function.modality(),
            key: a.key.clone(),
            instances: a.instances,
            time_averaged_median: a.time_averaged_median(),
        })
        .collect();
    let report = Report {
        aggregates,
        rows,
        missing,
    };
    let mut csv = Vec::new();
    metrics::write_aggregates_csv(&mut csv, &report.aggregates)?;
    io::write_atomic(&dir.join("aggregate.csv"), &csv)?;
    io::write_atomic(&dir.join("summary.txt"), report.summary_text().as_bytes())?;
    Ok(report)
}

/// Error curves of a result directory grouped by curve, for callers that
/// want the raw per-instance data.
pub fn load_error_curves(dir: &Path) -> Result<BTreeMap<CurveKey, Vec<ErrorCurve>>> {
    let manifest = Manifest::load(dir)?;
    let mut groups: BTreeMap<CurveKey, Vec<ErrorCurve>> = BTreeMap::new();
    for t in manifest.config.triples() {
        for &algorithm in &manifest.config.algorithms {
            for source in manifest.config.model_sources() {
                let path = dir.join(format!("errors/{}_{algorithm}_{source}.csv", t.stem()));
                if let Ok(f) = fs::File::open(&path) {
                    let c = ErrorCurve::read_csv(f, t.instance)?;
                    groups.entry(c.key.clone()).or_default().push(c);
                }
            }
        }
    }
    Ok(groups)
}

/// Reads the trace of one run.
pub fn load_trace(
    dir: &Path,
    triple: &Triple,
    algorithm: Algorithm,
    source: Source,
) -> Result<RunTrace> {
    io::read_trace(&dir.join(format!("traces/{}_{algorithm}_{source}.csv", triple.stem())))
}
