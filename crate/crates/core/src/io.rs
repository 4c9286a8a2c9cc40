//! File formats: training CSV, model and simulation JSON, trace CSV with a
//! JSON sidecar.
//!
//! All writers go through a temporary file and a rename so a crashed run
//! never leaves a truncated artifact behind.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpr::TrainingSet;
use crate::optimizers::{OptimizerConfig, RunTrace};

/// Writes `bytes` to `path` atomically, creating parent directories.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json_pretty(value)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&read(path)?)?)
}

pub fn training_csv(set: &TrainingSet) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=set.dim()).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (p, y) in set.points().iter().zip(set.values()) {
        let row: Vec<String> = p
            .iter()
            .chain(std::iter::once(y))
            .map(f64::to_string)
            .collect();
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<csv>", e.into_error()))
}

pub fn write_training_csv(path: &Path, set: &TrainingSet) -> Result<()> {
    write_atomic(path, &training_csv(set)?)
}

/// Reads a training set: columns `x1..xn` then `y`, header required.
pub fn read_training_csv(path: &Path) -> Result<TrainingSet> {
    parse_training_csv(&read(path)?)
}

pub fn parse_training_csv(bytes: &[u8]) -> Result<TrainingSet> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers()?.clone();
    let n = header.len().saturating_sub(1);
    let expected: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain(std::iter::once("y".to_string()))
        .collect();
    if n == 0
        || header
            .iter()
            .map(str::trim)
            .ne(expected.iter().map(String::as_str))
    {
        return Err(Error::InvalidInput(format!(
            "training CSV header must be x1..xn,y; got {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let nums = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidInput(format!("row {}: {e}", line + 2)))?;
        values.push(nums[n]);
        points.push(nums[..n].to_vec());
    }
    TrainingSet::new(points, values)
}

#[derive(Serialize, Deserialize)]
struct TraceRow {
    evaluation_index: usize,
    best_so_far: f64,
}

/// Metadata stored next to a trace CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSidecar {
    pub instance: String,
    pub seed: u64,
    pub evaluations: usize,
    pub first_point: Vec<f64>,
    pub config: OptimizerConfig,
}

pub fn trace_csv(trace: &RunTrace) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, v) in trace.best_so_far.iter().enumerate() {
        w.serialize(TraceRow {
            evaluation_index: i + 1,
            best_so_far: *v,
        })?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<csv>", e.into_error()))
}

/// Path of the JSON sidecar belonging to a trace CSV.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_trace(path: &Path, trace: &RunTrace, config: &OptimizerConfig) -> Result<()> {
    let sidecar = TraceSidecar {
        instance: trace.instance.clone(),
        seed: trace.seed,
        evaluations: trace.len(),
        first_point: trace.first_point.clone(),
        config: config.clone(),
    };
    write_json(&sidecar_path(path), &sidecar)?;
    write_atomic(path, &trace_csv(trace)?)
}

pub fn read_trace(path: &Path) -> Result<RunTrace> {
    let sidecar: TraceSidecar = read_json(&sidecar_path(path))?;
    let bytes = read(path)?;
    let mut best_so_far = Vec::new();
    for row in csv::Reader::from_reader(bytes.as_slice()).deserialize() {
        let row: TraceRow = row?;
        best_so_far.push(row.best_so_far);
    }
    Ok(RunTrace {
        algorithm: sidecar.config.algorithm,
        seed: sidecar.seed,
        instance: sidecar.instance,
        best_so_far,
        first_point: sidecar.first_point,
        points: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::{run, Algorithm, Bounds};
    use crate::testbed::{make_instance, FunctionId};

    #[test]
    fn training_csv_round_trip() {
        let set = TrainingSet::new(
            vec![vec![0.1, -2.0], vec![1.0 / 3.0, 4.5]],
            vec![0.7, -1e-17],
        )
        .unwrap();
        let bytes = training_csv(&set).unwrap();
        assert!(bytes.starts_with(b"x1,x2,y\n"));
        assert_eq!(parse_training_csv(&bytes).unwrap(), set);
    }

    #[test]
    fn training_csv_rejects_bad_header() {
        assert!(parse_training_csv(b"a,b\n1,2\n").is_err());
        assert!(parse_training_csv(b"x1,x2,y\n1,2\n").is_err());
        assert!(parse_training_csv(b"x1,y\n1,abc\n").is_err());
    }

    #[test]
    fn trace_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = make_instance(FunctionId::Rastrigin, 2, 1).unwrap();
        let config =
            OptimizerConfig::new(Algorithm::Nm, Bounds::of_instance(&inst), 5).with_budget(64);
        let trace = run(&inst, &config)
            .unwrap()
            .with_instance(inst.descriptor());
        let path = dir.path().join("t.csv");
        write_trace(&path, &trace, &config).unwrap();
        assert_eq!(read_trace(&path).unwrap(), trace);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("evaluation_index,best_so_far\n1,"));
    }
}
