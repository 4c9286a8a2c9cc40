//! Scaled-performance error between model-based and ground-truth runs.
//!
//! Each best-so-far trace is min-max scaled to [0, 1] on its own, so only
//! the shape of the convergence curve is compared, never raw values.
//! Aggregation over instances uses type-7 quantiles (linear interpolation
//! between order statistics).

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::{Algorithm, RunTrace};
use crate::testbed::FunctionId;

/// Which function an optimizer run was evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Groundtruth,
    Estimation,
    Simulation,
    /// Unconditional spectral simulation; not part of the default comparison.
    Unconditional,
}

impl Source {
    pub const ALL: [Source; 4] = [
        Source::Groundtruth,
        Source::Estimation,
        Source::Simulation,
        Source::Unconditional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Groundtruth => "groundtruth",
            Source::Estimation => "estimation",
            Source::Simulation => "simulation",
            Source::Unconditional => "unconditional",
        }
    }

    pub fn is_model(self) -> bool {
        self != Source::Groundtruth
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Source::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown source `{s}`")))
    }
}

/// Identifies a family of error curves that is aggregated over instances.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveKey {
    pub function: FunctionId,
    pub dimension: usize,
    pub algorithm: Algorithm,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub key: CurveKey,
    pub instance: usize,
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub key: CurveKey,
    pub instances: usize,
    pub median: Vec<f64>,
    pub q1: Vec<f64>,
    pub q3: Vec<f64>,
}

impl AggregateCurve {
    /// Mean of the median curve over all evaluations.
    pub fn time_averaged_median(&self) -> f64 {
        mean(&self.median)
    }
}

/// Min-max scales `values`; a constant sequence maps to zeros.
pub fn scale_values(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if !(range > 0.0) || !range.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - min) / range).collect()
}

pub fn scale_performance(trace: &RunTrace) -> Result<Vec<f64>> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("cannot scale an empty trace".into()));
    }
    Ok(scale_values(&trace.best_so_far))
}

/// Pointwise `|scale(model) - scale(truth)|`.
pub fn performance_error(model: &RunTrace, truth: &RunTrace) -> Result<Vec<f64>> {
    if model.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "budget mismatch: model trace has {} evaluations, ground truth {}",
            model.len(),
            truth.len()
        )));
    }
    let a = scale_performance(model)?;
    let b = scale_performance(truth)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect())
}

impl ErrorCurve {
    pub fn from_traces(
        key: CurveKey,
        instance: usize,
        model: &RunTrace,
        truth: &RunTrace,
    ) -> Result<Self> {
        Ok(Self {
            key,
            instance,
            errors: performance_error(model, truth)?,
        })
    }

    pub fn time_average(&self) -> f64 {
        mean(&self.errors)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = LongWriter::new(writer)?;
        w.series(&self.key, "error", &self.errors)?;
        w.finish()
    }

    /// Reads a curve written by [`ErrorCurve::write_csv`].
    pub fn read_csv<R: Read>(reader: R, instance: usize) -> Result<Self> {
        let mut key = None;
        let mut errors = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: LongRow = row?;
            if row.statistic != "error" {
                continue;
            }
            let k = row.key()?;
            match &key {
                None => key = Some(k),
                Some(existing) if *existing != k => {
                    return Err(Error::InvalidInput("mixed curves in one error file".into()))
                }
                _ => {}
            }
            if row.evaluation_index != errors.len() + 1 {
                return Err(Error::InvalidInput(format!(
                    "non-contiguous evaluation index {}",
                    row.evaluation_index
                )));
            }
            errors.push(row.value);
        }
        let key = key.ok_or_else(|| Error::InvalidInput("empty error curve file".into()))?;
        Ok(Self {
            key,
            instance,
            errors,
        })
    }
}

/// Type-7 quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Pointwise median and quartiles of equally long curves.
pub fn quartiles(curves: &[&[f64]]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidInput("nothing to aggregate".into()))?;
    let len = first.len();
    if let Some(c) = curves.iter().find(|c| c.len() != len) {
        return Err(Error::InvalidInput(format!(
            "curve length mismatch: {} vs {len}",
            c.len()
        )));
    }
    let mut median = Vec::with_capacity(len);
    let mut q1 = Vec::with_capacity(len);
    let mut q3 = Vec::with_capacity(len);
    let mut column = Vec::with_capacity(curves.len());
    for t in 0..len {
        column.clear();
        column.extend(curves.iter().map(|c| c[t]));
        column.sort_by(f64::total_cmp);
        q1.push(quantile_sorted(&column, 0.25));
        median.push(quantile_sorted(&column, 0.5));
        q3.push(quantile_sorted(&column, 0.75));
    }
    Ok((median, q1, q3))
}

pub fn aggregate(curves: &[ErrorCurve]) -> Result<AggregateCurve> {
    let key = curves
        .first()
        .map(|c| c.key.clone())
        .ok_or_else(|| Error::InvalidInput("nothing to aggregate".into()))?;
    if curves.iter().any(|c| c.key != key) {
        return Err(Error::InvalidInput(
            "cannot aggregate curves of different runs".into(),
        ));
    }
    let slices: Vec<&[f64]> = curves.iter().map(|c| c.errors.as_slice()).collect();
    let (median, q1, q3) = quartiles(&slices)?;
    Ok(AggregateCurve {
        key,
        instances: curves.len(),
        median,
        q1,
        q3,
    })
}

/// Writes aggregate curves in long format, one row per (evaluation, statistic).
pub fn write_aggregates_csv<W: Write>(writer: W, curves: &[AggregateCurve]) -> Result<()> {
    let mut w = LongWriter::new(writer)?;
    for c in curves {
        w.series(&c.key, "median", &c.median)?;
        w.series(&c.key, "q1", &c.q1)?;
        w.series(&c.key, "q3", &c.q3)?;
    }
    w.finish()
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Serialize, Deserialize)]
struct LongRow {
    evaluation_index: usize,
    value: f64,
    statistic: String,
    algorithm: Algorithm,
    function: FunctionId,
    dimension: usize,
    source: Source,
}

impl LongRow {
    fn key(&self) -> Result<CurveKey> {
        Ok(CurveKey {
            function: self.function,
            dimension: self.dimension,
            algorithm: self.algorithm,
            source: self.source,
        })
    }
}

struct LongWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> LongWriter<W> {
    fn new(writer: W) -> Result<Self> {
        Ok(Self {
            inner: csv::Writer::from_writer(writer),
        })
    }

    fn series(&mut self, key: &CurveKey, statistic: &str, values: &[f64]) -> Result<()> {
        for (i, v) in values.iter().enumerate() {
            self.inner.serialize(LongRow {
                evaluation_index: i + 1,
                value: *v,
                statistic: statistic.to_string(),
                algorithm: key.algorithm,
                function: key.function,
                dimension: key.dimension,
                source: key.source,
            })?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io("<csv>", e))
    }
}
