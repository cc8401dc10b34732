//! Report types shared by the evaluation harnesses and the CLI.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    #[serde(default)]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

/// One aggregated point of a curve, with the per-trial values behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub label: String,
    pub x: f64,
    pub mean: f64,
    pub std: f64,
    pub raw: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_raw: Option<Vec<f64>>,
}

impl SeriesPoint {
    pub fn from_raw(label: impl Into<String>, x: f64, raw: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&raw);
        Self {
            label: label.into(),
            x,
            mean,
            std,
            raw,
            normalized_mean: None,
            normalized_raw: None,
        }
    }

    pub fn single(label: impl Into<String>, x: f64, value: f64) -> Self {
        Self::from_raw(label, x, vec![value])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub experiment: String,
    pub params: ReportParams,
    pub series: Vec<SeriesPoint>,
}

impl EvalReport {
    pub fn new(experiment: impl Into<String>, params: ReportParams, series: Vec<SeriesPoint>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            params,
            series,
        }
    }

    pub fn point(&self, label: &str) -> Option<&SeriesPoint> {
        self.series.iter().find(|p| p.label == label)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Flat CSV: `label,x,mean,std,normalized_mean,trial,value`, one row per
    /// raw value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "x", "mean", "std", "normalized_mean", "trial", "value"])?;
        for p in &self.series {
            let norm = p.normalized_mean.map(|v| v.to_string()).unwrap_or_default();
            for (t, v) in p.raw.iter().enumerate() {
                w.write_record([
                    p.label.clone(),
                    p.x.to_string(),
                    p.mean.to_string(),
                    p.std.to_string(),
                    norm.clone(),
                    t.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Arithmetic mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Maps the group minimum to 0 and maximum to 1; a constant group maps to 0.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}
