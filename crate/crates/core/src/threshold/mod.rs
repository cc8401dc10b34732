//! Estimators for the reconstruction threshold θ.
//!
//! Dot products `s_i · s_j` of a GLEE embedding cluster around `−1` (edges)
//! and `0` (non-edges). A pair is predicted to be an edge when its dot product
//! falls below θ. Three estimators work from the embedding alone (constant,
//! box-kernel density minimum, reweighted two-component mixture); the oracle
//! needs the true graph and is used for evaluation only.

mod gmm;
mod kde;

pub use gmm::{
    equal_density_point, fit_bayesian_gmm, theta_gmm, theta_gmm_with, GmmConfig, TwoGaussianMixture,
};
pub use kde::{box_density, theta_kde, DEFAULT_BANDWIDTH, KDE_GRID_POINTS};

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::Serialize;

use crate::embed::Embedding;
use crate::error::{GleeError, Result};
use crate::graph::{pair_count, Graph};
use crate::reconstruct::LossProfile;
use crate::seed::rng_from_seed;

/// The fixed split-the-difference threshold.
pub const CONSTANT_THETA: f64 = -0.5;
/// Default cap on the number of dot products collected.
pub const DEFAULT_MAX_PAIRS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Constant,
    Kde,
    Gmm,
    Oracle,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Constant => "constant",
            EstimatorKind::Kde => "kde",
            EstimatorKind::Gmm => "gmm",
            EstimatorKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = GleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(EstimatorKind::Constant),
            "kde" => Ok(EstimatorKind::Kde),
            "gmm" => Ok(EstimatorKind::Gmm),
            "oracle" => Ok(EstimatorKind::Oracle),
            other => Err(GleeError::InvalidArgument(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Extra information an estimator reports next to θ.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Set when the estimator gave up and returned the constant threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_at_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_weights: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reweighted: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub means: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variances: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub theta: f64,
    pub method: EstimatorKind,
    pub diagnostics: Diagnostics,
}

impl ThresholdEstimate {
    /// A bare threshold, clamped to `[-1, 0]`.
    pub fn new(theta: f64, method: EstimatorKind) -> Self {
        Self {
            theta: theta.clamp(-1.0, 0.0),
            method,
            diagnostics: Diagnostics::default(),
        }
    }

    pub(crate) fn fallback(method: EstimatorKind, reason: impl Into<String>) -> Self {
        Self {
            theta: CONSTANT_THETA,
            method,
            diagnostics: Diagnostics {
                fallback: Some(reason.into()),
                ..Diagnostics::default()
            },
        }
    }

    pub fn is_fallback(&self) -> bool {
        self.diagnostics.fallback.is_some()
    }
}

/// Pairwise dot products `{s_i · s_j : i < j}` or a uniform subsample.
#[derive(Debug, Clone, PartialEq)]
pub struct DotProductSample {
    pub values: Vec<f64>,
    pub node_count: usize,
    /// `n choose 2`.
    pub pair_count: usize,
    pub sampled: bool,
}

impl DotProductSample {
    pub fn from_values(values: Vec<f64>, node_count: usize) -> Self {
        let pairs = pair_count(node_count);
        Self {
            sampled: values.len() < pairs,
            values,
            node_count,
            pair_count: pairs,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All dot products `s_i · s_j`, `i < j`, in lexicographic pair order.
pub fn all_pair_dots(e: &Embedding) -> Vec<f64> {
    let n = e.node_count();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (i + 1..n).map(move |j| e.dot(i, j)))
        .collect()
}

/// Maps a lexicographic upper-triangle index to its pair `(i, j)`, `i < j`.
pub fn pair_from_index(n: usize, index: usize) -> (usize, usize) {
    // row i starts at i*n - i*(i+1)/2
    let row_start = |i: usize| i * n - i * (i + 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * index as f64;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor() as usize;
    i = i.min(n.saturating_sub(2));
    while i > 0 && row_start(i) > index {
        i -= 1;
    }
    while i + 1 < n && row_start(i + 1) <= index {
        i += 1;
    }
    (i, i + 1 + index - row_start(i))
}

/// Collects every pair's dot product when there are at most `max_pairs`
/// pairs, otherwise a uniform sample of `max_pairs` pairs drawn without
/// replacement (deterministic in `seed`).
pub fn collect_dot_products(e: &Embedding, max_pairs: usize, seed: u64) -> DotProductSample {
    let n = e.node_count();
    let total = pair_count(n);
    if total <= max_pairs.max(1) {
        return DotProductSample {
            values: all_pair_dots(e),
            node_count: n,
            pair_count: total,
            sampled: false,
        };
    }
    let mut rng = rng_from_seed(seed);
    let mut picked = sample_indices(&mut rng, total, max_pairs.max(1)).into_vec();
    picked.sort_unstable();
    let values = picked
        .par_iter()
        .map(|&p| {
            let (i, j) = pair_from_index(n, p);
            e.dot(i, j)
        })
        .collect();
    DotProductSample {
        values,
        node_count: n,
        pair_count: total,
        sampled: true,
    }
}

pub fn theta_constant() -> ThresholdEstimate {
    ThresholdEstimate::new(CONSTANT_THETA, EstimatorKind::Constant)
}

/// How the GMM estimator estimates the edge count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MHat {
    /// Number of dot products below the constant threshold, scaled up when
    /// the sample is a subsample.
    BelowConstant,
    /// `n ln n`.
    NLogN,
    Fixed(f64),
}

impl FromStr for MHat {
    type Err = GleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" | "r" => Ok(MHat::BelowConstant),
            "nlogn" => Ok(MHat::NLogN),
            other => other
                .parse::<u64>()
                .map(|v| MHat::Fixed(v as f64))
                .map_err(|_| GleeError::InvalidArgument(format!("bad m-hat `{other}`"))),
        }
    }
}

impl MHat {
    pub fn resolve(self, sample: &DotProductSample) -> f64 {
        match self {
            MHat::BelowConstant => m_hat_default(sample) as f64,
            MHat::NLogN => {
                let n = sample.node_count as f64;
                if n > 1.0 {
                    n * n.ln()
                } else {
                    0.0
                }
            }
            MHat::Fixed(v) => v,
        }
    }
}

/// Count of dot products below −0.5, scaled by `pair_count / |values|`.
pub fn m_hat_default(sample: &DotProductSample) -> u64 {
    let below = sample.values.iter().filter(|&&v| v < CONSTANT_THETA).count();
    if sample.values.is_empty() {
        return 0;
    }
    let scale = sample.pair_count as f64 / sample.values.len() as f64;
    (below as f64 * scale).round() as u64
}

/// The Frobenius-optimal threshold, found by sweeping every distinct
/// breakpoint of the piecewise-constant loss. Requires the true graph.
pub fn theta_oracle(e: &Embedding, g: &Graph) -> Result<ThresholdEstimate> {
    let profile = LossProfile::new(e, g)?;
    Ok(theta_oracle_from_profile(&profile))
}

pub fn theta_oracle_from_profile(profile: &LossProfile) -> ThresholdEstimate {
    let sorted = profile.sorted_dots();
    let mut candidates = vec![-1.0, 0.0, CONSTANT_THETA];
    candidates.extend(
        sorted
            .windows(2)
            .filter(|w| w[0] < w[1])
            .map(|w| 0.5 * (w[0] + w[1]))
            .filter(|t| (-1.0..=0.0).contains(t)),
    );
    let mut best = (f64::INFINITY, CONSTANT_THETA);
    for &t in &candidates {
        let loss = profile.loss(t);
        let better = loss < best.0
            || (loss == best.0 && (t - CONSTANT_THETA).abs() < (best.1 - CONSTANT_THETA).abs());
        if better {
            best = (loss, t);
        }
    }
    let mut est = ThresholdEstimate::new(best.1, EstimatorKind::Oracle);
    est.diagnostics.loss = Some(best.0);
    est
}
