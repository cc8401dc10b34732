//! Threshold-estimator benchmark on random graphs: for every model,
//! dimension and trial, the adjacency reconstruction error `‖A − Â‖_F` of
//! each estimator.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::embed::glee_embed;
use crate::error::{GleeError, Result};
use crate::generators::{generate, GeneratorSpec};
use crate::graph::Graph;
use crate::reconstruct::LossProfile;
use crate::report::{min_max_normalize, EvalReport, ReportParams, SeriesPoint};
use crate::seed::{derive_seed, STREAM_DOT_SAMPLE, STREAM_EMBED, STREAM_GENERATE, STREAM_GMM};
use crate::threshold::{
    all_pair_dots, collect_dot_products, theta_constant, theta_gmm, theta_kde, EstimatorKind, MHat,
    ThresholdEstimate, DEFAULT_BANDWIDTH, DEFAULT_MAX_PAIRS,
};

pub const BENCH_ESTIMATORS: [EstimatorKind; 3] =
    [EstimatorKind::Constant, EstimatorKind::Kde, EstimatorKind::Gmm];

pub const DEFAULT_BENCH_DIMS: [usize; 3] = [32, 128, 512];

/// An embedding dimension; `Full` means the node count of each graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchDim {
    Fixed(usize),
    Full,
}

impl BenchDim {
    /// Dimension used for a graph on `n` nodes; fixed dimensions above `n`
    /// are capped at `n`.
    pub fn resolve(self, n: usize) -> usize {
        match self {
            BenchDim::Fixed(d) => d.min(n),
            BenchDim::Full => n,
        }
    }
}

impl fmt::Display for BenchDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchDim::Fixed(d) => write!(f, "{d}"),
            BenchDim::Full => f.write_str("n"),
        }
    }
}

impl FromStr for BenchDim {
    type Err = GleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n" | "full" => Ok(BenchDim::Full),
            t => match t.parse::<usize>() {
                Ok(d) if d > 0 => Ok(BenchDim::Fixed(d)),
                _ => Err(GleeError::InvalidArgument(format!("bad dimension `{t}`"))),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub models: Vec<GeneratorSpec>,
    pub dims: Vec<BenchDim>,
    pub trials: usize,
    pub seed: u64,
    pub bandwidth: f64,
    pub m_hat: MHat,
    pub max_pairs: usize,
}

impl BenchConfig {
    pub fn new(models: Vec<GeneratorSpec>, dims: Vec<BenchDim>, trials: usize, seed: u64) -> Self {
        Self {
            models,
            dims,
            trials,
            seed,
            bandwidth: DEFAULT_BANDWIDTH,
            m_hat: MHat::BelowConstant,
            max_pairs: DEFAULT_MAX_PAIRS,
        }
    }
}

/// Errors of one generated graph: `errors[dim][estimator]`.
struct TrialOutcome {
    nodes: usize,
    errors: Vec<[f64; 3]>,
}

fn estimate(
    kind: EstimatorKind,
    sample: &crate::threshold::DotProductSample,
    config: &BenchConfig,
    gmm_seed: u64,
) -> Result<ThresholdEstimate> {
    match kind {
        EstimatorKind::Kde => theta_kde(sample, config.bandwidth),
        EstimatorKind::Gmm => match theta_gmm(sample, config.m_hat, gmm_seed) {
            Err(GleeError::Precondition(reason)) => {
                Ok(ThresholdEstimate::fallback(EstimatorKind::Gmm, reason))
            }
            other => other,
        },
        _ => Ok(theta_constant()),
    }
}

fn pair_labels(g: &Graph) -> Vec<bool> {
    let n = g.node_count();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| g.has_edge(i, j)))
        .collect()
}

fn run_trial(config: &BenchConfig, model: usize, trial: usize) -> Result<TrialOutcome> {
    let (mi, t) = (model as u64, trial as u64);
    let spec = config.models[model]
        .clone()
        .with_seed(derive_seed(config.seed, &[STREAM_GENERATE, mi, t]));
    let g = generate(&spec)?;
    let n = g.node_count();
    let d_max = config.dims.iter().map(|d| d.resolve(n)).max().unwrap_or(1);
    // one decomposition per graph, truncated for each requested dimension
    let full = glee_embed(&g, d_max, derive_seed(config.seed, &[STREAM_EMBED, mi, t]))?;
    let labels = pair_labels(&g);

    let mut errors = Vec::with_capacity(config.dims.len());
    for (di, dim) in config.dims.iter().enumerate() {
        let e = full.truncated(dim.resolve(n))?;
        let profile = LossProfile::from_labeled(all_pair_dots(&e), labels.clone());
        let path = [mi, t, di as u64];
        let sample = collect_dot_products(
            &e,
            config.max_pairs,
            derive_seed(config.seed, &[&[STREAM_DOT_SAMPLE][..], &path].concat()),
        );
        let gmm_seed = derive_seed(config.seed, &[&[STREAM_GMM][..], &path].concat());
        let mut row = [0.0; 3];
        for (slot, kind) in row.iter_mut().zip(BENCH_ESTIMATORS) {
            let theta = estimate(kind, &sample, config, gmm_seed)?;
            *slot = profile.loss(theta.theta).sqrt();
        }
        errors.push(row);
    }
    Ok(TrialOutcome { nodes: n, errors })
}

/// Runs every (model, trial) graph in parallel and aggregates per
/// (model, dimension, estimator). Each point carries the raw per-trial
/// errors and their min-max normalization within the (model, dimension)
/// group.
pub fn estimator_benchmark(config: &BenchConfig) -> Result<EvalReport> {
    if config.trials == 0 {
        return Err(GleeError::InvalidArgument("trials must be positive".into()));
    }
    if config.models.is_empty() || config.dims.is_empty() {
        return Err(GleeError::InvalidArgument("need at least one model and one dimension".into()));
    }
    for spec in &config.models {
        spec.validate()?;
    }
    let jobs: Vec<(usize, usize)> = (0..config.models.len())
        .flat_map(|m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(m, t)| run_trial(config, m, t))
        .collect::<Result<Vec<_>>>()?;

    let mut series = Vec::new();
    for (mi, spec) in config.models.iter().enumerate() {
        let runs = &outcomes[mi * config.trials..(mi + 1) * config.trials];
        for (di, dim) in config.dims.iter().enumerate() {
            let x = match dim {
                BenchDim::Fixed(d) => *d as f64,
                BenchDim::Full => runs.iter().map(|r| r.nodes as f64).sum::<f64>() / runs.len() as f64,
            };
            let per_estimator: Vec<Vec<f64>> = (0..BENCH_ESTIMATORS.len())
                .map(|k| runs.iter().map(|r| r.errors[di][k]).collect())
                .collect();
            let pooled: Vec<f64> = per_estimator.iter().flatten().copied().collect();
            let normalized = min_max_normalize(&pooled);
            for (k, kind) in BENCH_ESTIMATORS.iter().enumerate() {
                let label = format!("{}/d={}/{}", spec.model, dim, kind);
                let mut point = SeriesPoint::from_raw(label, x, per_estimator[k].clone());
                let norm = normalized[k * config.trials..(k + 1) * config.trials].to_vec();
                point.normalized_mean = Some(norm.iter().sum::<f64>() / norm.len() as f64);
                point.normalized_raw = Some(norm);
                series.push(point);
            }
        }
    }

    let mut params = ReportParams {
        model: Some(
            config
                .models
                .iter()
                .map(|m| m.model.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        dims: config
            .dims
            .iter()
            .filter_map(|d| match d {
                BenchDim::Fixed(d) => Some(*d),
                BenchDim::Full => None,
            })
            .collect(),
        seed: Some(config.seed),
        estimator: Some(
            BENCH_ESTIMATORS
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        trials: config.trials,
        ..ReportParams::default()
    };
    let first = &config.models[0];
    params.extra.insert("n".into(), first.n.to_string());
    params.extra.insert("mean_degree".into(), first.target_mean_degree.to_string());
    params.extra.insert("gamma".into(), first.gamma.to_string());
    params.extra.insert("bandwidth".into(), config.bandwidth.to_string());
    params.extra.insert(
        "dims_requested".into(),
        config.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
    );
    params.extra.insert("error_bars".into(), "2*std".into());
    Ok(EvalReport::new("estimator_benchmark", params, series))
}
