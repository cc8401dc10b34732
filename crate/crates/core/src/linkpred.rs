//! Link prediction from embedding geometry.
//!
//! With the exact simplex embedding, dot products of node-set centroids
//! count the edges between the sets. That turns common-neighbor counts and
//! length-3 walk counts into centroid expressions; with a truncated
//! embedding, degrees are estimated by squared row norms and neighborhoods
//! by thresholded dot products.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::embed::{dot, glee_embed, le_embed, Embedding};
use crate::error::{GleeError, Result};
use crate::graph::Graph;
use crate::report::{EvalReport, ReportParams, SeriesPoint};
use crate::seed::{derive_seed, rng_from_seed, STREAM_EMBED, STREAM_NEGATIVES, STREAM_SPLIT};
use crate::threshold::{
    collect_dot_products, theta_constant, theta_gmm, theta_kde, theta_oracle, EstimatorKind, MHat,
    ThresholdEstimate, DEFAULT_BANDWIDTH, DEFAULT_MAX_PAIRS,
};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.75;

/// A train/test edge split whose training graph is connected and spans
/// every node.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub g_train: Graph,
    pub e_test: Vec<(usize, usize)>,
    pub seed: u64,
}

/// Uniform spanning tree by Wilson's algorithm (loop-erased random walks).
fn uniform_spanning_tree(g: &Graph, rng: &mut crate::seed::Rng) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    let root = rng.random_range(0..n);
    in_tree[root] = true;
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = g.neighbors(u);
            next[u] = nbrs[rng.random_range(0..nbrs.len())];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            let v = next[u];
            tree.push((u.min(v), u.max(v)));
            u = v;
        }
    }
    tree
}

/// Splits edges into train and test so that `|E_train| = round(f · m)`.
/// A uniform spanning tree is placed in the training set first; the rest
/// of the training edges are drawn uniformly from the remaining edges.
pub fn split_graph(g: &Graph, train_fraction: f64, seed: u64) -> Result<SplitDataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(GleeError::InvalidArgument(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    if !g.is_connected() {
        return Err(GleeError::Precondition("split needs a connected graph".into()));
    }
    let n = g.node_count();
    let m = g.edge_count();
    let target = (train_fraction * m as f64).round() as usize;
    if target < n - 1 {
        return Err(GleeError::Precondition(format!(
            "{target} training edges cannot keep {n} nodes connected"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut train = uniform_spanning_tree(g, &mut rng);
    train.sort_unstable();
    let mut rest: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| train.binary_search(e).is_err())
        .collect();
    rest.shuffle(&mut rng);
    let extra = target - train.len();
    train.extend_from_slice(&rest[..extra]);
    let mut e_test = rest[extra..].to_vec();
    e_test.sort_unstable();
    Ok(SplitDataset {
        g_train: Graph::from_edges(n, train)?,
        e_test,
        seed,
    })
}

/// `−|V₁||V₂| C_{V₁} · C_{V₂}`: the number of edges between two disjoint
/// node sets when `e` is the full-dimensional embedding.
pub fn centroid_edge_count(e: &Embedding, v1: &[usize], v2: &[usize]) -> Result<f64> {
    if v1.is_empty() || v2.is_empty() {
        return Err(GleeError::InvalidArgument("node sets must be nonempty".into()));
    }
    let first: HashSet<usize> = v1.iter().copied().collect();
    if v2.iter().any(|v| first.contains(v)) {
        return Err(GleeError::InvalidArgument("node sets overlap".into()));
    }
    let s1 = row_sum(e, v1);
    let s2 = row_sum(e, v2);
    // |V1||V2| C1·C2 = (Σ s_i)·(Σ s_j)
    Ok(-dot(&s1, &s2))
}

fn row_sum(e: &Embedding, nodes: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; e.dim()];
    for &k in nodes {
        for (a, x) in acc.iter_mut().zip(e.row(k)) {
            *a += x;
        }
    }
    acc
}

/// `N̂(i) = {k : s_k · s_i < θ}` with its centroid and estimated degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxNeighborhood {
    pub node: usize,
    pub members: Vec<usize>,
    /// Mean of member rows; `None` when there are no members.
    pub centroid: Option<Vec<f64>>,
    /// `‖s_i‖²`.
    pub deg_hat: f64,
}

impl ApproxNeighborhood {
    pub fn build(e: &Embedding, node: usize, theta: f64) -> Self {
        let members: Vec<usize> = (0..e.node_count())
            .filter(|&k| k != node && e.dot(k, node) < theta)
            .collect();
        let centroid = (!members.is_empty()).then(|| {
            let mut c = row_sum(e, &members);
            let inv = 1.0 / members.len() as f64;
            c.iter_mut().for_each(|x| *x *= inv);
            c
        });
        Self {
            node,
            deg_hat: e.squared_norm(node),
            members,
            centroid,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Which endpoint's neighborhood supplies the centroid in the CN score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CnSide {
    /// The endpoint with fewer estimated neighbors (the first on ties).
    #[default]
    Smaller,
    /// Mean of both one-sided forms.
    Average,
}

fn cn_one_side(e: &Embedding, side: &ApproxNeighborhood, other: usize) -> f64 {
    match &side.centroid {
        Some(c) => -side.deg_hat * dot(c, e.row(other)),
        None => 0.0,
    }
}

fn cn_from(e: &Embedding, ni: &ApproxNeighborhood, nj: &ApproxNeighborhood, mode: CnSide) -> f64 {
    match mode {
        CnSide::Smaller => {
            if nj.len() < ni.len() {
                cn_one_side(e, nj, ni.node)
            } else {
                cn_one_side(e, ni, nj.node)
            }
        }
        CnSide::Average => 0.5 * (cn_one_side(e, ni, nj.node) + cn_one_side(e, nj, ni.node)),
    }
}

fn l3_from(e: &Embedding, ni: &ApproxNeighborhood, nj: &ApproxNeighborhood) -> f64 {
    let (Some(ci), Some(cj)) = (&ni.centroid, &nj.centroid) else {
        return 0.0;
    };
    let mut shared = 0.0;
    let (mut a, mut b) = (0, 0);
    while a < ni.members.len() && b < nj.members.len() {
        match ni.members[a].cmp(&nj.members[b]) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                shared += e.squared_norm(ni.members[a]);
                a += 1;
                b += 1;
            }
        }
    }
    -ni.deg_hat * nj.deg_hat * dot(ci, cj) + shared
}

/// Approximate common-neighbor count `−‖s_i‖² C_{N̂(i)} · s_j`, taking the
/// centroid on the endpoint with the smaller estimated neighborhood.
pub fn cn_score(e: &Embedding, i: usize, j: usize, theta: &ThresholdEstimate) -> f64 {
    cn_score_with(e, i, j, theta, CnSide::Smaller)
}

pub fn cn_score_with(e: &Embedding, i: usize, j: usize, theta: &ThresholdEstimate, mode: CnSide) -> f64 {
    let ni = ApproxNeighborhood::build(e, i, theta.theta);
    let nj = ApproxNeighborhood::build(e, j, theta.theta);
    cn_from(e, &ni, &nj, mode)
}

/// Approximate length-3 walk count
/// `−deg(i) deg(j) C_{N̂(i)} · C_{N̂(j)} + Σ_{k ∈ N̂(i) ∩ N̂(j)} ‖s_k‖²`.
pub fn l3_score(e: &Embedding, i: usize, j: usize, theta: &ThresholdEstimate) -> f64 {
    let ni = ApproxNeighborhood::build(e, i, theta.theta);
    let nj = ApproxNeighborhood::build(e, j, theta.theta);
    l3_from(e, &ni, &nj)
}

/// Estimated neighborhoods of every node, for scoring many pairs.
#[derive(Debug, Clone)]
pub struct NeighborhoodIndex<'a> {
    embedding: &'a Embedding,
    hoods: Vec<ApproxNeighborhood>,
}

impl<'a> NeighborhoodIndex<'a> {
    pub fn build(e: &'a Embedding, theta: &ThresholdEstimate) -> Self {
        let hoods = (0..e.node_count())
            .into_par_iter()
            .map(|i| ApproxNeighborhood::build(e, i, theta.theta))
            .collect();
        Self { embedding: e, hoods }
    }

    pub fn neighborhood(&self, i: usize) -> &ApproxNeighborhood {
        &self.hoods[i]
    }

    pub fn cn(&self, i: usize, j: usize, mode: CnSide) -> f64 {
        cn_from(self.embedding, &self.hoods[i], &self.hoods[j], mode)
    }

    pub fn l3(&self, i: usize, j: usize) -> f64 {
        l3_from(self.embedding, &self.hoods[i], &self.hoods[j])
    }
}

/// Mann-Whitney AUC: `P(pos > neg) + ½ P(pos = neg)`.
pub fn auc(scores_pos: &[f64], scores_neg: &[f64]) -> Result<f64> {
    if scores_pos.is_empty() || scores_neg.is_empty() {
        return Err(GleeError::InvalidArgument("AUC needs nonempty score lists".into()));
    }
    let mut all: Vec<(f64, bool)> = scores_pos
        .iter()
        .map(|&s| (s, true))
        .chain(scores_neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // sum of midranks of the positives
    let mut rank_sum = 0.0;
    let mut k = 0;
    while k < all.len() {
        let mut end = k;
        while end + 1 < all.len() && all[end + 1].0 == all[k].0 {
            end += 1;
        }
        let midrank = 0.5 * ((k + 1) + (end + 1)) as f64;
        rank_sum += midrank * all[k..=end].iter().filter(|p| p.1).count() as f64;
        k = end + 1;
    }
    let (p, q) = (scores_pos.len() as f64, scores_neg.len() as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMethod {
    Cn,
    L3,
    /// Laplacian eigenmaps, scored by negative Euclidean distance.
    LeDistance,
}

impl fmt::Display for LinkMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkMethod::Cn => "cn",
            LinkMethod::L3 => "l3",
            LinkMethod::LeDistance => "le",
        })
    }
}

impl FromStr for LinkMethod {
    type Err = GleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cn" => Ok(LinkMethod::Cn),
            "l3" => Ok(LinkMethod::L3),
            "le" | "le-distance" => Ok(LinkMethod::LeDistance),
            other => Err(GleeError::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinkPredConfig {
    pub dim: usize,
    pub method: LinkMethod,
    pub trials: usize,
    pub seed: u64,
    pub train_fraction: f64,
    /// Threshold estimator used to form the approximate neighborhoods.
    pub estimator: EstimatorKind,
    pub bandwidth: f64,
    pub m_hat: MHat,
    pub cn_side: CnSide,
    pub max_pairs: usize,
}

impl LinkPredConfig {
    pub fn new(dim: usize, method: LinkMethod, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            method,
            trials,
            seed,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            estimator: EstimatorKind::Kde,
            bandwidth: DEFAULT_BANDWIDTH,
            m_hat: MHat::BelowConstant,
            cn_side: CnSide::Smaller,
            max_pairs: DEFAULT_MAX_PAIRS,
        }
    }
}

/// Estimates θ for an embedding with the configured estimator. The oracle
/// uses `truth`.
pub fn estimate_theta(
    e: &Embedding,
    truth: &Graph,
    estimator: EstimatorKind,
    bandwidth: f64,
    m_hat: MHat,
    max_pairs: usize,
    seed: u64,
) -> Result<ThresholdEstimate> {
    match estimator {
        EstimatorKind::Constant => Ok(theta_constant()),
        EstimatorKind::Kde => {
            let sample = collect_dot_products(e, max_pairs, seed);
            theta_kde(&sample, bandwidth)
        }
        EstimatorKind::Gmm => {
            let sample = collect_dot_products(e, max_pairs, seed);
            match theta_gmm(&sample, m_hat, seed) {
                Err(GleeError::Precondition(reason)) => {
                    Ok(ThresholdEstimate::fallback(EstimatorKind::Gmm, reason))
                }
                other => other,
            }
        }
        EstimatorKind::Oracle => theta_oracle(e, truth),
    }
}

/// `count` distinct non-edges of `g`, uniform and sorted.
pub fn sample_non_edges(g: &Graph, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let available = g.pair_count() - g.edge_count();
    if count >= available {
        return (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.has_edge(i, j))
            .collect();
    }
    let mut rng = rng_from_seed(seed);
    let mut picked = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let pair = (i.min(j), i.max(j));
        if !g.has_edge(pair.0, pair.1) && picked.insert(pair) {
            out.push(pair);
        }
    }
    out.sort_unstable();
    out
}

fn run_trial(g: &Graph, config: &LinkPredConfig, trial: usize) -> Result<f64> {
    let t = trial as u64;
    let split = split_graph(g, config.train_fraction, derive_seed(config.seed, &[STREAM_SPLIT, t]))?;
    if split.e_test.is_empty() {
        return Err(GleeError::Precondition("split left no test edges".into()));
    }
    let negatives = sample_non_edges(
        g,
        split.e_test.len(),
        derive_seed(config.seed, &[STREAM_NEGATIVES, t]),
    );
    let embed_seed = derive_seed(config.seed, &[STREAM_EMBED, t]);

    let (pos, neg): (Vec<f64>, Vec<f64>) = match config.method {
        LinkMethod::LeDistance => {
            let e = le_embed(&split.g_train, config.dim)?;
            let score = |&(i, j): &(usize, usize)| -e.distance(i, j);
            (
                split.e_test.iter().map(score).collect(),
                negatives.iter().map(score).collect(),
            )
        }
        LinkMethod::Cn | LinkMethod::L3 => {
            let e = glee_embed(&split.g_train, config.dim, embed_seed)?;
            let theta = estimate_theta(
                &e,
                &split.g_train,
                config.estimator,
                config.bandwidth,
                config.m_hat,
                config.max_pairs,
                embed_seed,
            )?;
            let index = NeighborhoodIndex::build(&e, &theta);
            let score = |&(i, j): &(usize, usize)| match config.method {
                LinkMethod::Cn => index.cn(i, j, config.cn_side),
                _ => index.l3(i, j),
            };
            (
                split.e_test.iter().map(score).collect(),
                negatives.iter().map(score).collect(),
            )
        }
    };
    auc(&pos, &neg)
}

/// Repeated split / embed / score runs; one AUC per trial.
pub fn link_prediction_experiment(g: &Graph, config: &LinkPredConfig) -> Result<EvalReport> {
    if config.trials == 0 {
        return Err(GleeError::InvalidArgument("trials must be positive".into()));
    }
    let aucs = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(g, config, t))
        .collect::<Result<Vec<f64>>>()?;
    let label = format!("{}/d={}", config.method, config.dim);
    let mut params = ReportParams {
        dims: vec![config.dim],
        seed: Some(config.seed),
        trials: config.trials,
        ..ReportParams::default()
    };
    if config.method != LinkMethod::LeDistance {
        params.estimator = Some(config.estimator.to_string());
    }
    params.extra.insert("method".into(), config.method.to_string());
    params.extra.insert("train_fraction".into(), config.train_fraction.to_string());
    params.extra.insert("nodes".into(), g.node_count().to_string());
    params.extra.insert("edges".into(), g.edge_count().to_string());
    Ok(EvalReport::new(
        "link_prediction",
        params,
        vec![SeriesPoint::from_raw(label, config.dim as f64, aucs)],
    ))
}
