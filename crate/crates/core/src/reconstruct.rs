//! Graph reconstruction from a GLEE embedding.
//!
//! A pair `(i, j)` is predicted to be an edge when `s_i · s_j < θ`. Ranked
//! reconstruction orders pairs by ascending dot product: the more negative,
//! the more confident.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::embed::Embedding;
use crate::error::{GleeError, Result};
use crate::graph::{pair_count, Graph};
use crate::report::{EvalReport, ReportParams, SeriesPoint};
use crate::threshold::{all_pair_dots, ThresholdEstimate};

/// Rankings over more pairs than this are truncated.
pub const FULL_RANKING_MAX_PAIRS: usize = 5_000_000;
/// Minimum length of a truncated ranking.
pub const TRUNCATED_RANKING_MIN: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredPair {
    pub i: usize,
    pub j: usize,
    pub score: f64,
}

impl Eq for ScoredPair {}

impl Ord for ScoredPair {
    /// Ascending score, then `(i, j)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

impl PartialOrd for ScoredPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `limit` smallest pairs under `score`, sorted; all pairs when `limit`
/// is `None` or covers every pair.
pub fn rank_pairs_by<F>(n: usize, limit: Option<usize>, score: F) -> Vec<ScoredPair>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let total = pair_count(n);
    let row = |i: usize| (i + 1..n).map(move |j| (i, j));
    match limit {
        Some(limit) if limit < total => {
            let heap = (0..n)
                .into_par_iter()
                .fold(BinaryHeap::new, |mut heap: BinaryHeap<ScoredPair>, i| {
                    for (i, j) in row(i) {
                        let p = ScoredPair { i, j, score: score(i, j) };
                        if heap.len() < limit {
                            heap.push(p);
                        } else if p < *heap.peek().expect("non-empty heap") {
                            heap.pop();
                            heap.push(p);
                        }
                    }
                    heap
                })
                .reduce(BinaryHeap::new, |mut a, b| {
                    for p in b {
                        if a.len() < limit {
                            a.push(p);
                        } else if p < *a.peek().expect("non-empty heap") {
                            a.pop();
                            a.push(p);
                        }
                    }
                    a
                });
            heap.into_sorted_vec()
        }
        _ => {
            let mut all: Vec<ScoredPair> = (0..n)
                .into_par_iter()
                .flat_map_iter(|i| row(i).map(|(i, j)| ScoredPair { i, j, score: score(i, j) }))
                .collect();
            all.par_sort_unstable();
            all
        }
    }
}

/// Pairs by ascending dot product.
pub fn rank_pairs(e: &Embedding, limit: Option<usize>) -> Vec<ScoredPair> {
    rank_pairs_by(e.node_count(), limit, |i, j| e.dot(i, j))
}

/// Pairs by ascending Euclidean distance, for distance-based embeddings.
pub fn rank_pairs_by_distance(e: &Embedding, limit: Option<usize>) -> Vec<ScoredPair> {
    rank_pairs_by(e.node_count(), limit, |i, j| e.distance(i, j))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    pub predicted_edges: Vec<(usize, usize)>,
    pub ranked_pairs: Vec<ScoredPair>,
    pub theta_used: ThresholdEstimate,
    pub node_count: usize,
    /// Whether `ranked_pairs` stops short of all `n choose 2` pairs.
    pub truncated: bool,
}

pub fn reconstruct(e: &Embedding, theta: &ThresholdEstimate) -> ReconstructionResult {
    let n = e.node_count();
    let total = pair_count(n);
    let limit = if total <= FULL_RANKING_MAX_PAIRS {
        None
    } else {
        let predicted: usize = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).filter(|&j| e.dot(i, j) < theta.theta).count())
            .sum();
        Some((10 * predicted).max(TRUNCATED_RANKING_MIN))
    };
    reconstruct_with_limit(e, theta, limit)
}

/// Like [`reconstruct`] but with an explicit ranking length. The limit is
/// raised if needed so every predicted edge stays in the ranking.
pub fn reconstruct_with_limit(
    e: &Embedding,
    theta: &ThresholdEstimate,
    limit: Option<usize>,
) -> ReconstructionResult {
    let n = e.node_count();
    let mut ranked = rank_pairs(e, limit);
    let mut cut = ranked.partition_point(|p| p.score < theta.theta);
    if cut == ranked.len() && ranked.len() < pair_count(n) {
        // every ranked pair is below θ; fall back to the full ranking
        ranked = rank_pairs(e, None);
        cut = ranked.partition_point(|p| p.score < theta.theta);
    }
    let predicted_edges = ranked[..cut].iter().map(|p| (p.i, p.j)).collect();
    ReconstructionResult {
        predicted_edges,
        truncated: ranked.len() < pair_count(n),
        ranked_pairs: ranked,
        theta_used: theta.clone(),
        node_count: n,
    }
}

/// Off-diagonal squared Frobenius loss of the thresholded Laplacian,
/// `Σ_{i≠j} (L_ij − L̂_ij(θ))² = 2 (FP + FN)`.
pub fn reconstruction_loss(e: &Embedding, g: &Graph, theta: &ThresholdEstimate) -> Result<f64> {
    check_sizes(e, g)?;
    let n = e.node_count();
    let errors: usize = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| (e.dot(i, j) < theta.theta) != g.has_edge(i, j))
                .count()
        })
        .sum();
    Ok(2.0 * errors as f64)
}

/// `‖A − Â‖_F`, the adjacency-matrix view of the same error.
pub fn adjacency_frobenius_error(e: &Embedding, g: &Graph, theta: &ThresholdEstimate) -> Result<f64> {
    Ok(reconstruction_loss(e, g, theta)?.sqrt())
}

fn check_sizes(e: &Embedding, g: &Graph) -> Result<()> {
    if e.node_count() != g.node_count() {
        return Err(GleeError::Mismatch(format!(
            "embedding has {} nodes, graph has {}",
            e.node_count(),
            g.node_count()
        )));
    }
    Ok(())
}

/// Sorted dot products with cumulative edge counts, giving the loss at any θ
/// in `O(log n)`.
#[derive(Debug, Clone)]
pub struct LossProfile {
    sorted: Vec<f64>,
    /// `edges_before[k]` = true edges among the `k` smallest dot products.
    edges_before: Vec<usize>,
    edge_count: usize,
}

impl LossProfile {
    pub fn new(e: &Embedding, g: &Graph) -> Result<Self> {
        check_sizes(e, g)?;
        let n = e.node_count();
        let dots = all_pair_dots(e);
        let labels: Vec<bool> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| g.has_edge(i, j))
            .collect();
        Ok(Self::from_labeled(dots, labels))
    }

    /// Builds a profile from dot products and matching edge labels.
    pub fn from_labeled(dots: Vec<f64>, labels: Vec<bool>) -> Self {
        let mut pairs: Vec<(f64, bool)> = dots.into_iter().zip(labels).collect();
        pairs.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut edges_before = Vec::with_capacity(pairs.len() + 1);
        edges_before.push(0);
        let mut acc = 0;
        for &(_, is_edge) in &pairs {
            acc += usize::from(is_edge);
            edges_before.push(acc);
        }
        Self {
            sorted: pairs.iter().map(|p| p.0).collect(),
            edge_count: acc,
            edges_before,
        }
    }

    pub fn sorted_dots(&self) -> &[f64] {
        &self.sorted
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `(false positives, false negatives)` at θ.
    pub fn errors(&self, theta: f64) -> (usize, usize) {
        let k = self.sorted.partition_point(|&v| v < theta);
        let tp = self.edges_before[k];
        (k - tp, self.edge_count - tp)
    }

    pub fn loss(&self, theta: f64) -> f64 {
        let (fp, fn_) = self.errors(theta);
        2.0 * (fp + fn_) as f64
    }
}

/// Fraction of true edges among the first `k` ranked pairs, for each `k`.
pub fn precision_at_k(result: &ReconstructionResult, g: &Graph, ks: &[usize]) -> Result<EvalReport> {
    if result.node_count != g.node_count() {
        return Err(GleeError::Mismatch(format!(
            "reconstruction has {} nodes, graph has {}",
            result.node_count,
            g.node_count()
        )));
    }
    let curve = precision_curve(&result.ranked_pairs, g, ks)?;
    let series = ks
        .iter()
        .zip(curve)
        .map(|(&k, p)| SeriesPoint::single(format!("precision@{k}"), k as f64, p))
        .collect();
    Ok(EvalReport::new(
        "precision_at_k",
        ReportParams {
            estimator: Some(result.theta_used.method.to_string()),
            ..ReportParams::default()
        },
        series,
    ))
}

pub fn precision_curve(ranked: &[ScoredPair], g: &Graph, ks: &[usize]) -> Result<Vec<f64>> {
    let total = g.pair_count();
    for &k in ks {
        if k == 0 || k > total {
            return Err(GleeError::InvalidArgument(format!(
                "k = {k} outside 1..={total}"
            )));
        }
        if k > ranked.len() {
            return Err(GleeError::InvalidArgument(format!(
                "k = {k} exceeds the {} ranked pairs",
                ranked.len()
            )));
        }
    }
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let mut hits = Vec::with_capacity(max_k + 1);
    hits.push(0usize);
    for p in &ranked[..max_k] {
        let last = *hits.last().expect("non-empty");
        hits.push(last + usize::from(g.has_edge(p.i, p.j)));
    }
    Ok(ks.iter().map(|&k| hits[k] as f64 / k as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{glee_embed, EmbeddingMethod};
    use crate::threshold::theta_constant;

    #[test]
    fn single_edge_prediction() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let e = glee_embed(&g, 2, 0).unwrap();
        let r = reconstruct(&e, &theta_constant());
        assert_eq!(r.predicted_edges, vec![(0, 1)]);
        assert!(!r.truncated);
    }

    #[test]
    fn empty_graph_predicts_nothing() {
        let g = Graph::empty(3);
        let e = glee_embed(&g, 3, 0).unwrap();
        for t in [-0.9, -0.5, -0.01] {
            let r = reconstruct(&e, &ThresholdEstimate::new(t, crate::threshold::EstimatorKind::Constant));
            assert!(r.predicted_edges.is_empty());
        }
    }

    #[test]
    fn loss_counts_each_error_twice() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let zero = Embedding::zeros(4, 2, EmbeddingMethod::Glee);
        assert_eq!(reconstruction_loss(&zero, &g, &theta_constant()).unwrap(), 6.0);

        // exact embedding of the path minus edge (2,3) misses exactly one edge
        let missing = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let e = glee_embed(&missing, 4, 0).unwrap();
        assert_eq!(reconstruction_loss(&e, &g, &theta_constant()).unwrap(), 2.0);
    }

    #[test]
    fn loss_size_mismatch() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let e = Embedding::zeros(4, 2, EmbeddingMethod::Glee);
        assert!(matches!(
            reconstruction_loss(&e, &g, &theta_constant()),
            Err(GleeError::Mismatch(_))
        ));
    }

    #[test]
    fn ranking_ties_are_lexicographic() {
        let e = Embedding::zeros(4, 1, EmbeddingMethod::Glee);
        let r = rank_pairs(&e, None);
        let order: Vec<(usize, usize)> = r.iter().map(|p| (p.i, p.j)).collect();
        assert_eq!(order, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let top = rank_pairs(&e, Some(2));
        assert_eq!(top.len(), 2);
        assert_eq!((top[1].i, top[1].j), (0, 2));
    }

    #[test]
    fn truncated_ranking_is_a_prefix_of_the_full_one() {
        let n = 40;
        let data: Vec<f64> = (0..n * 3).map(|k| ((k * 7919) % 113) as f64 / 50.0 - 1.0).collect();
        let e = Embedding::from_rows(n, 3, data, vec![0.0; 3], EmbeddingMethod::Glee).unwrap();
        let full = rank_pairs(&e, None);
        let top = rank_pairs(&e, Some(57));
        assert_eq!(&full[..57], &top[..]);
        let limited = reconstruct_with_limit(&e, &theta_constant(), Some(5));
        let all = reconstruct_with_limit(&e, &theta_constant(), None);
        assert_eq!(limited.predicted_edges, all.predicted_edges);
    }

    #[test]
    fn precision_at_full_k_is_density() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let e = Embedding::zeros(5, 1, EmbeddingMethod::Glee);
        let r = reconstruct(&e, &theta_constant());
        let report = precision_at_k(&r, &g, &[10]).unwrap();
        assert!((report.series[0].mean - 0.3).abs() < 1e-15);
        assert!(precision_at_k(&r, &g, &[11]).is_err());
        assert!(precision_at_k(&r, &g, &[0]).is_err());
    }

    #[test]
    fn loss_profile_agrees_with_direct_loss() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]).unwrap();
        let e = glee_embed(&g, 3, 0).unwrap();
        let profile = LossProfile::new(&e, &g).unwrap();
        for k in 0..=20 {
            let t = -1.0 + k as f64 / 20.0;
            let est = ThresholdEstimate::new(t, crate::threshold::EstimatorKind::Constant);
            assert_eq!(profile.loss(t), reconstruction_loss(&e, &g, &est).unwrap());
        }
    }
}
