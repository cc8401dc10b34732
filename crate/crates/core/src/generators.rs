//! Random graph models: Erdős–Rényi, Barabási–Albert and threshold
//! hyperbolic graphs. Every generator returns the largest connected
//! component of the sampled graph.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{GleeError, Result};
use crate::graph::Graph;
use crate::seed::{rng_from_seed, Rng};

/// Bisection budget for the hyperbolic disk radius.
pub const HG_MAX_BISECTION_STEPS: usize = 50;
/// Accepted relative deviation of the hyperbolic mean degree from target.
pub const HG_DEGREE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphModel {
    Er,
    Ba,
    Hg,
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphModel::Er => "er",
            GraphModel::Ba => "ba",
            GraphModel::Hg => "hg",
        })
    }
}

impl FromStr for GraphModel {
    type Err = GleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(GraphModel::Er),
            "ba" => Ok(GraphModel::Ba),
            "hg" => Ok(GraphModel::Hg),
            other => Err(GleeError::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: GraphModel,
    pub n: usize,
    pub target_mean_degree: f64,
    /// Degree exponent; used by the hyperbolic model only.
    pub gamma: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: GraphModel, n: usize, target_mean_degree: f64, seed: u64) -> Self {
        Self {
            model,
            n,
            target_mean_degree,
            gamma: 2.3,
            seed,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(GleeError::InvalidArgument(format!("n = {} is below 2", self.n)));
        }
        let k = self.target_mean_degree;
        if !(k > 0.0 && k < (self.n - 1) as f64) {
            return Err(GleeError::InvalidArgument(format!(
                "mean degree {k} must lie in (0, n-1) for n = {}",
                self.n
            )));
        }
        if self.model == GraphModel::Hg && !(self.gamma > 2.0 && self.gamma.is_finite()) {
            return Err(GleeError::InvalidArgument(format!(
                "gamma {} must exceed 2",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Samples the model and returns its largest connected component.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    Ok(generate_full(spec)?.largest_connected_component())
}

/// Samples the model on all `n` nodes, before component extraction.
pub fn generate_full(spec: &GeneratorSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    match spec.model {
        GraphModel::Er => erdos_renyi(spec.n, spec.target_mean_degree / (spec.n - 1) as f64, &mut rng),
        GraphModel::Ba => {
            let m = (spec.target_mean_degree / 2.0).round().max(1.0) as usize;
            barabasi_albert(spec.n, m, &mut rng)
        }
        GraphModel::Hg => {
            let pts = HyperbolicPoints::sample(spec.n, spec.gamma, &mut rng);
            pts.calibrated_graph(spec.target_mean_degree)
        }
    }
}

/// `G(n, p)` by geometric skipping over the lexicographic pair order.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GleeError::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    if p == 0.0 || n < 2 {
        return Graph::from_edges(n, edges);
    }
    if p == 1.0 {
        for v in 1..n {
            edges.extend((0..v).map(|w| (w, v)));
        }
        return Graph::from_edges(n, edges);
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment grown from a complete graph on `m + 1` nodes;
/// each new node links to `m` distinct existing nodes chosen with
/// probability proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    if m == 0 || m + 1 > n {
        return Err(GleeError::InvalidArgument(format!(
            "attachment count {m} needs 1 <= m < n = {n}"
        )));
    }
    let mut edges = Vec::with_capacity(m * n);
    // one entry per edge endpoint, so a uniform draw is degree-proportional
    let mut endpoints = Vec::with_capacity(2 * m * n);
    for v in 0..=m {
        for u in 0..v {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Graph::from_edges(n, edges)
}

/// Node coordinates of a threshold hyperbolic graph, stored as radius
/// quantiles so the disk radius can be changed without resampling.
#[derive(Debug, Clone)]
pub struct HyperbolicPoints {
    alpha: f64,
    quantiles: Vec<f64>,
    angles: Vec<f64>,
}

impl HyperbolicPoints {
    pub fn sample(n: usize, gamma: f64, rng: &mut Rng) -> Self {
        let quantiles = (0..n).map(|_| rng.random::<f64>()).collect();
        let angles = (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        Self {
            alpha: (gamma - 1.0) / 2.0,
            quantiles,
            angles,
        }
    }

    /// Radii for disk radius `r_disk`, by inverting the CDF of the density
    /// `α sinh(αr) / (cosh(αR) − 1)` on `[0, R]`.
    pub fn radii(&self, r_disk: f64) -> Vec<f64> {
        let a = self.alpha;
        let span = (a * r_disk).cosh() - 1.0;
        self.quantiles
            .iter()
            .map(|&u| (1.0 + u * span).acosh() / a)
            .collect()
    }

    /// Links every pair at hyperbolic distance below `r_disk`.
    pub fn graph(&self, r_disk: f64) -> Result<Graph> {
        let n = self.angles.len();
        let radii = self.radii(r_disk);
        let ch: Vec<f64> = radii.iter().map(|r| r.cosh()).collect();
        let sh: Vec<f64> = radii.iter().map(|r| r.sinh()).collect();
        let limit = r_disk.cosh();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let cosh_d = ch[i] * ch[j] - sh[i] * sh[j] * (self.angles[i] - self.angles[j]).cos();
                if cosh_d < limit {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, edges)
    }

    /// Bisects the disk radius until the largest component's mean degree is
    /// within tolerance of `target`; returns the full graph at that radius.
    pub fn calibrated_graph(&self, target: f64) -> Result<Graph> {
        let n = self.angles.len() as f64;
        let (mut lo, mut hi) = (0.0f64, 4.0 * n.ln() / self.alpha.min(1.0) + 20.0);
        for _ in 0..HG_MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let g = self.graph(mid)?;
            let k = g.largest_connected_component().mean_degree();
            if (k - target).abs() <= HG_DEGREE_TOLERANCE * target {
                return Ok(g);
            }
            if k > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(GleeError::Generator(format!(
            "hyperbolic radius calibration missed mean degree {target} after {HG_MAX_BISECTION_STEPS} steps"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GeneratorSpec::new(GraphModel::Er, 1, 0.5, 0).validate().is_err());
        assert!(GeneratorSpec::new(GraphModel::Er, 10, 9.0, 0).validate().is_err());
        assert!(GeneratorSpec::new(GraphModel::Er, 10, 0.0, 0).validate().is_err());
        assert!(GeneratorSpec::new(GraphModel::Hg, 10, 3.0, 0).with_gamma(2.0).validate().is_err());
        assert!(GeneratorSpec::new(GraphModel::Hg, 10, 3.0, 0).validate().is_ok());
    }

    #[test]
    fn ba_edge_count_identity() {
        let mut rng = rng_from_seed(3);
        let g = barabasi_albert(200, 4, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 10 + 4 * (200 - 5));
        assert!(g.is_connected());
    }

    #[test]
    fn er_extremes() {
        let mut rng = rng_from_seed(1);
        assert_eq!(erdos_renyi(10, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(10, 1.0, &mut rng).unwrap().edge_count(), 45);
        assert!(erdos_renyi(10, 1.5, &mut rng).is_err());
    }

    #[test]
    fn er_skipping_matches_pair_frequency() {
        // each pair should appear with probability p across many draws
        let (n, p, reps) = (12, 0.3, 4000);
        let mut hits = vec![0usize; n * n];
        let mut rng = rng_from_seed(9);
        for _ in 0..reps {
            for &(u, v) in erdos_renyi(n, p, &mut rng).unwrap().edges() {
                hits[u * n + v] += 1;
            }
        }
        let sd = (reps as f64 * p * (1.0 - p)).sqrt();
        for u in 0..n {
            for v in u + 1..n {
                let dev = (hits[u * n + v] as f64 - reps as f64 * p).abs();
                assert!(dev < 5.0 * sd, "pair ({u},{v}) dev {dev}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for model in [GraphModel::Er, GraphModel::Ba, GraphModel::Hg] {
            let spec = GeneratorSpec::new(model, 300, 6.0, 11);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a, b);
            assert!(a.is_connected());
        }
    }

    #[test]
    fn hyperbolic_mean_degree_is_calibrated() {
        let g = generate(&GeneratorSpec::new(GraphModel::Hg, 500, 8.0, 2)).unwrap();
        assert!((g.mean_degree() - 8.0).abs() <= 0.8, "{}", g.mean_degree());
    }

    #[test]
    fn radii_stay_in_disk() {
        let mut rng = rng_from_seed(4);
        let pts = HyperbolicPoints::sample(100, 2.5, &mut rng);
        for r in pts.radii(12.0) {
            assert!((0.0..=12.0 + 1e-9).contains(&r));
        }
    }
}
