//! Class-rebalanced two-component Gaussian mixture threshold.
//!
//! Steps:
//! 1. `L` = dot products below −0.5, `R` = a random `|L|`-subsample of the rest.
//! 2. Fit a two-component mixture with conjugate priors pinning the means
//!    near −1 and 0 (MAP-EM).
//! 3. Replace the fitted weights with `ŵ₁ = m̂ / C(n,2)`, `ŵ₂ = 1 − ŵ₁`.
//! 4. θ solves `ŵ₁ f₁(θ) = ŵ₂ f₂(θ)` on `(−1, 0)`; the log form is a quadratic.

use rand::seq::index::sample as sample_indices;

use super::{DotProductSample, EstimatorKind, MHat, ThresholdEstimate, CONSTANT_THETA};
use crate::error::{GleeError, Result};
use crate::seed::rng_from_seed;

/// Priors and stopping rule for the mixture fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmConfig {
    pub prior_means: [f64; 2],
    /// Pseudo-observations backing each prior mean.
    pub prior_strength: f64,
    /// Inverse-gamma shape and scale for each variance.
    pub variance_shape: f64,
    pub variance_scale: f64,
    pub variance_floor: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for GmmConfig {
    fn default() -> Self {
        Self {
            prior_means: [-1.0, 0.0],
            prior_strength: 10.0,
            variance_shape: 1.0,
            variance_scale: 1e-3,
            variance_floor: 1e-6,
            tolerance: 1e-8,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoGaussianMixture {
    pub weights: [f64; 2],
    pub means: [f64; 2],
    pub variances: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
    /// Whether a variance hit the floor during the fit.
    pub floored: bool,
}

fn log_normal(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (x - mean) * (x - mean) / var)
}

/// MAP-EM for a 1-D two-component mixture with Normal-inverse-gamma priors
/// on each component and a flat prior on the weights.
pub fn fit_bayesian_gmm(values: &[f64], config: &GmmConfig) -> Result<TwoGaussianMixture> {
    if values.len() < 2 {
        return Err(GleeError::InvalidArgument(
            "mixture fit needs at least two values".into(),
        ));
    }
    let n = values.len() as f64;
    let mean_all = values.iter().sum::<f64>() / n;
    let var_all = values.iter().map(|v| (v - mean_all).powi(2)).sum::<f64>() / n;

    let mut weights = [0.5f64, 0.5];
    let mut means = config.prior_means;
    let mut variances = [var_all.max(config.variance_floor); 2];
    let mut floored = false;
    let mut resp = vec![[0.0f64; 2]; values.len()];
    let mut previous = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;

        // E-step
        let mut loglik = 0.0;
        for (r, &x) in resp.iter_mut().zip(values) {
            let a = weights[0].ln() + log_normal(x, means[0], variances[0]);
            let b = weights[1].ln() + log_normal(x, means[1], variances[1]);
            let m = a.max(b);
            let lse = m + ((a - m).exp() + (b - m).exp()).ln();
            r[0] = (a - lse).exp();
            r[1] = (b - lse).exp();
            loglik += lse;
        }
        loglik /= n;

        // M-step (joint posterior mode of each Normal-inverse-gamma)
        for k in 0..2 {
            let nk: f64 = resp.iter().map(|r| r[k]).sum();
            let xbar = if nk > 0.0 {
                resp.iter().zip(values).map(|(r, &x)| r[k] * x).sum::<f64>() / nk
            } else {
                config.prior_means[k]
            };
            let scatter: f64 = resp
                .iter()
                .zip(values)
                .map(|(r, &x)| r[k] * (x - xbar).powi(2))
                .sum();
            let kappa = config.prior_strength + nk;
            means[k] = (config.prior_strength * config.prior_means[k] + nk * xbar) / kappa;
            let beta = config.variance_scale
                + 0.5 * scatter
                + 0.5 * config.prior_strength * nk * (xbar - config.prior_means[k]).powi(2) / kappa;
            let alpha = config.variance_shape + 0.5 * nk;
            let var = beta / (alpha + 1.5);
            if !(var > config.variance_floor) {
                floored = true;
            }
            variances[k] = var.max(config.variance_floor);
            weights[k] = (nk / n).clamp(1e-12, 1.0);
        }

        if !loglik.is_finite() || means.iter().any(|m| !m.is_finite()) {
            return Err(GleeError::NotConverged("mixture fit diverged".into()));
        }
        if (loglik - previous).abs() < config.tolerance {
            converged = true;
            break;
        }
        previous = loglik;
    }

    // component 0 is the one nearer −1
    if means[0] > means[1] {
        weights.swap(0, 1);
        means.swap(0, 1);
        variances.swap(0, 1);
    }
    Ok(TwoGaussianMixture {
        weights,
        means,
        variances,
        iterations,
        converged,
        floored,
    })
}

/// Solves `w₁ N(θ; μ₁, v₁) = w₂ N(θ; μ₂, v₂)` for θ in the open interval
/// `(lo, hi)`. With two admissible roots, the one between the means wins,
/// then the one nearest the interval midpoint.
pub fn equal_density_point(
    weights: [f64; 2],
    means: [f64; 2],
    variances: [f64; 2],
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let [w1, w2] = weights;
    let [m1, m2] = means;
    let [v1, v2] = variances;
    if !(w1 > 0.0 && w2 > 0.0 && v1 > 0.0 && v2 > 0.0) {
        return None;
    }
    // a θ² + b θ + c = 0 from equating log densities
    let a = 0.5 / v2 - 0.5 / v1;
    let b = m1 / v1 - m2 / v2;
    let c = 0.5 * m2 * m2 / v2 - 0.5 * m1 * m1 / v1 + (w1 / w2).ln() + 0.5 * (v2 / v1).ln();

    let mut roots = Vec::with_capacity(2);
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
    if a.abs() <= 1e-12 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            // numerically stable pair
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push(-b / (2.0 * a));
            }
        }
    }
    let mid = 0.5 * (lo + hi);
    let (mlo, mhi) = (m1.min(m2), m1.max(m2));
    roots
        .into_iter()
        .filter(|r| r.is_finite() && *r > lo && *r < hi)
        .min_by(|x, y| {
            let outside = |r: f64| !(r >= mlo && r <= mhi);
            outside(*x)
                .cmp(&outside(*y))
                .then((x - mid).abs().total_cmp(&(y - mid).abs()))
        })
}

pub fn theta_gmm(sample: &DotProductSample, m_hat: MHat, seed: u64) -> Result<ThresholdEstimate> {
    theta_gmm_with(sample, m_hat, seed, &GmmConfig::default())
}

pub fn theta_gmm_with(
    sample: &DotProductSample,
    m_hat: MHat,
    seed: u64,
    config: &GmmConfig,
) -> Result<ThresholdEstimate> {
    let below: Vec<f64> = sample
        .values
        .iter()
        .copied()
        .filter(|&v| v < CONSTANT_THETA)
        .collect();
    let above: Vec<f64> = sample
        .values
        .iter()
        .copied()
        .filter(|&v| v >= CONSTANT_THETA)
        .collect();
    if below.len() < 2 || above.len() < 2 {
        return Err(GleeError::Precondition(format!(
            "mixture threshold needs two dot products on each side of -0.5 (got {} and {})",
            below.len(),
            above.len()
        )));
    }

    let mut rng = rng_from_seed(seed);
    let take = below.len().min(above.len());
    let mut picked = sample_indices(&mut rng, above.len(), take).into_vec();
    picked.sort_unstable();
    let mut fit_values = below.clone();
    fit_values.extend(picked.iter().map(|&i| above[i]));

    let mut fit = fit_bayesian_gmm(&fit_values, config);
    if matches!(&fit, Ok(f) if f.floored) {
        // one retry with a firmer variance prior
        let retry = GmmConfig {
            variance_scale: config.variance_scale.max(config.variance_floor * 100.0) * 10.0,
            ..config.clone()
        };
        fit = fit_bayesian_gmm(&fit_values, &retry);
    }
    let fit = match fit {
        Ok(f) if !f.floored => f,
        Ok(_) => return Ok(ThresholdEstimate::fallback(EstimatorKind::Gmm, "degenerate mixture fit")),
        Err(e) => return Ok(ThresholdEstimate::fallback(EstimatorKind::Gmm, e.to_string())),
    };

    let m_hat_value = m_hat.resolve(sample);
    let w1 = m_hat_value / sample.pair_count as f64;
    let reweighted = [w1, 1.0 - w1];

    let mut est = match equal_density_point(reweighted, fit.means, fit.variances, -1.0, 0.0) {
        Some(theta) => ThresholdEstimate::new(theta, EstimatorKind::Gmm),
        None => ThresholdEstimate::fallback(EstimatorKind::Gmm, "no equal-density point in (-1, 0)"),
    };
    est.diagnostics.m_hat = Some(m_hat_value);
    est.diagnostics.fitted_weights = Some(fit.weights);
    est.diagnostics.reweighted = Some(reweighted);
    est.diagnostics.means = Some(fit.means);
    est.diagnostics.variances = Some(fit.variances);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn equal_density_symmetric_case() {
        let t = equal_density_point([0.5, 0.5], [-1.0, 0.0], [0.01, 0.01], -1.0, 0.0).unwrap();
        assert!((t + 0.5).abs() < 1e-12);
    }

    #[test]
    fn equal_density_unequal_variances() {
        let (w, m, v) = ([0.1, 0.9], [-1.0, 0.0], [0.04, 0.01]);
        let t = equal_density_point(w, m, v, -1.0, 0.0).unwrap();
        let lhs = w[0] * (-(t - m[0]).powi(2) / (2.0 * v[0])).exp() / v[0].sqrt();
        let rhs = w[1] * (-(t - m[1]).powi(2) / (2.0 * v[1])).exp() / v[1].sqrt();
        assert!((lhs - rhs).abs() < 1e-9 * lhs.max(rhs));
    }

    #[test]
    fn no_root_without_edge_weight() {
        assert!(equal_density_point([0.0, 1.0], [-1.0, 0.0], [0.01, 0.01], -1.0, 0.0).is_none());
    }

    #[test]
    fn fit_recovers_separated_components() {
        let mut rng = crate::seed::rng_from_seed(3);
        let a = Normal::new(-1.0, 0.05).unwrap();
        let b = Normal::new(0.0, 0.05).unwrap();
        let mut values: Vec<f64> = (0..500).map(|_| a.sample(&mut rng)).collect();
        values.extend((0..500).map(|_| b.sample(&mut rng)));
        let fit = fit_bayesian_gmm(&values, &GmmConfig::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.means[0] + 1.0).abs() < 0.02);
        assert!(fit.means[1].abs() < 0.02);
        assert!((fit.variances[0].sqrt() - 0.05).abs() < 0.01);
        assert!((fit.weights[0] - 0.5).abs() < 0.05);
    }

    #[test]
    fn precondition_requires_both_sides() {
        let s = DotProductSample::from_values(vec![-1.0, 0.0, 0.0, 0.0], 3);
        assert!(matches!(
            theta_gmm(&s, MHat::BelowConstant, 0),
            Err(GleeError::Precondition(_))
        ));
    }

    #[test]
    fn zero_m_hat_falls_back() {
        let s = DotProductSample::from_values(vec![-1.0, -0.9, 0.0, 0.1, -0.05], 4);
        let est = theta_gmm(&s, MHat::Fixed(0.0), 0).unwrap();
        assert!(est.is_fallback());
        assert_eq!(est.theta, -0.5);
    }
}
