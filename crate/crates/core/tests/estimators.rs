use glee::threshold::{theta_gmm, theta_kde, DotProductSample, MHat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn two_clusters(edges: usize, pairs: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = Normal::new(-1.0, sigma).unwrap();
    let hi = Normal::new(0.0, sigma).unwrap();
    let mut v: Vec<f64> = (0..edges).map(|_| lo.sample(&mut rng)).collect();
    v.extend((0..pairs - edges).map(|_| hi.sample(&mut rng)));
    v
}

/// Equal-variance Gaussians at -1 and 0 with weights `w1`, `1 - w1` cross at
/// `σ² ln(w1 / (1 - w1)) − 1/2`.
fn equal_variance_crossing(w1: f64, sigma: f64) -> f64 {
    sigma * sigma * (w1 / (1.0 - w1)).ln() - 0.5
}

#[test]
fn gmm_matches_closed_form_crossing() {
    let n = 200;
    let pairs = n * (n - 1) / 2;
    let m = 800;
    let sample = DotProductSample::from_values(two_clusters(m, pairs, 0.05, 1), n);
    let est = theta_gmm(&sample, MHat::BelowConstant, 3).unwrap();
    let expected = equal_variance_crossing(m as f64 / pairs as f64, 0.05);
    assert!((est.theta - expected).abs() <= 0.1, "{} vs {expected}", est.theta);
    assert!(!est.is_fallback());
}

#[test]
fn gmm_symmetric_clusters_cross_at_midpoint() {
    let n = 100;
    let pairs = n * (n - 1) / 2;
    let sample = DotProductSample::from_values(two_clusters(pairs / 2, pairs, 0.05, 2), n);
    let est = theta_gmm(&sample, MHat::Fixed((pairs / 2) as f64), 4).unwrap();
    assert!((est.theta + 0.5).abs() <= 0.02, "{}", est.theta);
}

#[test]
fn kde_splits_clean_clusters() {
    let n = 200;
    let pairs = n * (n - 1) / 2;
    let values = two_clusters(800, pairs, 0.05, 5);
    let sample = DotProductSample::from_values(values.clone(), n);
    let est = theta_kde(&sample, 0.3).unwrap();
    let misclassified = values
        .iter()
        .enumerate()
        .filter(|&(k, &v)| (v < est.theta) != (k < 800))
        .count();
    assert_eq!(misclassified, 0, "theta {}", est.theta);
}
