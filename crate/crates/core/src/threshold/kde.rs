//! Box-kernel density minimum between the edge and non-edge modes.

use super::{DotProductSample, EstimatorKind, ThresholdEstimate, CONSTANT_THETA};
use crate::error::{GleeError, Result};

pub const DEFAULT_BANDWIDTH: f64 = 0.3;
/// Uniform grid on `[-1, 0]`.
pub const KDE_GRID_POINTS: usize = 401;

/// Number of values `v` with `|x − v| < h/2`; `sorted` must be ascending.
pub fn box_density(sorted: &[f64], x: f64, h: f64) -> usize {
    let hi = sorted.partition_point(|&v| v < x + 0.5 * h);
    let lo = sorted.partition_point(|&v| v <= x - 0.5 * h);
    hi.saturating_sub(lo)
}

fn closer_to_center(a: f64, b: f64) -> bool {
    let (da, db) = ((a - CONSTANT_THETA).abs(), (b - CONSTANT_THETA).abs());
    da < db || (da == db && a < b)
}

/// θ at the minimum of the box-kernel density between the two modes.
///
/// The density is scanned on a uniform grid; the left mode is the innermost
/// maximum on `[-1, -0.5]` and the right mode the innermost maximum on
/// `[-0.5, 0]`. The minimum strictly between them is then refined exactly
/// over the kernel breakpoints around the best grid point. Ties go to the
/// point nearest −0.5. Without an interior minimum the constant threshold is
/// returned with a fallback note.
pub fn theta_kde(sample: &DotProductSample, h: f64) -> Result<ThresholdEstimate> {
    if sample.is_empty() {
        return Err(GleeError::InvalidArgument("empty dot-product sample".into()));
    }
    if !(h > 0.0 && h < 1.0) {
        return Err(GleeError::InvalidArgument(format!("bandwidth {h} outside (0, 1)")));
    }
    let mut sorted = sample.values.clone();
    sorted.sort_by(f64::total_cmp);

    let steps = KDE_GRID_POINTS - 1;
    let step = 1.0 / steps as f64;
    let grid: Vec<f64> = (0..KDE_GRID_POINTS).map(|k| -1.0 + k as f64 * step).collect();
    let density: Vec<usize> = grid.iter().map(|&x| box_density(&sorted, x, h)).collect();
    let center = steps / 2;

    // innermost maxima on each side
    let mut left = 0;
    for k in 0..=center {
        if density[k] >= density[left] {
            left = k;
        }
    }
    let mut right = steps;
    for k in (center..=steps).rev() {
        if density[k] >= density[right] {
            right = k;
        }
    }

    let fallback = |reason: &str| {
        let mut est = ThresholdEstimate::fallback(EstimatorKind::Kde, reason);
        est.diagnostics.bandwidth = Some(h);
        Ok(est)
    };
    if density[left] == 0 || density[right] == 0 || right <= left + 1 {
        return fallback("no separate edge and non-edge modes");
    }
    let floor = density[left].min(density[right]);
    let mut best: Option<usize> = None;
    for k in left + 1..right {
        best = match best {
            None => Some(k),
            Some(b) if density[k] < density[b] => Some(k),
            Some(b) if density[k] == density[b] && closer_to_center(grid[k], grid[b]) => Some(k),
            keep => keep,
        };
    }
    let best = best.expect("non-empty interior");
    if density[best] >= floor {
        return fallback("density has no interior minimum");
    }

    let (theta, count) = refine(&sorted, h, grid[best], step, density[best]);
    let mut est = ThresholdEstimate::new(theta, EstimatorKind::Kde);
    est.diagnostics.bandwidth = Some(h);
    est.diagnostics.density_at_theta = Some(count as f64);
    Ok(est)
}

/// Exact minimum of the piecewise-constant density on
/// `[x0 − step, x0 + step] ∩ [−1, 0]`, evaluated at every kernel breakpoint
/// and every segment midpoint.
fn refine(sorted: &[f64], h: f64, x0: f64, step: f64, at_x0: usize) -> (f64, usize) {
    let lo = (x0 - step).max(-1.0);
    let hi = (x0 + step).min(0.0);
    let mut points = vec![lo, hi];
    let start = sorted.partition_point(|&v| v < lo - 0.5 * h);
    let end = sorted.partition_point(|&v| v <= hi + 0.5 * h);
    for &v in &sorted[start..end] {
        for b in [v - 0.5 * h, v + 0.5 * h] {
            if b > lo && b < hi {
                points.push(b);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut candidates: Vec<f64> = points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    candidates.extend_from_slice(&points);

    let mut best = (at_x0, x0);
    for &x in &candidates {
        let c = box_density(sorted, x, h);
        if c < best.0 || (c == best.0 && closer_to_center(x, best.1)) {
            best = (c, x);
        }
    }
    (best.1, best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_gap_between_modes() {
        let mut values = vec![-1.0; 5];
        values.extend(vec![0.0; 5]);
        let s = DotProductSample::from_values(values, 5);
        let est = theta_kde(&s, 0.3).unwrap();
        assert!(!est.is_fallback());
        assert!(est.theta > -0.85 && est.theta < -0.15, "{}", est.theta);
        assert_eq!(est.diagnostics.density_at_theta, Some(0.0));
        let mut sorted = s.values.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(box_density(&sorted, est.theta, 0.3), 0);
    }

    #[test]
    fn single_cluster_falls_back() {
        let values: Vec<f64> = (0..50).map(|k| -0.02 * (k % 5) as f64).collect();
        let s = DotProductSample::from_values(values, 11);
        let est = theta_kde(&s, 0.3).unwrap();
        assert!(est.is_fallback());
        assert_eq!(est.theta, -0.5);
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = DotProductSample::from_values(vec![-1.0, 0.0], 2);
        assert!(theta_kde(&s, 0.0).is_err());
        assert!(theta_kde(&s, 1.0).is_err());
        let empty = DotProductSample::from_values(vec![], 2);
        assert!(theta_kde(&empty, 0.3).is_err());
    }

    #[test]
    fn finds_sparse_valley() {
        // noisy modes with a thin valley around -0.62
        let mut values = Vec::new();
        for k in 0..200 {
            values.push(-1.0 + 0.3 * ((k as f64 * 0.61).sin()));
        }
        for k in 0..2000 {
            values.push(0.25 * ((k as f64 * 0.37).sin()));
        }
        let s = DotProductSample::from_values(values, 100);
        let est = theta_kde(&s, 0.3).unwrap();
        assert!(!est.is_fallback());
        assert!(est.theta > -0.9 && est.theta < -0.2, "{}", est.theta);
        let mut sorted = s.values.clone();
        sorted.sort_by(f64::total_cmp);
        let at = box_density(&sorted, est.theta, 0.3);
        // no grid point inside the valley does better
        for k in 0..KDE_GRID_POINTS {
            let x = -1.0 + k as f64 / 400.0;
            if x > -0.7 && x < -0.3 {
                assert!(at <= box_density(&sorted, x, 0.3));
            }
        }
    }
}
