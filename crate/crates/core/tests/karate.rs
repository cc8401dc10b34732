mod common;

use common::{adjacency, common_neighbors, karate, l3_double_sum};
use glee::embed::{glee_embed, le_embed_with, low_rank_error};
use glee::eigen::EigenSolver;
use glee::linkpred::{centroid_edge_count, cn_score, l3_score, split_graph};
use glee::reconstruct::{precision_at_k, reconstruct, reconstruction_loss, LossProfile};
use glee::threshold::{
    all_pair_dots, collect_dot_products, m_hat_default, theta_constant, theta_kde, theta_oracle,
    ThresholdEstimate, EstimatorKind, DEFAULT_BANDWIDTH,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn loader_counts() {
    let g = karate();
    assert_eq!(g.node_count(), 34);
    assert_eq!(g.edge_count(), 78);
    assert!(g.is_connected());
}

#[test]
fn clustering_matches_triangle_enumeration() {
    let g = karate();
    let a = adjacency(&g);
    let n = g.node_count();
    let mut total = 0.0;
    for i in 0..n {
        let nbrs: Vec<usize> = (0..n).filter(|&k| a[i][k] == 1).collect();
        let d = nbrs.len();
        let mut tri = 0;
        for x in 0..d {
            for y in x + 1..d {
                tri += a[nbrs[x]][nbrs[y]] as usize;
            }
        }
        let expected = if d < 2 { 0.0 } else { 2.0 * tri as f64 / (d * (d - 1)) as f64 };
        assert!((g.local_clustering(i) - expected).abs() < 1e-12, "node {i}");
        total += expected;
    }
    assert!((g.average_clustering() - total / n as f64).abs() < 1e-12);
}

#[test]
fn full_dimension_gram_equals_laplacian() {
    let g = karate();
    let e = glee_embed(&g, 34, 0).unwrap();
    let gram = e.gram();
    let l = g.dense_laplacian();
    assert!((gram - l).amax() < 1e-8);
}

#[test]
fn full_dimension_dots_split_into_edges_and_non_edges() {
    let g = karate();
    let e = glee_embed(&g, 34, 0).unwrap();
    let dots = all_pair_dots(&e);
    let near_minus_one = dots.iter().filter(|&&v| (v + 1.0).abs() < 1e-8).count();
    let near_zero = dots.iter().filter(|&&v| v.abs() < 1e-8).count();
    assert_eq!(near_minus_one, 78);
    assert_eq!(near_zero, 34 * 33 / 2 - 78);
    assert_eq!(m_hat_default(&collect_dot_products(&e, usize::MAX, 0)), 78);
}

#[test]
fn le_generalized_eigen_residuals() {
    let g = karate();
    let r = le_embed_with(&g, 2, EigenSolver::Dense, 0).unwrap();
    assert!(r.trivial_eigenvalue.abs() < 1e-10);
    let l = g.dense_laplacian();
    for (c, &lambda) in r.embedding.eigenvalues().iter().enumerate() {
        let y: Vec<f64> = (0..34).map(|i| r.embedding.row(i)[c]).collect();
        for i in 0..34 {
            let ly: f64 = (0..34).map(|k| l[(i, k)] * y[k]).sum();
            let dy = lambda * g.degree(i) as f64 * y[i];
            assert!((ly - dy).abs() < 1e-8, "pair {c}, row {i}");
        }
    }
}

#[test]
fn low_rank_error_decreases_with_dimension() {
    let g = karate();
    let e16 = low_rank_error(&g, 16).unwrap();
    let e32 = low_rank_error(&g, 32).unwrap();
    assert!(e32 < e16);
    assert!(low_rank_error(&g, 34).unwrap() < 1e-8);
}

#[test]
fn exact_reconstruction_at_full_dimension() {
    let g = karate();
    let e = glee_embed(&g, 34, 0).unwrap();
    let theta = theta_constant();
    let result = reconstruct(&e, &theta);
    let mut predicted = result.predicted_edges.clone();
    predicted.sort_unstable();
    assert_eq!(predicted, g.edges().to_vec());
    assert_eq!(reconstruction_loss(&e, &g, &theta).unwrap(), 0.0);
    let report = precision_at_k(&result, &g, &[78]).unwrap();
    assert_eq!(report.series[0].mean, 1.0);

    let kde = theta_kde(&collect_dot_products(&e, usize::MAX, 0), DEFAULT_BANDWIDTH).unwrap();
    assert_eq!(reconstruction_loss(&e, &g, &kde).unwrap(), 0.0);
    let oracle = theta_oracle(&e, &g).unwrap();
    assert_eq!(oracle.diagnostics.loss, Some(0.0));
}

#[test]
fn kde_at_low_dimension_beats_extreme_thresholds() {
    let g = karate();
    let e = glee_embed(&g, 8, 0).unwrap();
    let kde = theta_kde(&collect_dot_products(&e, usize::MAX, 0), DEFAULT_BANDWIDTH).unwrap();
    assert!((-1.0..=0.0).contains(&kde.theta));
    let profile = LossProfile::new(&e, &g).unwrap();
    assert!(profile.loss(kde.theta) <= profile.loss(-0.9));
    assert!(profile.loss(kde.theta) <= profile.loss(-0.1));
}

#[test]
fn oracle_beats_random_thresholds() {
    let g = karate();
    let e = glee_embed(&g, 8, 0).unwrap();
    let oracle = theta_oracle(&e, &g).unwrap();
    let profile = LossProfile::new(&e, &g).unwrap();
    let best = profile.loss(oracle.theta);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let t = -rng.random::<f64>();
        assert!(best <= profile.loss(t));
    }
}

#[test]
fn cn_matches_brute_force_on_every_non_adjacent_pair() {
    let g = karate();
    let a = adjacency(&g);
    let e = glee_embed(&g, 34, 0).unwrap();
    let theta = theta_constant();
    for i in 0..34 {
        for j in i + 1..34 {
            if a[i][j] == 1 {
                continue;
            }
            let expected = common_neighbors(&a, i, j) as f64;
            assert!((cn_score(&e, i, j, &theta) - expected).abs() < 1e-6, "({i},{j})");
        }
    }
}

#[test]
fn l3_matches_double_sum_on_random_pairs() {
    let g = karate();
    let a = adjacency(&g);
    let e = glee_embed(&g, 34, 0).unwrap();
    let theta = theta_constant();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let i = rng.random_range(0..34);
        let mut j = rng.random_range(0..34);
        while j == i {
            j = rng.random_range(0..34);
        }
        let expected = l3_double_sum(&a, i, j) as f64;
        assert!((l3_score(&e, i, j, &theta) - expected).abs() < 1e-6, "({i},{j})");
    }
}

#[test]
fn centroid_count_matches_cut_size() {
    let g = karate();
    let a = adjacency(&g);
    let e = glee_embed(&g, 34, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let (mut v1, mut v2) = (Vec::new(), Vec::new());
        for k in 0..34 {
            match rng.random_range(0..3) {
                0 => v1.push(k),
                1 => v2.push(k),
                _ => {}
            }
        }
        if v1.is_empty() || v2.is_empty() {
            continue;
        }
        let cut: usize = v1.iter().map(|&i| v2.iter().filter(|&&j| a[i][j] == 1).count()).sum();
        let got = centroid_edge_count(&e, &v1, &v2).unwrap();
        assert!((got - cut as f64).abs() < 1e-6);
    }
}

#[test]
fn splits_stay_connected() {
    let g = karate();
    for seed in 0..10 {
        let s = split_graph(&g, 0.75, seed).unwrap();
        assert!(s.g_train.is_connected());
        assert_eq!(s.g_train.node_count(), 34);
        assert_eq!(s.g_train.edge_count(), 59);
        assert_eq!(s.e_test.len(), 19);
        for &(u, v) in &s.e_test {
            assert!(g.has_edge(u, v) && !s.g_train.has_edge(u, v));
        }
    }
}

#[test]
fn precision_at_m_tends_to_improve_with_dimension() {
    let g = karate();
    let m = g.edge_count();
    let mut means = Vec::new();
    for d in [8, 16, 32, 34] {
        let mut total = 0.0;
        for seed in 0..5 {
            let e = glee_embed(&g, d, seed).unwrap();
            let result = reconstruct(&e, &ThresholdEstimate::new(-0.5, EstimatorKind::Constant));
            total += precision_at_k(&result, &g, &[m]).unwrap().series[0].mean;
        }
        means.push(total / 5.0);
    }
    for w in means.windows(2) {
        assert!(w[1] >= w[0], "{means:?}");
    }
}
