#![allow(dead_code)]

use std::path::PathBuf;

use glee::graph::{read_edge_list_file, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn karate_path() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate.edges"))
}

pub fn karate() -> Graph {
    read_edge_list_file(&karate_path()).expect("karate edge list")
}

/// Random tree on `n` nodes plus each remaining pair with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Connected graphs with 5 to 64 nodes and varied density.
pub fn random_corpus(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(5..=64);
            let p = rng.random_range(0.02..0.4);
            random_connected(n, p, rng.random())
        })
        .collect()
}

pub fn adjacency(g: &Graph) -> Vec<Vec<u8>> {
    let n = g.node_count();
    let mut a = vec![vec![0u8; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = 1;
        a[v][u] = 1;
    }
    a
}

pub fn common_neighbors(a: &[Vec<u8>], i: usize, j: usize) -> usize {
    (0..a.len()).filter(|&k| a[i][k] == 1 && a[j][k] == 1).count()
}

/// `Σ_{k ∈ N(i)} Σ_{l ∈ N(j), l ≠ k} a_kl`.
pub fn l3_double_sum(a: &[Vec<u8>], i: usize, j: usize) -> usize {
    let n = a.len();
    let mut total = 0;
    for k in (0..n).filter(|&k| a[i][k] == 1) {
        for l in (0..n).filter(|&l| a[j][l] == 1 && l != k) {
            total += a[k][l] as usize;
        }
    }
    total
}
