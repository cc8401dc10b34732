use glee::graph::Graph;
use glee::linkpred::{link_prediction_experiment, LinkMethod, LinkPredConfig};

/// A 12-clique with a 20-node path hanging off node 0.
fn clique_with_tail() -> Graph {
    let mut edges = Vec::new();
    for u in 0..12 {
        for v in u + 1..12 {
            edges.push((u, v));
        }
    }
    edges.push((0, 12));
    for v in 12..31 {
        edges.push((v, v + 1));
    }
    Graph::from_edges(32, edges).unwrap()
}

/// Periodic `side × side` grid; bipartite for even `side`, so adjacent
/// nodes never share a neighbor while every edge lies on 4-cycles.
fn torus(side: usize) -> Graph {
    let id = |r: usize, c: usize| (r % side) * side + c % side;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            edges.push((id(r, c), id(r, c + 1)));
            edges.push((id(r, c), id(r + 1, c)));
        }
    }
    Graph::from_edges(side * side, edges).unwrap()
}

#[test]
fn clique_edges_have_high_cn_auc() {
    let g = clique_with_tail();
    let config = LinkPredConfig::new(g.node_count(), LinkMethod::Cn, 10, 3);
    let report = link_prediction_experiment(&g, &config).unwrap();
    assert!(report.series[0].mean > 0.9, "{:?}", report.series[0]);
}

#[test]
fn l3_beats_cn_on_four_cycles() {
    let g = torus(8);
    let n = g.node_count();
    let cn = link_prediction_experiment(&g, &LinkPredConfig::new(n, LinkMethod::Cn, 10, 1)).unwrap();
    let l3 = link_prediction_experiment(&g, &LinkPredConfig::new(n, LinkMethod::L3, 10, 1)).unwrap();
    assert!(
        l3.series[0].mean > cn.series[0].mean,
        "l3 {} cn {}",
        l3.series[0].mean,
        cn.series[0].mean
    );
}

#[test]
fn reports_are_deterministic() {
    let g = clique_with_tail();
    for method in [LinkMethod::Cn, LinkMethod::L3, LinkMethod::LeDistance] {
        let config = LinkPredConfig::new(8, method, 10, 42);
        let a = link_prediction_experiment(&g, &config).unwrap();
        let b = link_prediction_experiment(&g, &config).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.series[0].raw.len(), 10);
    }
}
