//! Simple undirected graphs, their Laplacians, and the edge-list format.
//!
//! Node identifiers are always the contiguous range `0..n`. Edge lists read
//! from disk are relabeled in order of first appearance, so the same file
//! always produces the same graph.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{GleeError, Result};

/// Laplacians up to this order are stored densely.
pub const DENSE_LAPLACIAN_MAX_N: usize = 4096;

/// Undirected, unweighted simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Edges are normalized to `(min, max)` and
    /// deduplicated; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GleeError::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(GleeError::InvalidArgument(format!("self-loop at node {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            adjacency,
            edges: normalized,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    /// Number of unordered node pairs, `n choose 2`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.connected_components().len() == 1
    }

    /// Subgraph induced by `nodes`, relabeled so that `nodes[k]` becomes `k`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (k, &u) in nodes.iter().enumerate() {
            index[u] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::from_edges(nodes.len(), edges).expect("induced edges are valid")
    }

    /// Largest connected component together with the original id of each
    /// new node. Ties go to the component holding the smallest node id.
    pub fn largest_connected_component_with_map(&self) -> (Graph, Vec<usize>) {
        let components = self.connected_components();
        let mut best: Option<&Vec<usize>> = None;
        for c in &components {
            if best.is_none_or(|b| c.len() > b.len()) {
                best = Some(c);
            }
        }
        match best {
            Some(nodes) => (self.induced_subgraph(nodes), nodes.clone()),
            None => (Graph::empty(0), Vec::new()),
        }
    }

    pub fn largest_connected_component(&self) -> Graph {
        self.largest_connected_component_with_map().0
    }

    /// Local clustering coefficient; zero for nodes of degree below two.
    pub fn local_clustering(&self, node: usize) -> f64 {
        let nbrs = &self.adjacency[node];
        let k = nbrs.len();
        if k < 2 {
            return 0.0;
        }
        let mut closed = 0usize;
        for (a, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[a + 1..] {
                if self.has_edge(u, v) {
                    closed += 1;
                }
            }
        }
        closed as f64 / (k * (k - 1) / 2) as f64
    }

    pub fn average_clustering(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n).map(|u| self.local_clustering(u)).sum::<f64>() / self.n as f64
    }

    pub fn laplacian(&self) -> LaplacianMatrix {
        if self.n <= DENSE_LAPLACIAN_MAX_N {
            LaplacianMatrix::Dense(self.dense_laplacian())
        } else {
            LaplacianMatrix::Sparse(self.sparse_laplacian())
        }
    }

    pub fn dense_laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            l[(u, u)] = self.degree(u) as f64;
        }
        for &(u, v) in &self.edges {
            l[(u, v)] = -1.0;
            l[(v, u)] = -1.0;
        }
        l
    }

    pub fn sparse_laplacian(&self) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::with_capacity(self.n + 2 * self.edges.len());
        let mut values = Vec::with_capacity(self.n + 2 * self.edges.len());
        row_ptr.push(0);
        for u in 0..self.n {
            let nbrs = &self.adjacency[u];
            let split = nbrs.partition_point(|&v| v < u);
            for &v in &nbrs[..split] {
                cols.push(v);
                values.push(-1.0);
            }
            cols.push(u);
            values.push(nbrs.len() as f64);
            for &v in &nbrs[split..] {
                cols.push(v);
                values.push(-1.0);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            cols,
            values,
        }
    }

    /// Writes one `u v` line per edge.
    ///
    /// When possible, the lines are ordered so that nodes first appear in
    /// id order; reading the output back then reproduces this graph exactly.
    /// Otherwise (isolated nodes, for instance) edges are written in
    /// lexicographic order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let lines = self.introduction_order().unwrap_or_else(|| self.edges.clone());
        for (u, v) in lines {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Edge order in which every node `v` first appears after nodes `0..v`.
    fn introduction_order(&self) -> Option<Vec<(usize, usize)>> {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut lead = Vec::with_capacity(n);
        for v in 0..n {
            if seen[v] {
                continue;
            }
            if let Some(&w) = self.adjacency[v].iter().find(|&&w| seen[w]) {
                lead.push((w, v));
            } else if v + 1 < n && self.has_edge(v, v + 1) {
                lead.push((v, v + 1));
                seen[v + 1] = true;
            } else {
                return None;
            }
            seen[v] = true;
        }
        let mut introduced: Vec<(usize, usize)> = lead.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        introduced.sort_unstable();
        let rest = self.edges.iter().filter(|e| introduced.binary_search(e).is_err());
        lead.extend(rest);
        Some(lead)
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped. Node ids are relabeled
/// to `0..n` in order of first appearance. Self-loops and repeated edges are
/// dropped; rows with more than two columns are rejected as weighted input.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut labels: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.len() {
            2 => {}
            1 => {
                return Err(GleeError::Parse {
                    line: line_no,
                    message: format!("expected two node ids, found `{trimmed}`"),
                })
            }
            _ => return Err(GleeError::WeightedInput { line: line_no }),
        }
        let mut ids = [0u64; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens) {
            *slot = tok.parse().map_err(|_| GleeError::Parse {
                line: line_no,
                message: format!("`{tok}` is not a non-negative integer node id"),
            })?;
        }
        if ids[0] == ids[1] {
            continue;
        }
        let mut label = |raw: u64| {
            let next = labels.len();
            *labels.entry(raw).or_insert(next)
        };
        let u = label(ids[0]);
        let v = label(ids[1]);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(GleeError::EmptyInput);
    }
    Graph::from_edges(labels.len(), edges)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}

pub fn read_edge_list_file(path: &std::path::Path) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    load_edge_list(std::io::BufReader::new(file))
}

/// Compressed sparse row matrix, used for Laplacians too large to store densely.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&j, &a)| a * x[j])
                .sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.values[k];
            }
        }
        m
    }
}

/// Graph Laplacian `L = D - A`, dense for small graphs and sparse otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum LaplacianMatrix {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        match self {
            LaplacianMatrix::Dense(m) => m.nrows(),
            LaplacianMatrix::Sparse(m) => m.n(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            LaplacianMatrix::Dense(m) => m[(i, j)],
            LaplacianMatrix::Sparse(m) => m.get(i, j),
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        match self {
            LaplacianMatrix::Dense(m) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = m.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            LaplacianMatrix::Sparse(m) => m.mul_vec(x, y),
        }
    }

    /// `x^T L x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.mul_vec(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            LaplacianMatrix::Dense(m) => m.clone(),
            LaplacianMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, LaplacianMatrix::Dense(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn loads_path() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn drops_duplicates_and_self_loops() {
        let g = parse_edge_list("0 1\n1 0\n2 2\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn relabels_in_first_appearance_order() {
        let g = parse_edge_list("# header\n\n10 7\n7 3\n").unwrap();
        // 10 -> 0, 7 -> 1, 3 -> 2
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_edge_list("0 1\n# c\n1 x\n") {
            Err(GleeError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("0 1\n2\n") {
            Err(GleeError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("0 1\n-1 2\n"),
            Err(GleeError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_weighted_rows() {
        assert!(matches!(
            parse_edge_list("0 1 0.5\n"),
            Err(GleeError::WeightedInput { line: 1 })
        ));
    }

    #[test]
    fn rejects_empty_input() {
        assert!(matches!(parse_edge_list(""), Err(GleeError::EmptyInput)));
        assert!(matches!(parse_edge_list("# only\n\n"), Err(GleeError::EmptyInput)));
        assert!(matches!(parse_edge_list("3 3\n"), Err(GleeError::EmptyInput)));
    }

    #[test]
    fn laplacian_small_cases() {
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(
            edge.dense_laplacian(),
            DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            tri.dense_laplacian(),
            DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0])
        );
        assert_eq!(
            path3().dense_laplacian(),
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0])
        );
    }

    #[test]
    fn sparse_and_dense_agree() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (1, 3)]).unwrap();
        assert_eq!(g.sparse_laplacian().to_dense(), g.dense_laplacian());
        let sparse = LaplacianMatrix::Sparse(g.sparse_laplacian());
        let dense = LaplacianMatrix::Dense(g.dense_laplacian());
        let x = [0.3, -1.0, 2.5, 0.0, 1.0];
        let (mut ys, mut yd) = (vec![0.0; 5], vec![0.0; 5]);
        sparse.mul_vec(&x, &mut ys);
        dense.mul_vec(&x, &mut yd);
        assert_eq!(ys, yd);
        assert_eq!(sparse.get(1, 3), -1.0);
        assert_eq!(sparse.get(0, 2), 0.0);
        assert_eq!(sparse.get(3, 3), 4.0);
    }

    #[test]
    fn largest_component_cases() {
        let g = path3();
        assert_eq!(g.largest_connected_component(), g);

        let two = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let (lcc, map) = two.largest_connected_component_with_map();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(map, vec![2, 3, 4]);
        assert_eq!(lcc.edges(), &[(0, 1), (1, 2)]);

        let isolated = Graph::from_edges(4, [(0, 1), (1, 3), (0, 3)]).unwrap();
        let lcc = isolated.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edge_count(), 3);

        // equal sizes: the component containing node 0 wins
        let tie = Graph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        let (_, map) = tie.largest_connected_component_with_map();
        assert_eq!(map, vec![0, 1]);
    }

    #[test]
    fn clustering_small_cases() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.average_clustering(), 1.0);
        assert_eq!(path3().average_clustering(), 0.0);
    }

    #[test]
    fn has_edge_is_symmetric() {
        let g = path3();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
        assert!(!g.has_edge(0, 9));
    }

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
        assert!(Graph::from_edges(2, [(1, 1)]).is_err());
    }
}
