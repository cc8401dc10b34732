//! GLEE embeddings (top eigenpairs of `L`, scaled by `√λ`) and the Laplacian
//! Eigenmaps baseline (bottom non-trivial generalized eigenvectors of
//! `L y = λ D y`).
//!
//! A GLEE embedding `S` satisfies `S Sᵀ ≈ L`: squared row norms approximate
//! degrees and off-diagonal dot products approximate `−a_ij`. Coordinates are
//! only defined up to sign flips and rotations inside repeated eigenspaces,
//! so compare Gram matrices rather than raw rows.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::eigen::{dense_descending, top_eigenpairs, EigenSolver, SymmetricOperator};
use crate::error::{GleeError, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbeddingMethod {
    Glee,
    Le,
}

impl fmt::Display for EmbeddingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingMethod::Glee => "GLEE",
            EmbeddingMethod::Le => "LE",
        })
    }
}

impl FromStr for EmbeddingMethod {
    type Err = GleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GLEE" => Ok(EmbeddingMethod::Glee),
            "LE" => Ok(EmbeddingMethod::Le),
            other => Err(GleeError::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// An `n × d` node embedding, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n: usize,
    d: usize,
    data: Vec<f64>,
    eigenvalues: Vec<f64>,
    method: EmbeddingMethod,
}

impl Embedding {
    pub fn from_rows(
        n: usize,
        d: usize,
        data: Vec<f64>,
        eigenvalues: Vec<f64>,
        method: EmbeddingMethod,
    ) -> Result<Self> {
        if data.len() != n * d {
            return Err(GleeError::Mismatch(format!(
                "{} values for a {n}x{d} embedding",
                data.len()
            )));
        }
        if eigenvalues.len() != d {
            return Err(GleeError::Mismatch(format!(
                "{} eigenvalues for dimension {d}",
                eigenvalues.len()
            )));
        }
        Ok(Self {
            n,
            d,
            data,
            eigenvalues,
            method,
        })
    }

    /// All-zero embedding, handy as a degenerate baseline.
    pub fn zeros(n: usize, d: usize, method: EmbeddingMethod) -> Self {
        Self {
            n,
            d,
            data: vec![0.0; n * d],
            eigenvalues: vec![0.0; d],
            method,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn method(&self) -> EmbeddingMethod {
        self.method
    }

    /// Descending for GLEE, ascending (non-trivial) for LE.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn dot(&self, i: usize, j: usize) -> f64 {
        dot(self.row(i), self.row(j))
    }

    pub fn squared_norm(&self, i: usize) -> f64 {
        self.dot(i, i)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.d, &self.data)
    }

    /// `S Sᵀ`.
    pub fn gram(&self) -> DMatrix<f64> {
        let s = self.to_matrix();
        &s * s.transpose()
    }

    /// The first `d` columns; for GLEE this is exactly the `d`-dimensional
    /// embedding of the same graph.
    pub fn truncated(&self, d: usize) -> Result<Embedding> {
        if d == 0 || d > self.d {
            return Err(GleeError::Dimension { d, n: self.d });
        }
        let mut data = Vec::with_capacity(self.n * d);
        for i in 0..self.n {
            data.extend_from_slice(&self.row(i)[..d]);
        }
        Ok(Embedding {
            n: self.n,
            d,
            data,
            eigenvalues: self.eigenvalues[..d].to_vec(),
            method: self.method,
        })
    }

    /// Text format: a `n d method` header, `n` rows of `d` values, and a
    /// final row with the `d` eigenvalues. Values are printed in shortest
    /// round-trip form.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.n, self.d, self.method)?;
        for i in 0..self.n {
            write_row(&mut out, self.row(i))?;
        }
        write_row(&mut out, &self.eigenvalues)?;
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Embedding> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| GleeError::EmbeddingFormat("missing header".into()))??;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(GleeError::EmbeddingFormat(format!("bad header `{header}`")));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| GleeError::EmbeddingFormat(format!("bad header `{header}`")))
        };
        let n = parse_usize(parts[0])?;
        let d = parse_usize(parts[1])?;
        let method: EmbeddingMethod = parts[2]
            .parse()
            .map_err(|_| GleeError::EmbeddingFormat(format!("bad method `{}`", parts[2])))?;

        let mut parse_row = |what: &str| -> Result<Vec<f64>> {
            let line = lines
                .next()
                .ok_or_else(|| GleeError::EmbeddingFormat(format!("missing {what}")))??;
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| GleeError::EmbeddingFormat(format!("bad value `{t}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != d {
                return Err(GleeError::EmbeddingFormat(format!(
                    "{what} has {} values, expected {d}",
                    row.len()
                )));
            }
            Ok(row)
        };
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            data.extend(parse_row(&format!("row {i}"))?);
        }
        let eigenvalues = parse_row("eigenvalue row")?;
        Embedding::from_rows(n, d, data, eigenvalues, method)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Embedding> {
        let file = std::fs::File::open(path)?;
        Embedding::read(std::io::BufReader::new(file))
    }
}

fn write_row<W: Write>(out: &mut W, values: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            out.write_all(b" ")?;
        }
        write!(out, "{v}")?;
        first = false;
    }
    out.write_all(b"\n")
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `d`-dimensional GLEE of `g`.
pub fn glee_embed(g: &Graph, d: usize, seed: u64) -> Result<Embedding> {
    glee_embed_with(g, d, seed, EigenSolver::Auto)
}

pub fn glee_embed_with(g: &Graph, d: usize, seed: u64, solver: EigenSolver) -> Result<Embedding> {
    let n = g.node_count();
    if n == 0 {
        return Err(GleeError::Precondition("graph has no nodes".into()));
    }
    if d == 0 || d > n {
        return Err(GleeError::Dimension { d, n });
    }
    let laplacian = g.laplacian();
    let pairs = top_eigenpairs(&laplacian, d, solver, seed)?;
    // L is PSD; round-off can leave tiny negative eigenvalues
    let eigenvalues: Vec<f64> = pairs.values.iter().map(|&l| l.max(0.0)).collect();
    let scale: Vec<f64> = eigenvalues.iter().map(|l| l.sqrt()).collect();
    let mut data = vec![0.0; n * d];
    for i in 0..n {
        for j in 0..d {
            data[i * d + j] = pairs.vectors[(i, j)] * scale[j];
        }
    }
    Embedding::from_rows(n, d, data, eigenvalues, EmbeddingMethod::Glee)
}

/// Eigenvalues below this are treated as the trivial constant mode in LE.
pub const LE_TRIVIAL_EIGENVALUE: f64 = 1e-9;

/// `I − D^{-1/2} L D^{-1/2}` reflected as `2I − ·` so that its top
/// eigenpairs are the bottom eigenpairs of the normalized Laplacian.
struct ReflectedNormalizedLaplacian<'a> {
    g: &'a Graph,
    inv_sqrt_deg: Vec<f64>,
}

impl SymmetricOperator for ReflectedNormalizedLaplacian<'_> {
    fn dim(&self) -> usize {
        self.g.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        // (2I - N) x = x + D^{-1/2} A D^{-1/2} x
        for (i, yi) in y.iter_mut().enumerate() {
            let s: f64 = self
                .g
                .neighbors(i)
                .iter()
                .map(|&j| self.inv_sqrt_deg[j] * x[j])
                .sum();
            *yi = x[i] + self.inv_sqrt_deg[i] * s;
        }
    }
}

/// Laplacian Eigenmaps embedding together with the eigenvalue of the
/// discarded constant mode.
#[derive(Debug, Clone)]
pub struct LeResult {
    pub embedding: Embedding,
    pub trivial_eigenvalue: f64,
}

pub fn le_embed(g: &Graph, d: usize) -> Result<Embedding> {
    Ok(le_embed_with(g, d, EigenSolver::Auto, 0)?.embedding)
}

/// Solves `L y = λ D y` through the symmetric normalized Laplacian and
/// returns the `d` eigenvectors after the trivial one, scaled so `yᵀ D y = 1`.
pub fn le_embed_with(g: &Graph, d: usize, solver: EigenSolver, seed: u64) -> Result<LeResult> {
    let n = g.node_count();
    if n < 2 || !g.is_connected() {
        return Err(GleeError::Precondition(
            "Laplacian eigenmaps need a connected graph without isolated nodes".into(),
        ));
    }
    if d == 0 || d > n - 1 {
        return Err(GleeError::Dimension { d, n });
    }
    let inv_sqrt_deg: Vec<f64> = (0..n).map(|i| 1.0 / (g.degree(i) as f64).sqrt()).collect();
    let op = ReflectedNormalizedLaplacian {
        g,
        inv_sqrt_deg: inv_sqrt_deg.clone(),
    };
    let pairs = if solver.use_dense(n) {
        dense_descending(op.to_dense()).truncate(d + 1)
    } else {
        top_eigenpairs(&op, d + 1, solver, seed)?
    };
    let normalized: Vec<f64> = pairs.values.iter().map(|v| 2.0 - v).collect();
    let trivial = normalized[0];
    if trivial.abs() >= LE_TRIVIAL_EIGENVALUE {
        return Err(GleeError::NotConverged(format!(
            "smallest generalized eigenvalue {trivial:e} is not the trivial mode"
        )));
    }
    let mut data = vec![0.0; n * d];
    for i in 0..n {
        for j in 0..d {
            data[i * d + j] = pairs.vectors[(i, j + 1)] * inv_sqrt_deg[i];
        }
    }
    let embedding =
        Embedding::from_rows(n, d, data, normalized[1..].to_vec(), EmbeddingMethod::Le)?;
    Ok(LeResult {
        embedding,
        trivial_eigenvalue: trivial,
    })
}

/// `‖L − S^d (S^d)ᵀ‖_F` for the `d`-dimensional GLEE.
pub fn low_rank_error(g: &Graph, d: usize) -> Result<f64> {
    let e = glee_embed(g, d, 0)?;
    Ok((g.dense_laplacian() - e.gram()).norm())
}
