//! Symmetric eigensolvers.
//!
//! Small problems use a full dense decomposition. Large sparse problems use a
//! seeded block Krylov iteration with Rayleigh-Ritz extraction and explicit
//! residual checks; the block width exceeds the number of wanted pairs so
//! repeated eigenvalues are resolved.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;

use crate::error::{GleeError, Result};
use crate::graph::LaplacianMatrix;
use crate::seed::rng_from_seed;

/// Order up to which the dense decomposition is used by default.
pub const DENSE_EIGEN_MAX_N: usize = 2048;
/// Residual tolerance of the iterative solver, relative to `max(1, |λ_max|)`.
pub const ITERATIVE_TOLERANCE: f64 = 1e-9;

const KRYLOV_DEPTH: usize = 4;
const MAX_CYCLES: usize = 500;

/// Which eigensolver backs an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenSolver {
    /// Dense for `n <= DENSE_EIGEN_MAX_N`, iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

impl EigenSolver {
    pub fn use_dense(self, n: usize) -> bool {
        match self {
            EigenSolver::Auto => n <= DENSE_EIGEN_MAX_N,
            EigenSolver::Dense => true,
            EigenSolver::Iterative => false,
        }
    }
}

/// A symmetric linear operator `y = A x`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, x.ncols());
        let mut buf = vec![0.0; n];
        for (j, col) in x.column_iter().enumerate() {
            self.apply(col.as_slice(), &mut buf);
            out.column_mut(j).copy_from_slice(&buf);
        }
        out
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.apply_block(&DMatrix::identity(self.dim(), self.dim()))
    }
}

impl SymmetricOperator for LaplacianMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }

    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            LaplacianMatrix::Dense(m) => m * x,
            LaplacianMatrix::Sparse(_) => {
                let n = self.n();
                let mut out = DMatrix::zeros(n, x.ncols());
                let mut buf = vec![0.0; n];
                for (j, col) in x.column_iter().enumerate() {
                    self.mul_vec(col.as_slice(), &mut buf);
                    out.column_mut(j).copy_from_slice(&buf);
                }
                out
            }
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        LaplacianMatrix::to_dense(self)
    }
}

/// Eigenpairs sorted by descending eigenvalue; `vectors` holds one
/// unit-norm eigenvector per column.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the first `k` pairs.
    pub fn truncate(mut self, k: usize) -> Self {
        self.values.truncate(k);
        self.vectors = self.vectors.columns(0, k).into_owned();
        self
    }
}

/// Full decomposition of a symmetric matrix, eigenvalues descending.
/// Equal eigenvalues keep the solver's order (stable sort).
pub fn dense_descending(matrix: DMatrix<f64>) -> EigenPairs {
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    EigenPairs { values, vectors }
}

/// Top `k` eigenpairs of `op`, using the dense or iterative path.
pub fn top_eigenpairs(
    op: &dyn SymmetricOperator,
    k: usize,
    solver: EigenSolver,
    seed: u64,
) -> Result<EigenPairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(GleeError::Dimension { d: k, n });
    }
    if solver.use_dense(n) {
        return Ok(dense_descending(op.to_dense()).truncate(k));
    }
    block_krylov_top(op, k, seed, ITERATIVE_TOLERANCE)
}

/// Orthogonalizes the columns of `block` against `basis` and each other,
/// dropping columns that collapse to zero.
fn orthonormalize_against(basis: Option<&DMatrix<f64>>, block: DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(block.ncols());
    for col in block.column_iter() {
        let mut w: DVector<f64> = col.into_owned();
        let original = w.norm();
        if original == 0.0 {
            continue;
        }
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            if let Some(q) = basis {
                let coeffs = q.tr_mul(&w);
                w -= q * coeffs;
            }
            for a in &accepted {
                let c = a.dot(&w);
                w.axpy(-c, a, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-10 * original {
            accepted.push(w / norm);
        }
    }
    accepted
}

fn hstack(left: &DMatrix<f64>, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let n = left.nrows();
    let mut out = DMatrix::zeros(n, left.ncols() + cols.len());
    out.columns_mut(0, left.ncols()).copy_from(left);
    for (k, c) in cols.iter().enumerate() {
        out.column_mut(left.ncols() + k).copy_from(c);
    }
    out
}

fn from_columns(n: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    hstack(&DMatrix::zeros(n, 0), cols)
}

/// Seeded block Krylov iteration for the `k` largest eigenpairs.
///
/// Each cycle builds `[X, AX, A²X, ...]` (orthonormalized), extracts Ritz
/// pairs and restarts from the best `p` Ritz vectors. Converged when every
/// wanted pair satisfies `‖A v − λ v‖ ≤ tol · max(1, |λ_max|)`.
pub fn block_krylov_top(
    op: &dyn SymmetricOperator,
    k: usize,
    seed: u64,
    tol: f64,
) -> Result<EigenPairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(GleeError::Dimension { d: k, n });
    }
    let width = (k + (k / 4).max(8)).min(n);
    if width * 2 >= n {
        return Ok(dense_descending(op.to_dense()).truncate(k));
    }

    let mut rng = rng_from_seed(seed);
    let start = DMatrix::from_fn(n, width, |_, _| rng.random::<f64>() - 0.5);
    let mut x = from_columns(n, &orthonormalize_against(None, start));

    for _cycle in 0..MAX_CYCLES {
        let mut basis = x.clone();
        let mut image = op.apply_block(&x);
        let mut last = image.clone();
        for _ in 1..KRYLOV_DEPTH {
            if basis.ncols() + last.ncols() > n {
                break;
            }
            let fresh = orthonormalize_against(Some(&basis), last);
            if fresh.is_empty() {
                break;
            }
            let block = from_columns(n, &fresh);
            let block_image = op.apply_block(&block);
            basis = hstack(&basis, &fresh);
            image = {
                let cols: Vec<DVector<f64>> =
                    block_image.column_iter().map(|c| c.into_owned()).collect();
                hstack(&image, &cols)
            };
            last = block_image;
        }

        let projected = basis.tr_mul(&image);
        let projected = (&projected + projected.transpose()) * 0.5;
        let ritz = dense_descending(projected);
        let keep = width.min(ritz.len());
        let coeffs = ritz.vectors.columns(0, keep).into_owned();
        let vectors = &basis * &coeffs;
        let images = &image * &coeffs;

        let scale = ritz.values[0].abs().max(1.0);
        let converged = (0..k).all(|j| {
            let r = images.column(j) - vectors.column(j) * ritz.values[j];
            r.norm() <= tol * scale
        });
        if converged {
            return Ok(EigenPairs {
                values: ritz.values[..k].to_vec(),
                vectors: vectors.columns(0, k).into_owned(),
            });
        }
        x = vectors;
    }
    Err(GleeError::NotConverged(format!(
        "{k} eigenpairs of a {n}x{n} operator after {MAX_CYCLES} cycles"
    )))
}
