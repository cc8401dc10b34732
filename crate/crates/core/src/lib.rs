//! Geometric Laplacian eigenmap embeddings.
//!
//! The embedding `S = P √Λ` is built from the top eigenpairs of the graph
//! Laplacian `L = D − A`, so that `S Sᵀ` is the best rank-`d` approximation
//! of `L`. At full dimension each row norm squared is the node's degree and
//! each off-diagonal dot product is minus the adjacency entry; thresholding
//! dot products therefore reconstructs the graph, and centroids of node sets
//! count the edges between them.
//!
//! ```
//! use glee::{glee_embed, parse_edge_list};
//!
//! let g = parse_edge_list("0 1\n1 2\n2 0\n").unwrap();
//! let e = glee_embed(&g, 3, 0).unwrap();
//! assert!((e.squared_norm(0) - 2.0).abs() < 1e-10);
//! assert!((e.dot(0, 1) + 1.0).abs() < 1e-10);
//! ```

pub mod bench;
pub mod cli;
pub mod eigen;
pub mod embed;
pub mod error;
pub mod generators;
pub mod graph;
pub mod linkpred;
pub mod reconstruct;
pub mod report;
pub mod seed;
pub mod threshold;

pub use bench::{estimator_benchmark, BenchConfig, BenchDim};
pub use eigen::EigenSolver;
pub use embed::{glee_embed, glee_embed_with, le_embed, le_embed_with, low_rank_error, Embedding, EmbeddingMethod};
pub use error::{GleeError, Result};
pub use generators::{generate, GeneratorSpec, GraphModel};
pub use graph::{load_edge_list, parse_edge_list, read_edge_list_file, Graph};
pub use linkpred::{
    auc, centroid_edge_count, cn_score, l3_score, link_prediction_experiment, split_graph, CnSide,
    LinkMethod, LinkPredConfig, SplitDataset,
};
pub use reconstruct::{
    precision_at_k, reconstruct, reconstruction_loss, LossProfile, ReconstructionResult,
};
pub use report::{EvalReport, SeriesPoint};
pub use threshold::{
    theta_constant, theta_gmm, theta_kde, theta_oracle, DotProductSample, EstimatorKind, MHat,
    ThresholdEstimate,
};
