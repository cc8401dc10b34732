//! C ABI for the glee library.
//!
//! Graphs and embeddings are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns a [`GleeStatus`]; on failure, [`glee_last_error`] gives a
//! message for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use glee::embed::{self, le_embed, Embedding};
use glee::generators::{generate, GeneratorSpec, GraphModel};
use glee::graph::{parse_edge_list, read_edge_list_file, Graph};
use glee::linkpred::{auc, cn_score, estimate_theta, l3_score};
use glee::reconstruct::reconstruction_loss;
use glee::threshold::{EstimatorKind, MHat, ThresholdEstimate, DEFAULT_MAX_PAIRS};
use glee::GleeError;

/// Opaque graph handle.
pub struct GleeGraph(Graph);

/// Opaque embedding handle.
pub struct GleeEmbedding(Embedding);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GleeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Dimension = 5,
    Precondition = 6,
    Mismatch = 7,
    NotConverged = 8,
    Generator = 9,
    Panic = 10,
}

pub const GLEE_ESTIMATOR_CONSTANT: i32 = 0;
pub const GLEE_ESTIMATOR_KDE: i32 = 1;
pub const GLEE_ESTIMATOR_GMM: i32 = 2;
pub const GLEE_ESTIMATOR_ORACLE: i32 = 3;

pub const GLEE_MODEL_ER: i32 = 0;
pub const GLEE_MODEL_BA: i32 = 1;
pub const GLEE_MODEL_HG: i32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GleeStatus, String);

impl From<GleeError> for Failure {
    fn from(e: GleeError) -> Self {
        let status = match &e {
            GleeError::Parse { .. } | GleeError::WeightedInput { .. } | GleeError::EmptyInput => {
                GleeStatus::Parse
            }
            GleeError::EmbeddingFormat(_) | GleeError::Json(_) | GleeError::Csv(_) => GleeStatus::Parse,
            GleeError::Dimension { .. } => GleeStatus::Dimension,
            GleeError::Precondition(_) => GleeStatus::Precondition,
            GleeError::InvalidArgument(_) => GleeStatus::InvalidArgument,
            GleeError::Mismatch(_) => GleeStatus::Mismatch,
            GleeError::NotConverged(_) => GleeStatus::NotConverged,
            GleeError::Generator(_) => GleeStatus::Generator,
            GleeError::Io(_) => GleeStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard<F>(body: F) -> GleeStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GleeStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GleeStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GleeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const GleeGraph) -> Result<&'a Graph, Failure> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn embedding_ref<'a>(e: *const GleeEmbedding) -> Result<&'a Embedding, Failure> {
    e.as_ref().map(|e| &e.0).ok_or_else(|| null("embedding"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(GleeStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

fn check_node(n: usize, i: usize) -> Result<(), Failure> {
    if i >= n {
        return Err(Failure(
            GleeStatus::InvalidArgument,
            format!("node {i} out of range for {n} nodes"),
        ));
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn glee_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an edge list held in a NUL-terminated string.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_from_edge_list(text: *const c_char, out: *mut *mut GleeGraph) -> GleeStatus {
    guard(|| {
        let g = parse_edge_list(c_str(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(GleeGraph(g))))
    })
}

/// Reads an edge-list file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_from_file(path: *const c_char, out: *mut *mut GleeGraph) -> GleeStatus {
    guard(|| {
        let g = read_edge_list_file(Path::new(c_str(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(GleeGraph(g))))
    })
}

/// Builds a graph on nodes `0..n` from `m` endpoint pairs `(us[k], vs[k])`.
///
/// # Safety
/// `us` and `vs` must point to `m` values each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_from_edges(
    n: usize,
    us: *const usize,
    vs: *const usize,
    m: usize,
    out: *mut *mut GleeGraph,
) -> GleeStatus {
    guard(|| {
        let us = slice(us, m, "us")?;
        let vs = slice(vs, m, "vs")?;
        let g = Graph::from_edges(n, us.iter().copied().zip(vs.iter().copied()))?;
        write_out(out, Box::into_raw(Box::new(GleeGraph(g))))
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_free(g: *mut GleeGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_node_count(g: *const GleeGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.node_count())
}

/// Edge count; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_edge_count(g: *const GleeGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Copies the sorted edges `(u < v)` into `us` and `vs`, which must hold
/// `len` values each, with `len` equal to the edge count.
///
/// # Safety
/// `us` and `vs` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_edges(g: *const GleeGraph, us: *mut usize, vs: *mut usize, len: usize) -> GleeStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if len != g.edge_count() {
            return Err(Failure(
                GleeStatus::InvalidArgument,
                format!("buffer length {len} differs from edge count {}", g.edge_count()),
            ));
        }
        if len == 0 {
            return Ok(());
        }
        if us.is_null() || vs.is_null() {
            return Err(null("edge buffer"));
        }
        for (k, &(u, v)) in g.edges().iter().enumerate() {
            us.add(k).write(u);
            vs.add(k).write(v);
        }
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_largest_component(g: *const GleeGraph, out: *mut *mut GleeGraph) -> GleeStatus {
    guard(|| {
        let lcc = graph_ref(g)?.largest_connected_component();
        write_out(out, Box::into_raw(Box::new(GleeGraph(lcc))))
    })
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_graph_average_clustering(g: *const GleeGraph, out: *mut f64) -> GleeStatus {
    guard(|| write_out(out, graph_ref(g)?.average_clustering()))
}

/// Geometric Laplacian eigenmap embedding of dimension `d`.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_embed(g: *const GleeGraph, d: usize, seed: u64, out: *mut *mut GleeEmbedding) -> GleeStatus {
    guard(|| {
        let e = embed::glee_embed(graph_ref(g)?, d, seed)?;
        write_out(out, Box::into_raw(Box::new(GleeEmbedding(e))))
    })
}

/// Laplacian eigenmaps of dimension `d`; the graph must be connected.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_le_embed(g: *const GleeGraph, d: usize, out: *mut *mut GleeEmbedding) -> GleeStatus {
    guard(|| {
        let e = le_embed(graph_ref(g)?, d)?;
        write_out(out, Box::into_raw(Box::new(GleeEmbedding(e))))
    })
}

/// # Safety
/// `e` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_free(e: *mut GleeEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_node_count(e: *const GleeEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.0.node_count())
}

/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_dim(e: *const GleeEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.0.dim())
}

/// Copies the row-major `n × d` matrix into `buf`, which must hold exactly
/// `n * d` values.
///
/// # Safety
/// `buf` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_copy_rows(e: *const GleeEmbedding, buf: *mut f64, len: usize) -> GleeStatus {
    guard(|| {
        let data = embedding_ref(e)?.as_slice();
        copy_into(data, buf, len)
    })
}

/// Copies the `d` eigenvalues (descending) into `buf`.
///
/// # Safety
/// `buf` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_eigenvalues(e: *const GleeEmbedding, buf: *mut f64, len: usize) -> GleeStatus {
    guard(|| copy_into(embedding_ref(e)?.eigenvalues(), buf, len))
}

unsafe fn copy_into(data: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if len != data.len() {
        return Err(Failure(
            GleeStatus::InvalidArgument,
            format!("buffer length {len} differs from {}", data.len()),
        ));
    }
    if len > 0 {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(data.as_ptr(), buf, len);
    }
    Ok(())
}

/// # Safety
/// `e` must be a live handle and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_write_file(e: *const GleeEmbedding, path: *const c_char) -> GleeStatus {
    guard(|| {
        embedding_ref(e)?.write_file(Path::new(c_str(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_embedding_read_file(path: *const c_char, out: *mut *mut GleeEmbedding) -> GleeStatus {
    guard(|| {
        let e = Embedding::read_file(Path::new(c_str(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(GleeEmbedding(e))))
    })
}

fn estimator_kind(code: i32) -> Result<EstimatorKind, Failure> {
    match code {
        GLEE_ESTIMATOR_CONSTANT => Ok(EstimatorKind::Constant),
        GLEE_ESTIMATOR_KDE => Ok(EstimatorKind::Kde),
        GLEE_ESTIMATOR_GMM => Ok(EstimatorKind::Gmm),
        GLEE_ESTIMATOR_ORACLE => Ok(EstimatorKind::Oracle),
        other => Err(Failure(GleeStatus::InvalidArgument, format!("unknown estimator {other}"))),
    }
}

/// Estimates the reconstruction threshold θ.
///
/// `m_hat < 0` selects the automatic edge-count estimate for the mixture
/// estimator. `truth` may be null except for the oracle estimator.
///
/// # Safety
/// Handles must be live (or null where allowed) and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn glee_theta(
    e: *const GleeEmbedding,
    estimator: i32,
    bandwidth: f64,
    m_hat: i64,
    seed: u64,
    truth: *const GleeGraph,
    out: *mut f64,
) -> GleeStatus {
    guard(|| {
        let e = embedding_ref(e)?;
        let kind = estimator_kind(estimator)?;
        let empty;
        let truth = match truth.as_ref() {
            Some(g) => &g.0,
            None if kind == EstimatorKind::Oracle => return Err(null("truth graph")),
            None => {
                empty = Graph::empty(e.node_count());
                &empty
            }
        };
        let m_hat = if m_hat < 0 { MHat::BelowConstant } else { MHat::Fixed(m_hat as f64) };
        let theta = estimate_theta(e, truth, kind, bandwidth, m_hat, DEFAULT_MAX_PAIRS, seed)?;
        write_out(out, theta.theta)
    })
}

fn threshold(theta: f64) -> Result<ThresholdEstimate, Failure> {
    if !(-1.0..=0.0).contains(&theta) {
        return Err(Failure(GleeStatus::InvalidArgument, format!("theta {theta} outside [-1, 0]")));
    }
    Ok(ThresholdEstimate::new(theta, EstimatorKind::Constant))
}

/// Thresholded reconstruction loss `2 (FP + FN)`.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn glee_reconstruction_loss(
    e: *const GleeEmbedding,
    g: *const GleeGraph,
    theta: f64,
    out: *mut f64,
) -> GleeStatus {
    guard(|| {
        let loss = reconstruction_loss(embedding_ref(e)?, graph_ref(g)?, &threshold(theta)?)?;
        write_out(out, loss)
    })
}

/// Approximate common-neighbor count of `(i, j)`.
///
/// # Safety
/// `e` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn glee_cn_score(e: *const GleeEmbedding, i: usize, j: usize, theta: f64, out: *mut f64) -> GleeStatus {
    guard(|| {
        let e = embedding_ref(e)?;
        check_node(e.node_count(), i)?;
        check_node(e.node_count(), j)?;
        write_out(out, cn_score(e, i, j, &threshold(theta)?))
    })
}

/// Approximate length-3 walk count of `(i, j)`.
///
/// # Safety
/// `e` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn glee_l3_score(e: *const GleeEmbedding, i: usize, j: usize, theta: f64, out: *mut f64) -> GleeStatus {
    guard(|| {
        let e = embedding_ref(e)?;
        check_node(e.node_count(), i)?;
        check_node(e.node_count(), j)?;
        write_out(out, l3_score(e, i, j, &threshold(theta)?))
    })
}

/// Mann-Whitney AUC of positive against negative scores.
///
/// # Safety
/// `pos` and `neg` must hold `n_pos` and `n_neg` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn glee_auc(pos: *const f64, n_pos: usize, neg: *const f64, n_neg: usize, out: *mut f64) -> GleeStatus {
    guard(|| {
        let value = auc(slice(pos, n_pos, "pos")?, slice(neg, n_neg, "neg")?)?;
        write_out(out, value)
    })
}

/// Samples a random graph (`GLEE_MODEL_*`) and returns its largest
/// connected component. `gamma` is used by the hyperbolic model only.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glee_generate(
    model: i32,
    n: usize,
    mean_degree: f64,
    gamma: f64,
    seed: u64,
    out: *mut *mut GleeGraph,
) -> GleeStatus {
    guard(|| {
        let model = match model {
            GLEE_MODEL_ER => GraphModel::Er,
            GLEE_MODEL_BA => GraphModel::Ba,
            GLEE_MODEL_HG => GraphModel::Hg,
            other => return Err(Failure(GleeStatus::InvalidArgument, format!("unknown model {other}"))),
        };
        let g = generate(&GeneratorSpec::new(model, n, mean_degree, seed).with_gamma(gamma))?;
        write_out(out, Box::into_raw(Box::new(GleeGraph(g))))
    })
}
