use std::ffi::{CStr, CString};
use std::ptr;

use glee_ffi::*;

fn last_error() -> String {
    let p = glee_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn triangle() -> *mut GleeGraph {
    let text = CString::new("0 1\n1 2\n2 0\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { glee_graph_from_edge_list(text.as_ptr(), &mut g) }, GleeStatus::Ok);
    g
}

#[test]
fn graph_lifecycle() {
    let g = triangle();
    unsafe {
        assert_eq!(glee_graph_node_count(g), 3);
        assert_eq!(glee_graph_edge_count(g), 3);
        let (mut us, mut vs) = ([0usize; 3], [0usize; 3]);
        assert_eq!(glee_graph_edges(g, us.as_mut_ptr(), vs.as_mut_ptr(), 3), GleeStatus::Ok);
        assert_eq!(us, [0, 0, 1]);
        assert_eq!(vs, [1, 2, 2]);
        let mut c = 0.0;
        assert_eq!(glee_graph_average_clustering(g, &mut c), GleeStatus::Ok);
        assert_eq!(c, 1.0);
        glee_graph_free(g);
        glee_graph_free(ptr::null_mut());
    }
}

#[test]
fn parse_errors_carry_messages() {
    let text = CString::new("0 1 0.5\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { glee_graph_from_edge_list(text.as_ptr(), &mut g) }, GleeStatus::Parse);
    assert!(g.is_null());
    assert!(last_error().contains("line 1"));
    assert_eq!(
        unsafe { glee_graph_from_edge_list(ptr::null(), &mut g) },
        GleeStatus::NullPointer
    );
}

#[test]
fn embedding_round_trip_and_scores() {
    let g = triangle();
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(glee_embed(g, 3, 0, &mut e), GleeStatus::Ok);
        assert_eq!(glee_embedding_node_count(e), 3);
        assert_eq!(glee_embedding_dim(e), 3);

        let mut rows = [0.0; 9];
        assert_eq!(glee_embedding_copy_rows(e, rows.as_mut_ptr(), 9), GleeStatus::Ok);
        let norm0: f64 = rows[..3].iter().map(|x| x * x).sum();
        assert!((norm0 - 2.0).abs() < 1e-10);
        assert_eq!(
            glee_embedding_copy_rows(e, rows.as_mut_ptr(), 8),
            GleeStatus::InvalidArgument
        );

        let mut theta = 1.0;
        assert_eq!(
            glee_theta(e, GLEE_ESTIMATOR_CONSTANT, 0.3, -1, 0, ptr::null(), &mut theta),
            GleeStatus::Ok
        );
        assert_eq!(theta, -0.5);
        assert_eq!(
            glee_theta(e, GLEE_ESTIMATOR_ORACLE, 0.3, -1, 0, ptr::null(), &mut theta),
            GleeStatus::NullPointer
        );

        let mut loss = -1.0;
        assert_eq!(glee_reconstruction_loss(e, g, -0.5, &mut loss), GleeStatus::Ok);
        assert_eq!(loss, 0.0);

        let mut cn = 0.0;
        assert_eq!(glee_cn_score(e, 0, 9, -0.5, &mut cn), GleeStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("t.emb").to_str().unwrap()).unwrap();
        assert_eq!(glee_embedding_write_file(e, path.as_ptr()), GleeStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(glee_embedding_read_file(path.as_ptr(), &mut back), GleeStatus::Ok);
        let mut again = [0.0; 9];
        assert_eq!(glee_embedding_copy_rows(back, again.as_mut_ptr(), 9), GleeStatus::Ok);
        assert_eq!(rows, again);

        glee_embedding_free(back);
        glee_embedding_free(e);
        glee_graph_free(g);
    }
}

#[test]
fn path_scores() {
    let (us, vs) = ([0usize, 1, 2], [1usize, 2, 3]);
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(glee_graph_from_edges(4, us.as_ptr(), vs.as_ptr(), 3, &mut g), GleeStatus::Ok);
        let mut e = ptr::null_mut();
        assert_eq!(glee_embed(g, 4, 0, &mut e), GleeStatus::Ok);
        let (mut cn, mut l3) = (0.0, 0.0);
        assert_eq!(glee_cn_score(e, 0, 2, -0.5, &mut cn), GleeStatus::Ok);
        assert!((cn - 1.0).abs() < 1e-10);
        assert_eq!(glee_l3_score(e, 0, 3, -0.5, &mut l3), GleeStatus::Ok);
        assert!((l3 - 1.0).abs() < 1e-10);
        glee_embedding_free(e);
        glee_graph_free(g);
    }
}

#[test]
fn dimension_error() {
    let g = triangle();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { glee_embed(g, 4, 0, &mut e) }, GleeStatus::Dimension);
    assert!(e.is_null());
    unsafe { glee_graph_free(g) };
}

#[test]
fn auc_and_generator() {
    let (pos, neg) = ([2.0, 0.0], [1.0, 1.0]);
    let mut a = 0.0;
    assert_eq!(
        unsafe { glee_auc(pos.as_ptr(), 2, neg.as_ptr(), 2, &mut a) },
        GleeStatus::Ok
    );
    assert_eq!(a, 0.5);
    assert_eq!(
        unsafe { glee_auc(pos.as_ptr(), 0, neg.as_ptr(), 2, &mut a) },
        GleeStatus::InvalidArgument
    );

    let mut g = ptr::null_mut();
    assert_eq!(unsafe { glee_generate(GLEE_MODEL_BA, 50, 4.0, 2.3, 1, &mut g) }, GleeStatus::Ok);
    assert_eq!(unsafe { glee_graph_node_count(g) }, 50);
    unsafe { glee_graph_free(g) };
    assert_eq!(
        unsafe { glee_generate(7, 50, 4.0, 2.3, 1, &mut g) },
        GleeStatus::InvalidArgument
    );
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/glee.h")).unwrap();
    for name in [
        "glee_last_error",
        "glee_graph_from_edge_list",
        "glee_graph_from_file",
        "glee_graph_from_edges",
        "glee_graph_free",
        "glee_graph_largest_component",
        "glee_embed",
        "glee_le_embed",
        "glee_embedding_copy_rows",
        "glee_theta",
        "glee_cn_score",
        "glee_l3_score",
        "glee_auc",
        "glee_generate",
        "GLEE_STATUS_OK",
        "typedef struct GleeGraph GleeGraph",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
