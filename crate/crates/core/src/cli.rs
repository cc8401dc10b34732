//! Command-line front end. Each subcommand reads its inputs from files,
//! runs one library pipeline and writes its outputs together with a JSON
//! record of the resolved configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bench::{estimator_benchmark, BenchConfig, BenchDim};
use crate::eigen::EigenSolver;
use crate::embed::{glee_embed_with, le_embed_with, Embedding, EmbeddingMethod};
use crate::error::{GleeError, Result};
use crate::generators::{generate, GeneratorSpec, GraphModel};
use crate::graph::{read_edge_list_file, Graph};
use crate::linkpred::{estimate_theta, link_prediction_experiment, CnSide, LinkMethod, LinkPredConfig};
use crate::reconstruct::{
    precision_curve, rank_pairs, rank_pairs_by_distance, reconstruct, reconstruction_loss,
};
use crate::report::SCHEMA_VERSION;
use crate::threshold::{EstimatorKind, MHat, DEFAULT_MAX_PAIRS};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "glee", version, about = "Geometric Laplacian eigenmap embeddings")]
pub struct Cli {
    /// Cap on worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed a graph and write the embedding file.
    Embed(EmbedArgs),
    /// Rank node pairs by embedding geometry and threshold them into edges.
    Reconstruct(ReconstructArgs),
    /// Held-out edge prediction with repeated random splits.
    Linkpred(LinkpredArgs),
    /// Sample a random graph and write its largest component.
    Generate(GenerateArgs),
    /// Compare threshold estimators on random graphs.
    EstimatorBench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Glee,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Auto,
    Dense,
    Iterative,
}

impl From<SolverArg> for EigenSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Auto => EigenSolver::Auto,
            SolverArg::Dense => EigenSolver::Dense,
            SolverArg::Iterative => EigenSolver::Iterative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorArg {
    Constant,
    Kde,
    Gmm,
    Oracle,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Constant => EstimatorKind::Constant,
            EstimatorArg::Kde => EstimatorKind::Kde,
            EstimatorArg::Gmm => EstimatorKind::Gmm,
            EstimatorArg::Oracle => EstimatorKind::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkMethodArg {
    Cn,
    L3,
    Le,
}

impl From<LinkMethodArg> for LinkMethod {
    fn from(m: LinkMethodArg) -> Self {
        match m {
            LinkMethodArg::Cn => LinkMethod::Cn,
            LinkMethodArg::L3 => LinkMethod::L3,
            LinkMethodArg::Le => LinkMethod::LeDistance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CnSideArg {
    Smaller,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Er,
    Ba,
    Hg,
}

impl From<ModelArg> for GraphModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Er => GraphModel::Er,
            ModelArg::Ba => GraphModel::Ba,
            ModelArg::Hg => GraphModel::Hg,
        }
    }
}

fn parse_m_hat(s: &str) -> std::result::Result<String, String> {
    s.parse::<MHat>().map(|_| s.to_string()).map_err(|e| e.to_string())
}

/// Threshold estimator flags shared by `reconstruct` and `linkpred`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimatorArgs {
    #[arg(long, value_enum, default_value = "kde")]
    pub estimator: EstimatorArg,
    /// Box-kernel width for the density estimator.
    #[arg(long, default_value_t = 0.3)]
    pub bandwidth: f64,
    /// Edge-count estimate for the mixture estimator: an integer, `auto`
    /// (dot products below -0.5) or `nlogn`.
    #[arg(long, default_value = "auto", value_parser = parse_m_hat)]
    pub m_hat: String,
    /// Largest number of pair dot products fed to the estimators.
    #[arg(long, default_value_t = DEFAULT_MAX_PAIRS)]
    pub max_pairs: usize,
}

impl EstimatorArgs {
    fn m_hat(&self) -> MHat {
        self.m_hat.parse().expect("validated by clap")
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    /// Input edge list.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "glee")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "auto")]
    pub solver: SolverArg,
    /// Start-vector seed for the iterative eigensolver.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the JSON record (default: `<out>.json`).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconstructArgs {
    /// Embedding file written by `embed`.
    #[arg(long)]
    pub emb: PathBuf,
    /// True edge list; enables precision@k and the loss.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Ranks for precision@k (default: powers of two and the edge count).
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; `k,precision` with `--truth`, otherwise the predicted
    /// edge list. Standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON record (default: `<out>.json`, or none when writing to stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Record wall-clock runtime in the JSON record.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LinkpredArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: LinkMethodArg,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.75)]
    pub train_frac: f64,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Endpoint supplying the centroid in the common-neighbor score.
    #[arg(long, value_enum, default_value = "smaller")]
    pub cn_side: CnSideArg,
    /// CSV of per-trial AUC (`trial,auc`). Standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 2.3)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "er,ba,hg")]
    pub models: Vec<ModelArg>,
    /// Embedding dimensions; `n` stands for the node count.
    #[arg(long, value_delimiter = ',', default_value = "32,128,512")]
    pub dims: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 8.0)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 2.3)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    pub bandwidth: f64,
    #[arg(long, default_value = "auto", value_parser = parse_m_hat)]
    pub m_hat: String,
    /// JSON report.
    #[arg(long)]
    pub out: PathBuf,
    /// Flat CSV for plotting (default: the report path with a `.csv`
    /// extension).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
/// Errors are reported on stderr as a one-line JSON record.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            emit_error("usage", &e.kind().to_string());
            return EXIT_USAGE;
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            emit_error("usage", "--threads must be positive");
            return EXIT_USAGE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let kind = if is_usage_error(&e) { "usage" } else { "runtime" };
            log::error!("{e}");
            emit_error(kind, &e.to_string());
            if kind == "usage" {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn is_usage_error(e: &GleeError) -> bool {
    match e {
        GleeError::Dimension { .. } | GleeError::InvalidArgument(_) => true,
        GleeError::Io(io) => io.kind() == io::ErrorKind::NotFound,
        _ => false,
    }
}

fn emit_error(kind: &str, message: &str) {
    let record = json!({ "error": { "kind": kind, "message": message.trim() } });
    eprintln!("{record}");
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Embed(a) => run_embed(a),
        Command::Reconstruct(a) => run_reconstruct(a),
        Command::Linkpred(a) => run_linkpred(a),
        Command::Generate(a) => run_generate(a),
        Command::EstimatorBench(a) => run_bench(a),
    }
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> Result<Graph> {
    let g = read_edge_list_file(path)?;
    log::info!(
        "loaded {}: {} nodes, {} edges",
        path.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(g)
}

fn run_embed(a: &EmbedArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let (e, extra) = match a.method {
        MethodArg::Glee => (glee_embed_with(&g, a.dim, a.seed, a.solver.into())?, json!({})),
        MethodArg::Le => {
            let r = le_embed_with(&g, a.dim, a.solver.into(), a.seed)?;
            (r.embedding, json!({ "trivial_eigenvalue": r.trivial_eigenvalue }))
        }
    };
    e.write_file(&a.out)?;
    let record = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "embed",
        "config": a,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "dim": e.dim(),
        "method": e.method().to_string(),
        "eigenvalues": e.eigenvalues(),
        "details": extra,
    });
    write_json(&a.json.clone().unwrap_or_else(|| sidecar(&a.out)), &record)
}

fn default_ks(edges: usize, ranked: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2))
        .take_while(|&k| k <= ranked)
        .collect();
    if edges >= 1 && edges <= ranked {
        ks.push(edges);
    }
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn run_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let start = Instant::now();
    let e = Embedding::read_file(&a.emb)?;
    let truth = a.truth.as_deref().map(load_graph).transpose()?;
    if let Some(g) = &truth {
        if g.node_count() != e.node_count() {
            return Err(GleeError::Mismatch(format!(
                "embedding has {} nodes, truth has {}",
                e.node_count(),
                g.node_count()
            )));
        }
    }
    let est: EstimatorKind = a.estimator.estimator.into();

    let mut record = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "reconstruct",
        "config": a,
        "nodes": e.node_count(),
        "dim": e.dim(),
        "embedding_method": e.method().to_string(),
    });

    if e.method() == EmbeddingMethod::Le {
        // distance ranking only; no threshold applies to this geometry
        let g = truth.ok_or_else(|| {
            GleeError::InvalidArgument("LE embeddings need --truth for precision@k".into())
        })?;
        let ranked = rank_pairs_by_distance(&e, None);
        let ks = if a.ks.is_empty() { default_ks(g.edge_count(), ranked.len()) } else { a.ks.clone() };
        let precision = precision_curve(&ranked, &g, &ks)?;
        write_precision(a.out.as_deref(), &ks, &precision)?;
        record["ranking"] = json!("ascending euclidean distance");
        record["precision"] = precision_json(&ks, &precision);
        return finish_reconstruct(a, record, start);
    }

    if est == EstimatorKind::Oracle && truth.is_none() {
        return Err(GleeError::InvalidArgument("the oracle estimator needs --truth".into()));
    }
    let placeholder;
    let truth_ref = match &truth {
        Some(g) => g,
        None => {
            placeholder = Graph::empty(e.node_count());
            &placeholder
        }
    };
    let theta = estimate_theta(
        &e,
        truth_ref,
        est,
        a.estimator.bandwidth,
        a.estimator.m_hat(),
        a.estimator.max_pairs,
        a.seed,
    )?;
    log::info!("theta = {} ({})", theta.theta, theta.method);
    let result = reconstruct(&e, &theta);
    record["theta"] = serde_json::to_value(&theta)?;
    record["predicted_edges"] = json!(result.predicted_edges.len());

    match &truth {
        Some(g) => {
            let loss = reconstruction_loss(&e, g, &theta)?;
            let ranked = rank_pairs(&e, None);
            let ks = if a.ks.is_empty() { default_ks(g.edge_count(), ranked.len()) } else { a.ks.clone() };
            let precision = precision_curve(&ranked, g, &ks)?;
            write_precision(a.out.as_deref(), &ks, &precision)?;
            record["loss"] = json!(loss);
            record["true_edges"] = json!(g.edge_count());
            record["precision"] = precision_json(&ks, &precision);
        }
        None => {
            let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
            w.write_record(["u", "v"])?;
            for &(u, v) in &result.predicted_edges {
                w.write_record([u.to_string(), v.to_string()])?;
            }
            w.flush()?;
        }
    }
    finish_reconstruct(a, record, start)
}

fn finish_reconstruct(a: &ReconstructArgs, mut record: serde_json::Value, start: Instant) -> Result<()> {
    let elapsed = start.elapsed().as_secs_f64();
    log::info!("reconstruct finished in {elapsed:.3}s");
    if a.timing {
        record["runtime_seconds"] = json!(elapsed);
    }
    let path = a.json.clone().or_else(|| a.out.as_deref().map(sidecar));
    match path {
        Some(p) => write_json(&p, &record),
        None => Ok(()),
    }
}

fn precision_json(ks: &[usize], precision: &[f64]) -> serde_json::Value {
    ks.iter()
        .zip(precision)
        .map(|(k, p)| json!({ "k": k, "precision": p }))
        .collect()
}

fn write_precision(out: Option<&Path>, ks: &[usize], precision: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output(out)?);
    w.write_record(["k", "precision"])?;
    for (k, p) in ks.iter().zip(precision) {
        w.write_record([k.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run_linkpred(a: &LinkpredArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let mut config = LinkPredConfig::new(a.dim, a.method.into(), a.trials, a.seed);
    config.train_fraction = a.train_frac;
    config.estimator = a.estimator.estimator.into();
    config.bandwidth = a.estimator.bandwidth;
    config.m_hat = a.estimator.m_hat();
    config.max_pairs = a.estimator.max_pairs;
    config.cn_side = match a.cn_side {
        CnSideArg::Smaller => CnSide::Smaller,
        CnSideArg::Average => CnSide::Average,
    };
    let report = link_prediction_experiment(&g, &config)?;
    let point = &report.series[0];
    log::info!("AUC {:.4} ± {:.4} over {} trials", point.mean, point.std, a.trials);

    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record(["trial", "auc"])?;
    for (t, v) in point.raw.iter().enumerate() {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;

    let record = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "linkpred",
        "config": a,
        "mean": point.mean,
        "std": point.std,
        "report": report,
    });
    match a.json.clone().or_else(|| a.out.as_deref().map(sidecar)) {
        Some(p) => write_json(&p, &record),
        None => Ok(()),
    }
}

fn run_generate(a: &GenerateArgs) -> Result<()> {
    let spec = GeneratorSpec::new(a.model.into(), a.n, a.mean_degree, a.seed).with_gamma(a.gamma);
    let g = generate(&spec)?;
    log::info!(
        "generated {}: {} nodes, {} edges, mean degree {:.3}",
        spec.model,
        g.node_count(),
        g.edge_count(),
        g.mean_degree()
    );
    let mut w = BufWriter::new(File::create(&a.out)?);
    writeln!(
        w,
        "# schema_version={SCHEMA_VERSION} model={} n={} mean_degree={} gamma={} seed={}",
        a.model.to_possible_value().expect("no skipped variants").get_name(),
        a.n,
        a.mean_degree,
        a.gamma,
        a.seed
    )?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run_bench(a: &BenchArgs) -> Result<()> {
    let dims = a
        .dims
        .iter()
        .map(|d| d.parse::<BenchDim>())
        .collect::<Result<Vec<_>>>()?;
    let models = a
        .models
        .iter()
        .map(|&m| GeneratorSpec::new(m.into(), a.n, a.mean_degree, 0).with_gamma(a.gamma))
        .collect();
    let mut config = BenchConfig::new(models, dims, a.trials, a.seed);
    config.bandwidth = a.bandwidth;
    config.m_hat = a.m_hat.parse()?;
    let mut report = estimator_benchmark(&config)?;
    report.params.extra.insert("m_hat".into(), a.m_hat.clone());

    let record = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "estimator-bench",
        "config": a,
        "report": report,
    });
    write_json(&a.out, &record)?;
    let csv_path = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    report.write_csv(BufWriter::new(File::create(csv_path)?))
}
