//! `demm` — two-stage Dirichlet-energy clustering for multi-relational
//! graphs.
//!
//! Exit codes: 0 success, 2 parameter error, 3 data error, 4 numerical
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use demm_core::attributeless::run_stage1_na;
use demm_core::energy::{energy_report, EnergyReport};
use demm_core::features::FeatureMatrix;
use demm_core::graph::build_views;
use demm_core::io;
use demm_core::metrics;
use demm_core::pipeline::{bench_scaling, run_pipeline, Method, RunConfig};
use demm_core::stage1::{run_stage1, RelationWeights, SketchDim, Stage1Config, Stage1Mode};
use demm_core::stage2::{exact_affinity, run_stage2, Stage2Config, Stage2Mode, AFFINITY_DENSE_CAP};
use demm_core::synth::{synth_mrg, SynthConfig};
use demm_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "demm",
    version,
    about = "Dirichlet-energy clustering for multi-relational graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full clustering pipeline on a graph directory.
    Cluster(ClusterArgs),
    /// Stage I only: construct features and relation weights.
    Stage1(Stage1Args),
    /// Stage II only: cluster a feature matrix.
    Stage2(Stage2Args),
    /// Compare a clustering against ground-truth labels.
    Eval(EvalArgs),
    /// Report the Dirichlet-energy decomposition of a feature matrix.
    Energy(EnergyArgs),
    /// Generate a synthetic planted-partition graph directory.
    Synth(SynthArgs),
    /// Time the pipelines over growing synthetic sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Demm,
    #[value(name = "demm+", alias = "demm-plus")]
    DemmPlus,
    DemmNa,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Demm => Method::Demm,
            MethodArg::DemmPlus => Method::DemmPlus,
            MethodArg::DemmNa => Method::DemmNa,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage1ModeArg {
    Fast,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage2ModeArg {
    Fast,
    Oracle,
}

#[derive(Args)]
struct CommonParams {
    /// MRDE coefficient α.
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// Regularization coefficient β.
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
    /// Neumann truncation order L.
    #[arg(long = "L", default_value_t = 5, value_name = "L")]
    hops: usize,
    /// Sketch dimension m, scalar or one value per relation.
    #[arg(long = "m", default_value = "16", value_name = "M[,M2,...]")]
    sketch_dim: String,
    /// Feature dimension d.
    #[arg(long = "d", default_value_t = 128, value_name = "D")]
    feat_dim: usize,
    /// Stage I iteration cap.
    #[arg(long, default_value_t = 10)]
    max_iters: usize,
    /// Stage I relative-change convergence threshold on H.
    #[arg(long, default_value_t = 1e-4)]
    h_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CommonParams {
    fn stage1(&self) -> Result<Stage1Config> {
        Ok(Stage1Config {
            alpha: self.alpha,
            beta: self.beta,
            hops: self.hops,
            sketch_dim: parse_sketch_dim(&self.sketch_dim)?,
            max_iters: self.max_iters,
            h_tol: self.h_tol,
            seed: self.seed,
        })
    }
}

fn parse_sketch_dim(s: &str) -> Result<SketchDim> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parameter(format!("bad sketch dimension `{t}`")))
        })
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [] => Err(Error::Parameter("empty sketch dimension".into())),
        [one] => Ok(SketchDim::Scalar(*one)),
        _ => Ok(SketchDim::PerRelation(parts)),
    }
}

#[derive(Args)]
struct ClusterArgs {
    /// Graph directory (meta.json + relations/).
    #[arg(long)]
    graph: PathBuf,
    /// Method; defaults to demm+ when attributes exist, demm-na otherwise.
    #[arg(long)]
    method: Option<MethodArg>,
    /// JSON RunConfig file; overrides the individual flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cluster count K.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Gaussian kernel width σ.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Sinkhorn iteration budget.
    #[arg(long, default_value_t = 10)]
    sk_iters: usize,
    #[arg(long, default_value_t = 8)]
    kmeans_restarts: usize,
    #[arg(long, default_value_t = 100)]
    kmeans_iters: usize,
    #[command(flatten)]
    common: CommonParams,
    /// Where to write the assignment (one cluster id per line).
    #[arg(long)]
    out_clusters: Option<PathBuf>,
    /// Where to write learned weights + energy trace as JSON.
    #[arg(long)]
    out_weights: Option<PathBuf>,
    /// Where to write the Stage-I feature matrix as TSV.
    #[arg(long)]
    out_features: Option<PathBuf>,
}

fn cmd_cluster(args: &ClusterArgs) -> Result<()> {
    let graph = io::load_graph(&args.graph)?;
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| Error::DataFormat {
                path: path.display().to_string(),
                line: e.line(),
                msg: e.to_string(),
            })?
        }
        None => {
            let method = match args.method {
                Some(m) => m.into(),
                None if graph.attributes().is_some() => Method::DemmPlus,
                None => Method::DemmNa,
            };
            let mut cfg = RunConfig {
                method,
                stage1: args.common.stage1()?,
                stage2: Stage2Config {
                    k: args.k,
                    sigma: args.sigma,
                    sk_iters: args.sk_iters,
                    sk_tol: 1e-9,
                    kmeans_restarts: args.kmeans_restarts,
                    kmeans_iters: args.kmeans_iters,
                    seed: args.common.seed,
                },
                feat_dim: args.common.feat_dim,
                seed: args.common.seed,
            };
            cfg.apply_seed(args.common.seed);
            cfg
        }
    };
    let out = run_pipeline(&graph, &cfg)?;
    if let Some(path) = &args.out_clusters {
        io::write_labels(path, &out.result.assignment)?;
    }
    if let Some(path) = &args.out_weights {
        write_weights_json(path, &out.weights, out.stage1_iterations, &out.energy_trace)?;
    }
    if let Some(path) = &args.out_features {
        io::write_tsv_matrix(path, &out.features.data)?;
    }
    let summary = json!({
        "schema": 1,
        "method": cfg.method.name(),
        "n_nodes": graph.n_nodes(),
        "k": cfg.stage2.k,
        "sizes": out.result.sizes,
        "objective": out.result.objective,
        "omega": out.weights.omega(),
        "stage1_iterations": out.stage1_iterations,
        "timings": {
            "prepare_secs": out.timings.prepare_secs,
            "stage1_secs": out.timings.stage1_secs,
            "stage2_secs": out.timings.stage2_secs,
            "total_secs": out.timings.total_secs,
        },
        "assignment": if args.out_clusters.is_none() { json!(out.result.assignment) } else { json!(null) },
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("serializable")
    );
    Ok(())
}

fn write_weights_json(
    path: &Path,
    weights: &RelationWeights,
    iters: usize,
    trace: &[EnergyReport],
) -> Result<()> {
    let doc = json!({
        "schema": 1,
        "omega": weights.omega(),
        "iters": iters,
        "energy_trace": trace,
    });
    std::fs::write(
        path,
        serde_json::to_string_pretty(&doc).expect("serializable"),
    )
    .map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[derive(Args)]
struct Stage1Args {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Stage1ModeArg::Fast)]
    mode: Stage1ModeArg,
    #[command(flatten)]
    common: CommonParams,
    /// Output pair `H.tsv,weights.json`.
    #[arg(long, value_name = "H.tsv,weights.json")]
    out: String,
}

fn cmd_stage1(args: &Stage1Args) -> Result<()> {
    let (h_path, w_path) = match args.out.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => (PathBuf::from(a), PathBuf::from(b)),
        _ => {
            return Err(Error::Parameter(
                "--out expects two comma-separated paths: H.tsv,weights.json".into(),
            ))
        }
    };
    let graph = io::load_graph(&args.graph)?;
    let views = build_views(&graph);
    let cfg = args.common.stage1()?;
    let out = match graph.attributes() {
        Some(attrs) => {
            let d = args.common.feat_dim.min(attrs.ncols()).min(graph.n_nodes());
            let initial = demm_core::features::reduce_attributes(attrs, d)?;
            let mode = match args.mode {
                Stage1ModeArg::Fast => Stage1Mode::Fast,
                Stage1ModeArg::Exact => Stage1Mode::Exact,
            };
            run_stage1(&views, &initial, &cfg, mode)?
        }
        None => {
            let d = args.common.feat_dim.min(graph.n_nodes());
            let mode = match args.mode {
                Stage1ModeArg::Fast => Stage1Mode::Fast,
                Stage1ModeArg::Exact => Stage1Mode::Exact,
            };
            run_stage1_na(&views, d, &cfg, mode)?
        }
    };
    io::write_tsv_matrix(&h_path, &out.features.data)?;
    write_weights_json(&w_path, &out.weights, out.iterations, &out.trace)?;
    eprintln!(
        "stage1 done: {} iterations, omega = {:?}",
        out.iterations,
        out.weights.omega()
    );
    Ok(())
}

#[derive(Args)]
struct Stage2Args {
    /// Feature matrix TSV (N rows × d columns).
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = Stage2ModeArg::Fast)]
    mode: Stage2ModeArg,
    #[arg(long, default_value_t = 10)]
    sk_iters: usize,
    #[arg(long, default_value_t = 8)]
    kmeans_restarts: usize,
    #[arg(long, default_value_t = 100)]
    kmeans_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output assignment file (one integer per line).
    #[arg(long)]
    out: PathBuf,
    /// Oracle mode only: dump the dense affinity matrix as TSV.
    #[arg(long)]
    emit_affinity: Option<PathBuf>,
}

fn cmd_stage2(args: &Stage2Args) -> Result<()> {
    let data = io::read_tsv_matrix(&args.features)?;
    let features = FeatureMatrix::raw(data);
    let cfg = Stage2Config {
        k: args.k,
        sigma: args.sigma,
        sk_iters: args.sk_iters,
        sk_tol: 1e-9,
        kmeans_restarts: args.kmeans_restarts,
        kmeans_iters: args.kmeans_iters,
        seed: args.seed,
    };
    let mode = match args.mode {
        Stage2ModeArg::Fast => Stage2Mode::Fast,
        Stage2ModeArg::Oracle => Stage2Mode::Oracle,
    };
    if let Some(path) = &args.emit_affinity {
        if mode != Stage2Mode::Oracle {
            return Err(Error::Parameter(
                "--emit-affinity requires --mode oracle".into(),
            ));
        }
        let (pcc, _) = demm_core::features::pcc_normalize(&features);
        let s = exact_affinity(&pcc, cfg.sigma, AFFINITY_DENSE_CAP)?;
        io::write_tsv_matrix(path, &s)?;
    }
    let res = run_stage2(&features, &cfg, mode)?;
    io::write_labels(&args.out, &res.assignment)?;
    eprintln!(
        "stage2 done: method {}, sizes {:?}, objective {:.6}",
        res.method, res.sizes, res.objective
    );
    Ok(())
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let pred = io::read_labels(&args.pred)?;
    let truth = io::read_labels(&args.truth)?;
    let acc = metrics::acc(&pred, &truth)?;
    let nmi = metrics::nmi(&pred, &truth)?;
    let ari = metrics::ari(&pred, &truth)?;
    println!(
        "{{\"acc\": {:.4}, \"nmi\": {:.4}, \"ari\": {:.4}}}",
        acc, nmi, ari
    );
    Ok(())
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Feature matrix TSV to evaluate.
    #[arg(long)]
    features: PathBuf,
    /// Relation weights, comma separated, summing to 1.
    #[arg(long, value_name = "w1,w2,...")]
    weights: String,
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.5)]
    beta: f64,
    /// Initial feature matrix X for the fitting term; when omitted the
    /// fitting term is reported as 0.
    #[arg(long)]
    initial: Option<PathBuf>,
}

fn cmd_energy(args: &EnergyArgs) -> Result<()> {
    let graph = io::load_graph(&args.graph)?;
    let views = build_views(&graph);
    let h = io::read_tsv_matrix(&args.features)?;
    let omega: Vec<f64> = args
        .weights
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad weight `{t}`")))
        })
        .collect::<Result<_>>()?;
    let weights = RelationWeights::new(omega)?;
    let x = match &args.initial {
        Some(path) => io::read_tsv_matrix(path)?,
        None => h.clone(),
    };
    if x.dim() != h.dim() {
        return Err(Error::DimensionMismatch(
            "initial features must match --features in shape".into(),
        ));
    }
    let report = energy_report(&h, &x, &views, &weights, args.alpha, args.beta)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    Ok(())
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 20)]
    nodes_per_cluster: usize,
    #[arg(long, default_value_t = 2)]
    relations: usize,
    #[arg(long, default_value_t = 0.5)]
    p_in: f64,
    /// Between-cluster edge probability per relation (comma separated) or
    /// one value for all.
    #[arg(long, default_value = "0.05")]
    p_out: String,
    /// Attribute dimension; 0 for an attribute-less graph.
    #[arg(long, default_value_t = 8)]
    attr_dim: usize,
    #[arg(long, default_value_t = 6.0)]
    attr_sep: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let parts: Vec<f64> = args
        .p_out
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad probability `{t}`")))
        })
        .collect::<Result<_>>()?;
    let p_out = if parts.len() == 1 {
        vec![parts[0]; args.relations]
    } else {
        parts
    };
    let graph = synth_mrg(&SynthConfig {
        clusters: args.clusters,
        nodes_per_cluster: args.nodes_per_cluster,
        relations: args.relations,
        p_in: args.p_in,
        p_out,
        attr_dim: args.attr_dim,
        attr_sep: args.attr_sep,
        seed: args.seed,
    })?;
    io::save_graph(&graph, &args.out)?;
    eprintln!(
        "wrote {} nodes, {} edges over {} relations to {}",
        graph.n_nodes(),
        graph.total_edges(),
        graph.n_relations(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
struct BenchArgs {
    /// Node counts, comma separated.
    #[arg(long, default_value = "1000,2000,4000")]
    sizes: String,
    /// Methods to time, comma separated (demm, demm+, demm-na).
    #[arg(long, default_value = "demm+")]
    methods: String,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long = "d", default_value_t = 16)]
    feat_dim: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parameter(format!("bad size `{t}`")))
        })
        .collect::<Result<_>>()?;
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .map(|t| match t.trim() {
            "demm" => Ok(Method::Demm),
            "demm+" | "demm-plus" => Ok(Method::DemmPlus),
            "demm-na" => Ok(Method::DemmNa),
            other => Err(Error::Parameter(format!("unknown method `{other}`"))),
        })
        .collect::<Result<_>>()?;
    let rows = bench_scaling(
        &methods,
        &sizes,
        args.avg_degree,
        args.clusters,
        args.feat_dim,
        args.repeats,
        args.seed,
    )?;
    let mut csv = String::from("method,n_nodes,prepare_secs,stage1_secs,stage2_secs,total_secs\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6}\n",
            r.method, r.n_nodes, r.prepare_secs, r.stage1_secs, r.stage2_secs, r.total_secs
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Stage1(a) => cmd_stage1(a),
        Command::Stage2(a) => cmd_stage2(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Energy(a) => cmd_energy(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
