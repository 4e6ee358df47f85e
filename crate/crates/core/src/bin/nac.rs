use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;
use nalgebra::DMatrix;

use nac_core::baselines::{self, default_h_grid, BaselineConfig, HSelection, Method};
use nac_core::clustering::{align_and_error, error_on_subset, KMeansOptions, DEFAULT_RESTARTS};
use nac_core::config::KeyValueConfig;
use nac_core::dcsbm::{self, BaselineSpec, DimCase, ModelParams};
use nac_core::harness::{self, Profile, Study, SweepConfig};
use nac_core::io;
use nac_core::nac::DEFAULT_WEIGHT_CONSTANT;
use nac_core::pipeline::{nac_cluster, NacOptions};
use nac_core::{CovariateMatrix, Error, Graph, Result};

#[derive(Parser)]
#[command(name = "nac", version, about = "Community detection with network-adjusted covariates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a benchmark instance and write it to a directory.
    Generate(GenerateArgs),
    /// Cluster a graph with node covariates.
    Cluster(ClusterArgs),
    /// Compare predicted labels with ground truth.
    Evaluate(EvaluateArgs),
    /// Run a Monte-Carlo sweep and write CSV summaries.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// key=value file with n, dim_case, between, mu, gamma, seed.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Full model parameters as JSON (overrides the benchmark preset).
    #[arg(long, conflicts_with = "config")]
    params: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim_case: Option<DimCase>,
    /// Off-diagonal intensity of the block matrix.
    #[arg(long)]
    between: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Mis-specification probability.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    /// Edge list: one `i j` pair per line, 0-based.
    #[arg(long)]
    graph: PathBuf,
    /// Covariate CSV, one row per node.
    #[arg(long)]
    covariates: Option<PathBuf>,
    #[arg(long, short)]
    k: usize,
    #[arg(long, default_value = "nac")]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant in the self-weight of the adjusted covariates.
    #[arg(long, default_value_t = DEFAULT_WEIGHT_CONSTANT)]
    weight_c: f64,
    /// Laplacian degree regularizer; defaults to the average degree.
    #[arg(long)]
    tau_reg: Option<f64>,
    /// Comma-separated covariate weights tried by cov_assisted.
    #[arg(long, value_delimiter = ',')]
    h_grid: Option<Vec<f64>>,
    /// Output labels file, one label per line.
    #[arg(long)]
    out: PathBuf,
    /// Write the adjusted covariates and self-weights (nac only).
    #[arg(long)]
    dump_nac: Option<PathBuf>,
    /// Write the spectral embedding (nac only).
    #[arg(long)]
    dump_embedding: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, short)]
    k: usize,
    /// Node indices, one per line, to report a separate error on.
    #[arg(long)]
    subset: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    study: Option<Study>,
    #[arg(long)]
    dim_case: Option<DimCase>,
    /// Comma-separated sweep values; defaults to the study's grid.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    profile: Option<Profile>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Recompute this many random records after the run.
    #[arg(long, default_value_t = 5)]
    audit: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Cluster(a) => cluster(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Simulate(a) => simulate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<KeyValueConfig> {
    match path {
        Some(p) => KeyValueConfig::load(p),
        None => KeyValueConfig::parse(""),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let params: ModelParams = if let Some(path) = &a.params {
        let mut params: ModelParams = serde_json::from_str(&fs::read_to_string(path)?)?;
        if let Some(s) = a.seed {
            params.seed = s;
        }
        params
    } else {
        let cfg = load_config(a.config.as_deref())?;
        let dim_case = match a.dim_case {
            Some(d) => d,
            None => cfg.get("dim_case")?.unwrap_or(DimCase::LowDim),
        };
        let mut spec = BaselineSpec::new(1000, dim_case, 0);
        spec.n = a.n.or(cfg.get("n")?).unwrap_or(spec.n);
        spec.between = a.between.or(cfg.get("between")?).unwrap_or(spec.between);
        spec.mu = a.mu.or(cfg.get("mu")?).unwrap_or(spec.mu);
        spec.gamma = a.gamma.or(cfg.get("gamma")?).unwrap_or(spec.gamma);
        spec.seed = a.seed.or(cfg.get("seed")?).unwrap_or(spec.seed);
        dcsbm::benchmark_model(&spec)
    };
    let inst = dcsbm::generate(&params)?;
    dcsbm::write_instance(&a.out, &params, &inst)?;
    println!(
        "n={} p={} K={} edges={} misspecified={} clamped={} -> {}",
        params.n,
        params.p(),
        params.k,
        inst.graph.edge_count(),
        inst.misspecified.len(),
        inst.clamped_probabilities,
        a.out.display()
    );
    Ok(())
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let start = Instant::now();
    let graph_load = io::load_edge_list(&a.graph, None)?;
    let covariates = match &a.covariates {
        Some(p) => Some(io::load_covariates(p)?),
        None if a.method.uses_covariates() => {
            return Err(Error::InvalidParams(format!(
                "method {} needs --covariates",
                a.method
            )))
        }
        None => None,
    };
    // Trailing isolated nodes are invisible in an edge list; the covariate
    // rows fix the node count.
    let graph = match &covariates {
        Some(x) if x.n() > graph_load.graph.n() => {
            let edges: Vec<_> = graph_load.graph.edges().collect();
            Graph::from_edges(x.n(), edges)?
        }
        Some(x) if x.n() < graph_load.graph.n() => {
            return Err(Error::Dimension(format!(
                "graph has {} nodes but covariates have {} rows",
                graph_load.graph.n(),
                x.n()
            )))
        }
        _ => graph_load.graph,
    };
    let cfg = BaselineConfig {
        tau_reg: a.tau_reg,
        h_grid: a.h_grid.clone().unwrap_or_else(default_h_grid),
        selection: HSelection::Wcss,
        restarts: a.restarts,
        seed: a.seed,
        ..Default::default()
    };
    let (clustering, zero_rows) = match a.method {
        Method::Nac => {
            let x = covariates.as_ref().expect("checked above");
            let opts = NacOptions {
                weight_constant: a.weight_c,
                kmeans: KMeansOptions {
                    restarts: a.restarts,
                    ..Default::default()
                },
                ..Default::default()
            }
            .with_seed(a.seed);
            let outcome = nac_cluster(&graph, x, a.k, &opts)?;
            if let Some(p) = &a.dump_nac {
                let mut m = DMatrix::zeros(outcome.nac.n(), outcome.nac.p() + 1);
                m.columns_mut(0, outcome.nac.p()).copy_from(&outcome.nac.y);
                m.set_column(outcome.nac.p(), &nalgebra::DVector::from_vec(outcome.nac.alpha.clone()));
                let mut header: Vec<String> = (0..outcome.nac.p()).map(|j| format!("y{j}")).collect();
                header.push("alpha".into());
                io::write_matrix_csv(&m, Some(&header), p)?;
            }
            if let Some(p) = &a.dump_embedding {
                let header: Vec<String> = (0..a.k).map(|j| format!("xi{j}")).collect();
                io::write_matrix_csv(&outcome.embedding.xi_hat, Some(&header), p)?;
            }
            info!("singular values: {:?}", outcome.embedding.singular_values);
            (outcome.clustering, outcome.normalized.zero_rows.len())
        }
        other => {
            if a.dump_nac.is_some() || a.dump_embedding.is_some() {
                return Err(Error::InvalidParams("dumps are only available for method nac".into()));
            }
            let out = match other {
                Method::NetRegLaplacian => baselines::net_reg_laplacian(&graph, a.k, &cfg)?,
                Method::CovOnly => baselines::cov_only(covariates.as_ref().expect("checked"), a.k, &cfg)?,
                _ => baselines::cov_assisted(
                    &graph,
                    covariates.as_ref().expect("checked"),
                    a.k,
                    &cfg,
                    None,
                )?,
            };
            if out.degenerate {
                eprintln!("warning: {other} embedding is degenerate");
            }
            if let Some(h) = out.chosen_h {
                println!("chosen h: {h}");
            }
            (out.clustering, out.zero_rows.len())
        }
    };
    io::save_labels(&clustering.labels, &a.out)?;
    let p = covariates.as_ref().map_or(0, CovariateMatrix::p);
    println!("n: {}", graph.n());
    println!("p: {p}");
    println!("K: {}", a.k);
    println!("method: {}", a.method);
    println!("wcss: {:.6}", clustering.wcss);
    println!("restarts: {}", clustering.restarts_used);
    println!("zero rows: {zero_rows}");
    println!("runtime: {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let pred = io::load_labels(&a.pred)?.with_k(a.k)?;
    let truth = io::load_labels(&a.truth)?.with_k(a.k)?;
    if pred.n() != truth.n() {
        return Err(Error::Dimension(format!(
            "prediction has {} labels, truth has {}",
            pred.n(),
            truth.n()
        )));
    }
    let report = align_and_error(&pred, &truth, a.k)?;
    println!("n: {}", pred.n());
    println!("error: {}", report.error_rate);
    println!("mismatches: {}", report.mismatches);
    println!("permutation: {:?}", report.permutation);
    println!("confusion (rows predicted, columns truth):");
    for row in &report.confusion {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
        println!("{}", cells.join(""));
    }
    if let Some(path) = &a.subset {
        let subset = io::parse_index_lines(&fs::read_to_string(path)?)?;
        let e = error_on_subset(&pred, &truth, &report.permutation, &subset)?;
        println!("subset error: {e} ({} nodes)", subset.len());
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg_file = load_config(a.config.as_deref())?;
    let study = match a.study {
        Some(s) => s,
        None => cfg_file.get("study")?.unwrap_or(Study::Misspec),
    };
    let dim_case = match a.dim_case {
        Some(d) => d,
        None => cfg_file.get("dim_case")?.unwrap_or(DimCase::LowDim),
    };
    let profile = match a.profile {
        Some(p) => p,
        None => cfg_file.get("profile")?.unwrap_or(Profile::Desk),
    };
    let mut cfg = SweepConfig::new(study, dim_case, profile);
    if let Some(v) = a.values.or(cfg_file.get_list("values")?) {
        cfg.values = v;
    }
    if let Some(m) = a.methods.or(cfg_file.get_list("methods")?) {
        cfg.methods = m;
    }
    cfg.n = a.n.or(cfg_file.get("n")?).unwrap_or(cfg.n);
    cfg.reps = a.reps.or(cfg_file.get("reps")?).unwrap_or(cfg.reps);
    cfg.base_seed = a.seed.or(cfg_file.get("seed")?).unwrap_or(cfg.base_seed);
    cfg.restarts = a.restarts.or(cfg_file.get("restarts")?).unwrap_or(cfg.restarts);
    cfg.between = cfg_file.get("between")?.unwrap_or(cfg.between);
    cfg.mu = cfg_file.get("mu")?.unwrap_or(cfg.mu);
    cfg.gamma = cfg_file.get("gamma")?.unwrap_or(cfg.gamma);
    let threads: usize = a.threads.or(cfg_file.get("threads")?).unwrap_or(0);
    cfg.validate()?;

    info!(
        "{} / {}: {} values x {} reps x {} methods, n = {}",
        cfg.study.as_str(),
        cfg.dim_case.as_str(),
        cfg.values.len(),
        cfg.reps,
        cfg.methods.len(),
        cfg.n
    );
    let start = Instant::now();
    let records = if threads == 0 {
        harness::run_sweep(&cfg)?
    } else {
        harness::run_sweep_with_threads(&cfg, threads)?
    };
    harness::write_outputs(&a.out_dir, &cfg, &records)?;
    let failed = records.iter().filter(|r| r.error.is_none()).count();
    let audited = harness::audit_records(&cfg, &records, a.audit, cfg.base_seed)?;
    for row in harness::aggregate(&records) {
        println!(
            "{:>6} {:<18} mean error {:.4} (se {:.4}, {} ok, {} failed)",
            row.value, row.method, row.mean_error, row.se_error, row.reps_ok, row.reps_failed
        );
    }
    println!(
        "{} records ({failed} failed, {audited} audited) in {:.1}s -> {}",
        records.len(),
        start.elapsed().as_secs_f64(),
        a.out_dir.display()
    );
    Ok(())
}
