//! Comparison methods: regularized-Laplacian spectral clustering on the
//! network alone, spectral clustering on the covariates alone, and a
//! covariate-assisted Laplacian with a weight grid.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::clustering::{align_and_error, ClusteringResult, KMeansOptions, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::graph::{CovariateMatrix, Graph, LabelVector};
use crate::pipeline::cluster_embedding;
use crate::spectral::{
    top_k_eigen_best_effort, top_k_left_singular_best_effort, GramOperator, SubspaceOptions,
    SymmetricOperator, DEFAULT_ZERO_THRESHOLD,
};

/// Method identifiers; the strings are the CLI contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Nac,
    NetRegLaplacian,
    CovOnly,
    CovAssisted,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Nac,
        Method::CovAssisted,
        Method::NetRegLaplacian,
        Method::CovOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Nac => "nac",
            Method::NetRegLaplacian => "net_reg_laplacian",
            Method::CovOnly => "cov_only",
            Method::CovAssisted => "cov_assisted",
        }
    }

    pub fn uses_graph(self) -> bool {
        !matches!(self, Method::CovOnly)
    }

    pub fn uses_covariates(self) -> bool {
        !matches!(self, Method::NetRegLaplacian)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nac" => Ok(Method::Nac),
            "net_reg_laplacian" => Ok(Method::NetRegLaplacian),
            "cov_only" => Ok(Method::CovOnly),
            "cov_assisted" => Ok(Method::CovAssisted),
            other => Err(Error::InvalidParams(format!("unknown method `{other}`"))),
        }
    }
}

/// How `cov_assisted` picks its weight from the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HSelection {
    /// Lowest k-means objective in the embedding.
    Wcss,
    /// Lowest error against known labels (simulation only).
    Oracle,
}

#[derive(Debug, Clone)]
pub struct BaselineConfig {
    /// Degree regularizer; `None` uses the average degree.
    pub tau_reg: Option<f64>,
    pub h_grid: Vec<f64>,
    pub selection: HSelection,
    pub restarts: usize,
    pub seed: u64,
    pub svd: SubspaceOptions,
}

/// Extra subspace vectors for the baseline eigen-solves. Their K-th
/// eigenvalue often sits inside a noise bulk, where two extra vectors
/// converge very slowly.
pub const BASELINE_OVERSAMPLE: usize = 10;

/// Five log-spaced weights from 0.1 to 10.
pub fn default_h_grid() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(-1.0 + 0.5 * i as f64)).collect()
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            tau_reg: None,
            h_grid: default_h_grid(),
            selection: HSelection::Wcss,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            svd: SubspaceOptions {
                oversample: BASELINE_OVERSAMPLE,
                ..Default::default()
            },
        }
    }
}

impl BaselineConfig {
    fn kmeans(&self) -> KMeansOptions {
        KMeansOptions {
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }

    fn svd(&self) -> SubspaceOptions {
        SubspaceOptions {
            seed: self.seed,
            ..self.svd
        }
    }
}

#[derive(Debug, Clone)]
pub struct MethodOutput {
    pub clustering: ClusteringResult,
    pub zero_rows: Vec<usize>,
    /// The embedding carried no usable structure (empty graph, rank-deficient covariates).
    pub degenerate: bool,
    /// Whether the eigen-solver met its tolerance before the sweep cap.
    pub converged: bool,
    pub chosen_h: Option<f64>,
}

/// `L_tau + I + h Xs Xs'` with `L_tau = D_tau^{-1/2} A D_tau^{-1/2}`.
/// The identity shift makes the operator positive semidefinite.
struct LaplacianOperator<'a> {
    graph: &'a Graph,
    inv_sqrt: Vec<f64>,
    covariates: Option<(f64, &'a DMatrix<f64>)>,
}

impl<'a> LaplacianOperator<'a> {
    fn new(graph: &'a Graph, tau: f64) -> Self {
        let inv_sqrt = (0..graph.n())
            .map(|i| 1.0 / (graph.degree(i) as f64 + tau).sqrt())
            .collect();
        LaplacianOperator {
            graph,
            inv_sqrt,
            covariates: None,
        }
    }
}

impl SymmetricOperator for LaplacianOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, block: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = block.clone();
        for c in 0..block.ncols() {
            let col = block.column(c);
            let mut dst = out.column_mut(c);
            for i in 0..self.graph.n() {
                let s: f64 = self
                    .graph
                    .neighbors(i)
                    .iter()
                    .map(|&j| self.inv_sqrt[j] * col[j])
                    .sum();
                dst[i] += self.inv_sqrt[i] * s;
            }
        }
        if let Some((h, xs)) = self.covariates {
            out += (xs * xs.tr_mul(block)) * h;
        }
        out
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || n < k {
        return Err(Error::Domain(format!("need 1 <= K <= n, got K = {k}, n = {n}")));
    }
    Ok(())
}

fn resolve_tau(g: &Graph, cfg: &BaselineConfig) -> Result<f64> {
    let tau = match cfg.tau_reg {
        Some(t) => t,
        None => g.average_degree()?,
    };
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("regularizer must be positive, got {tau}")));
    }
    Ok(tau)
}

fn finish(
    xi: &DMatrix<f64>,
    k: usize,
    cfg: &BaselineConfig,
    degenerate: bool,
    converged: bool,
) -> Result<MethodOutput> {
    let (normalized, clustering) = cluster_embedding(xi, k, DEFAULT_ZERO_THRESHOLD, &cfg.kmeans())?;
    Ok(MethodOutput {
        clustering,
        zero_rows: normalized.zero_rows,
        degenerate,
        converged,
        chosen_h: None,
    })
}

/// Spectral clustering on the regularized Laplacian of the graph.
pub fn net_reg_laplacian(g: &Graph, k: usize, cfg: &BaselineConfig) -> Result<MethodOutput> {
    check_k(g.n(), k)?;
    if g.edge_count() == 0 {
        return finish(&DMatrix::zeros(g.n(), k), k, cfg, true, true);
    }
    let tau = resolve_tau(g, cfg)?;
    let op = LaplacianOperator::new(g, tau);
    let eig = top_k_eigen_best_effort(&op, k, &cfg.svd())?;
    finish(&eig.vectors, k, cfg, false, eig.converged)
}

/// Spectral clustering on the left singular vectors of the covariates.
pub fn cov_only(x: &CovariateMatrix, k: usize, cfg: &BaselineConfig) -> Result<MethodOutput> {
    check_k(x.n(), k)?;
    if k > x.p() {
        return Err(Error::Domain(format!("K = {k} exceeds covariate dimension {}", x.p())));
    }
    let emb = top_k_left_singular_best_effort(x.values(), k, &cfg.svd())?;
    let s = &emb.singular_values;
    let degenerate = s[0] == 0.0 || s[k - 1] <= 1e-10 * s[0];
    finish(&emb.xi_hat, k, cfg, degenerate, emb.converged)
}

/// Covariates scaled to unit spectral norm, so `Xs Xs'` and `L_tau` are on
/// the same scale.
pub fn scaled_covariates(x: &CovariateMatrix, svd: &SubspaceOptions) -> Result<DMatrix<f64>> {
    let top = top_k_eigen_best_effort(&GramOperator(x.values()), 1, svd)?;
    let norm = top.values[0].max(0.0).sqrt();
    Ok(if norm > 0.0 {
        x.values() / norm
    } else {
        x.values().clone()
    })
}

/// Spectral clustering on `L_tau + h Xs Xs'` for each `h` in the grid.
/// With [`HSelection::Oracle`] the truth labels must be supplied.
pub fn cov_assisted(
    g: &Graph,
    x: &CovariateMatrix,
    k: usize,
    cfg: &BaselineConfig,
    truth: Option<&LabelVector>,
) -> Result<MethodOutput> {
    check_k(g.n(), k)?;
    if x.n() != g.n() {
        return Err(Error::Dimension(format!(
            "covariates have {} rows, graph has {} nodes",
            x.n(),
            g.n()
        )));
    }
    if cfg.h_grid.is_empty() || cfg.h_grid.iter().any(|&h| !(h >= 0.0)) {
        return Err(Error::InvalidParams("h grid must be non-empty and non-negative".into()));
    }
    if cfg.selection == HSelection::Oracle && truth.is_none() {
        return Err(Error::InvalidParams("oracle selection needs truth labels".into()));
    }
    let tau = if g.edge_count() == 0 {
        1.0
    } else {
        resolve_tau(g, cfg)?
    };
    let xs = scaled_covariates(x, &cfg.svd())?;
    let candidates: Vec<Result<(f64, MethodOutput)>> = cfg
        .h_grid
        .par_iter()
        .map(|&h| {
            let mut op = LaplacianOperator::new(g, tau);
            op.covariates = Some((h, &xs));
            let eig = top_k_eigen_best_effort(&op, k, &cfg.svd())?;
            let mut out = finish(&eig.vectors, k, cfg, false, eig.converged)?;
            out.chosen_h = Some(h);
            let score = match (cfg.selection, truth) {
                (HSelection::Oracle, Some(t)) => {
                    align_and_error(&out.clustering.labels, t, k.max(t.k()))?.error_rate
                }
                _ => out.clustering.wcss,
            };
            Ok((score, out))
        })
        .collect();
    let mut best: Option<(f64, MethodOutput)> = None;
    for cand in candidates {
        let (score, out) = cand?;
        if best.as_ref().map_or(true, |(s, _)| score < *s) {
            best = Some((score, out));
        }
    }
    Ok(best.expect("non-empty grid").1)
}
