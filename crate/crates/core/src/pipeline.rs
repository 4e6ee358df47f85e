//! End-to-end spectral clustering on network-adjusted covariates:
//! build `Y`, take its top-K left singular vectors, normalize rows, k-means.

use nalgebra::DMatrix;

use crate::clustering::{kmeans, ClusteringResult, KMeansOptions};
use crate::error::{Error, Result};
use crate::graph::{CovariateMatrix, Graph};
use crate::nac::{build_nac, NacMatrix, DEFAULT_WEIGHT_CONSTANT};
use crate::spectral::{
    row_normalize, top_k_left_singular, RowNormalizedEmbedding, SpectralEmbedding,
    SubspaceOptions, DEFAULT_ZERO_THRESHOLD,
};

#[derive(Debug, Clone, Copy)]
pub struct NacOptions {
    pub weight_constant: f64,
    pub svd: SubspaceOptions,
    pub kmeans: KMeansOptions,
    pub zero_threshold: f64,
}

impl Default for NacOptions {
    fn default() -> Self {
        NacOptions {
            weight_constant: DEFAULT_WEIGHT_CONSTANT,
            svd: SubspaceOptions::default(),
            kmeans: KMeansOptions::default(),
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }
}

impl NacOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.svd.seed = seed;
        self.kmeans.seed = seed;
        self
    }
}

/// Everything the pipeline computed, for diagnostics and dumps.
#[derive(Debug, Clone)]
pub struct NacOutcome {
    pub nac: NacMatrix,
    pub embedding: SpectralEmbedding,
    pub normalized: RowNormalizedEmbedding,
    pub clustering: ClusteringResult,
}

/// Row-normalizes an embedding and runs restarted k-means on it.
pub fn cluster_embedding(
    xi: &DMatrix<f64>,
    k: usize,
    zero_threshold: f64,
    kmeans_opts: &KMeansOptions,
) -> Result<(RowNormalizedEmbedding, ClusteringResult)> {
    let normalized = row_normalize(xi, zero_threshold);
    let clustering = kmeans(&normalized.r_hat, k, kmeans_opts)?;
    Ok((normalized, clustering))
}

pub fn nac_cluster(
    g: &Graph,
    x: &CovariateMatrix,
    k: usize,
    opts: &NacOptions,
) -> Result<NacOutcome> {
    if k == 0 || k > g.n().min(x.p()) {
        return Err(Error::Domain(format!(
            "K = {k} must lie in [1, min(n, p)] = [1, {}]",
            g.n().min(x.p())
        )));
    }
    let nac = build_nac(g, x, opts.weight_constant)?;
    let embedding = top_k_left_singular(&nac.y, k, &opts.svd)?;
    let (normalized, clustering) =
        cluster_embedding(&embedding.xi_hat, k, opts.zero_threshold, &opts.kmeans)?;
    Ok(NacOutcome {
        nac,
        embedding,
        normalized,
        clustering,
    })
}
