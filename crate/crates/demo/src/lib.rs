//! Browser bindings: sample a benchmark instance, cluster it, and report
//! what the page plots. Every entry point returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use nac_core::baselines::{HSelection, Method};
use nac_core::clustering::{align_and_error, error_on_subset, KMeansOptions};
use nac_core::dcsbm::{self, BaselineSpec, DimCase, GeneratedInstance, RegimeThresholds};
use nac_core::harness::{group_errors, run_method};
use nac_core::nac::alpha_weights;
use nac_core::pipeline::{nac_cluster, NacOptions};

const MIN_N: usize = 30;
const MAX_N: usize = 2000;
const RESTARTS: usize = 10;

/// Slider values shared by every entry point.
#[derive(Debug, Clone, Copy)]
pub struct Knobs {
    pub n: usize,
    pub dim_case: DimCase,
    pub between: f64,
    pub mu: f64,
    pub gamma: f64,
    pub seed: u64,
}

impl Knobs {
    fn instance(&self) -> Result<GeneratedInstance, String> {
        if !(MIN_N..=MAX_N).contains(&self.n) {
            return Err(format!("n must lie in [{MIN_N}, {MAX_N}]"));
        }
        let spec = BaselineSpec {
            n: self.n,
            dim_case: self.dim_case,
            between: self.between,
            mu: self.mu,
            gamma: self.gamma,
            seed: self.seed,
        };
        dcsbm::generate(&dcsbm::benchmark_model(&spec)).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct ScatterView {
    /// Rows of the normalized embedding, projected on its 2nd and 3rd axes.
    pub points: Vec<[f64; 2]>,
    pub truth: Vec<usize>,
    /// Predicted labels mapped onto the truth labels.
    pub predicted: Vec<usize>,
    pub misspecified: Vec<usize>,
    pub error: f64,
    pub error_dense: Option<f64>,
    pub error_sparse_good: Option<f64>,
    pub epsilon: f64,
    pub singular_values: Vec<f64>,
}

pub fn scatter(knobs: &Knobs, weight_constant: f64) -> Result<ScatterView, String> {
    let inst = knobs.instance()?;
    let k = inst.truth.k();
    let opts = NacOptions {
        weight_constant,
        kmeans: KMeansOptions {
            restarts: RESTARTS,
            ..Default::default()
        },
        ..Default::default()
    }
    .with_seed(knobs.seed);
    let out = nac_cluster(&inst.graph, &inst.covariates, k, &opts).map_err(|e| e.to_string())?;
    let labels = &out.clustering.labels;
    let report = align_and_error(labels, &inst.truth, k).map_err(|e| e.to_string())?;
    let (groups, epsilon) =
        group_errors(labels, &inst, &RegimeThresholds::default()).map_err(|e| e.to_string())?;
    let r = &out.normalized.r_hat;
    Ok(ScatterView {
        points: (0..r.nrows()).map(|i| [r[(i, 1)], r[(i, 2)]]).collect(),
        truth: inst.truth.as_slice().to_vec(),
        predicted: labels.as_slice().iter().map(|&l| report.permutation[l]).collect(),
        misspecified: inst.misspecified.clone(),
        error: report.error_rate,
        error_dense: groups.dense,
        error_sparse_good: groups.sparse_good,
        epsilon,
        singular_values: out.embedding.singular_values,
    })
}

#[derive(Debug, Serialize)]
pub struct AlphaView {
    pub degree: Vec<usize>,
    pub alpha: Vec<f64>,
    pub community: Vec<usize>,
    pub mean_degree: f64,
}

pub fn alpha_profile(knobs: &Knobs, weight_constant: f64) -> Result<AlphaView, String> {
    let inst = knobs.instance()?;
    let alpha = alpha_weights(&inst.graph, weight_constant).map_err(|e| e.to_string())?;
    Ok(AlphaView {
        degree: inst.graph.degrees(),
        alpha,
        community: inst.truth.as_slice().to_vec(),
        mean_degree: inst.graph.average_degree().map_err(|e| e.to_string())?,
    })
}

#[derive(Debug, Serialize)]
pub struct MethodScore {
    pub method: String,
    pub error: Option<f64>,
    /// Error on the sparse third community.
    pub error_sparse_community: Option<f64>,
    pub message: Option<String>,
}

pub fn compare(knobs: &Knobs) -> Result<Vec<MethodScore>, String> {
    let inst = knobs.instance()?;
    let truth = &inst.truth;
    let sparse = truth.members(2);
    Ok(Method::ALL
        .iter()
        .map(|&m| {
            let scored = run_method(
                m,
                &inst.graph,
                &inst.covariates,
                truth.k(),
                knobs.seed,
                RESTARTS,
                HSelection::Oracle,
                Some(truth),
            )
            .and_then(|labels| {
                let report = align_and_error(&labels, truth, truth.k())?;
                let sparse_err = if sparse.is_empty() {
                    None
                } else {
                    Some(error_on_subset(&labels, truth, &report.permutation, &sparse)?)
                };
                Ok((report.error_rate, sparse_err))
            });
            match scored {
                Ok((e, s)) => MethodScore {
                    method: m.to_string(),
                    error: Some(e),
                    error_sparse_community: s,
                    message: None,
                },
                Err(e) => MethodScore {
                    method: m.to_string(),
                    error: None,
                    error_sparse_community: None,
                    message: Some(e.to_string()),
                },
            }
        })
        .collect())
}

fn knobs(n: u32, dim_case: &str, between: f64, mu: f64, gamma: f64, seed: u32) -> Result<Knobs, JsError> {
    Ok(Knobs {
        n: n as usize,
        dim_case: dim_case.parse().map_err(|e: nac_core::Error| JsError::new(&e.to_string()))?,
        between,
        mu,
        gamma,
        seed: seed as u64,
    })
}

fn to_json<T: Serialize>(v: Result<T, String>) -> Result<String, JsError> {
    let v = v.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Clusters a fresh instance and returns the embedding scatter.
#[wasm_bindgen(js_name = clusterScatter)]
pub fn cluster_scatter(
    n: u32,
    dim_case: &str,
    between: f64,
    mu: f64,
    gamma: f64,
    seed: u32,
    weight_constant: f64,
) -> Result<String, JsError> {
    to_json(scatter(&knobs(n, dim_case, between, mu, gamma, seed)?, weight_constant))
}

/// Per-node degree and self-weight of a fresh instance.
#[wasm_bindgen(js_name = alphaProfile)]
pub fn alpha_profile_js(
    n: u32,
    dim_case: &str,
    between: f64,
    mu: f64,
    gamma: f64,
    seed: u32,
    weight_constant: f64,
) -> Result<String, JsError> {
    to_json(alpha_profile(&knobs(n, dim_case, between, mu, gamma, seed)?, weight_constant))
}

/// Error rates of all four methods on one instance.
#[wasm_bindgen(js_name = compareMethods)]
pub fn compare_methods(
    n: u32,
    dim_case: &str,
    between: f64,
    mu: f64,
    gamma: f64,
    seed: u32,
) -> Result<String, JsError> {
    to_json(compare(&knobs(n, dim_case, between, mu, gamma, seed)?))
}
