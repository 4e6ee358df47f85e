//! Degree-corrected stochastic blockmodel with node covariates: generator,
//! dense/sparse regime classification, the oracle matrix and its
//! singular-vector structure, and the `tau` matrix norm.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CovariateMatrix, Graph, LabelVector};
use crate::io;
use crate::seed::mix_seed;
use crate::spectral::{top_k_eigen, GramOperator, SubspaceOptions};

/// Uniform law for the degree parameters of one community.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaLaw {
    pub lo: f64,
    pub hi: f64,
}

impl ThetaLaw {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        ThetaLaw { lo, hi }
    }

    pub fn constant(v: f64) -> Self {
        ThetaLaw { lo: v, hi: v }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub k: usize,
    pub pi: Vec<f64>,
    /// Symmetric `K x K` connection intensities.
    pub p_matrix: Vec<Vec<f64>>,
    pub theta_law: Vec<ThetaLaw>,
    /// `K x p` community covariate means.
    pub means: Vec<Vec<f64>>,
    /// Additional mixture components that belong to no community.
    #[serde(default)]
    pub extra_means: Vec<Vec<f64>>,
    pub cov_noise_sd: f64,
    pub gamma: f64,
    pub seed: u64,
}

impl ModelParams {
    pub fn p(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn components(&self) -> usize {
        self.means.len() + self.extra_means.len()
    }

    pub fn component_mean(&self, c: usize) -> &[f64] {
        if c < self.k {
            &self.means[c]
        } else {
            &self.extra_means[c - self.k]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        let k = self.k;
        if self.n == 0 || k == 0 {
            return bad("n and K must be positive".into());
        }
        if self.pi.len() != k || self.theta_law.len() != k || self.means.len() != k {
            return bad(format!("pi, theta_law and means must all have K = {k} entries"));
        }
        if self.pi.iter().any(|&v| !(v >= 0.0)) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return bad("pi must be non-negative and sum to 1".into());
        }
        if self.p_matrix.len() != k || self.p_matrix.iter().any(|r| r.len() != k) {
            return bad(format!("P must be {k} x {k}"));
        }
        for a in 0..k {
            for b in 0..k {
                let v = self.p_matrix[a][b];
                if !(0.0..=1.0).contains(&v) {
                    return bad(format!("P({a}, {b}) = {v} outside [0, 1]"));
                }
                if (v - self.p_matrix[b][a]).abs() > 1e-15 {
                    return bad("P must be symmetric".into());
                }
            }
        }
        for (c, law) in self.theta_law.iter().enumerate() {
            if !(law.lo > 0.0 && law.lo <= law.hi && law.hi <= 1.0) {
                return bad(format!("theta law of community {c} must satisfy 0 < lo <= hi <= 1"));
            }
        }
        let p = self.p();
        if p == 0 {
            return bad("covariate dimension must be positive".into());
        }
        if self.means.iter().chain(&self.extra_means).any(|r| r.len() != p) {
            return bad("all mean rows must have the same length".into());
        }
        if self.means.iter().chain(&self.extra_means).flatten().any(|v| !v.is_finite()) {
            return bad("mean entries must be finite".into());
        }
        if !(self.cov_noise_sd >= 0.0 && self.cov_noise_sd.is_finite()) {
            return bad("covariate noise sd must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma = {} outside [0, 1]", self.gamma));
        }
        if self.gamma > 0.0 && self.components() < 2 {
            return bad("mis-specification needs at least two mixture components".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub graph: Graph,
    pub covariates: CovariateMatrix,
    pub truth: LabelVector,
    pub theta: Vec<f64>,
    /// Nodes whose covariates came from a component other than their community's.
    pub misspecified: Vec<usize>,
    pub drawn_distribution: Vec<usize>,
    /// Number of pairs whose edge probability exceeded 1 and was clamped.
    pub clamped_probabilities: usize,
}

pub fn generate(params: &ModelParams) -> Result<GeneratedInstance> {
    params.validate()?;
    let (n, k, p) = (params.n, params.k, params.p());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 0.0;
    for &w in &params.pi {
        acc += w;
        cumulative.push(acc);
    }
    let labels: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * acc;
            cumulative.iter().position(|&c| u < c).unwrap_or(k - 1)
        })
        .collect();

    let theta: Vec<f64> = labels
        .iter()
        .map(|&l| {
            let law = params.theta_law[l];
            law.lo + (law.hi - law.lo) * rng.gen::<f64>()
        })
        .collect();

    let mut edges = Vec::new();
    let mut clamped = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut prob = theta[i] * theta[j] * params.p_matrix[labels[i]][labels[j]];
            if prob > 1.0 {
                clamped += 1;
                prob = 1.0;
            }
            if rng.gen::<f64>() < prob {
                edges.push((i, j));
            }
        }
    }
    if clamped > 0 {
        log::warn!("{clamped} edge probabilities exceeded 1 and were clamped");
    }

    let comps = params.components();
    let mut drawn = Vec::with_capacity(n);
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let own = labels[i];
        let u: f64 = rng.gen();
        let comp = if u < params.gamma {
            let r = rng.gen_range(0..comps - 1);
            if r >= own {
                r + 1
            } else {
                r
            }
        } else {
            own
        };
        drawn.push(comp);
        let mean = params.component_mean(comp);
        for j in 0..p {
            let z: f64 = StandardNormal.sample(&mut rng);
            x[(i, j)] = mean[j] + params.cov_noise_sd * z;
        }
    }
    let misspecified = (0..n).filter(|&i| drawn[i] != labels[i]).collect();

    Ok(GeneratedInstance {
        graph: Graph::from_edges(n, edges)?,
        covariates: CovariateMatrix::new(x)?,
        truth: LabelVector::new(labels, k)?,
        theta,
        misspecified,
        drawn_distribution: drawn,
        clamped_probabilities: clamped,
    })
}

/// The two covariate designs of the simulation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimCase {
    /// p = 600, 10% of columns informative.
    HighDim,
    /// p = 20, four informative columns per component.
    LowDim,
}

impl DimCase {
    pub fn p(self) -> usize {
        match self {
            DimCase::HighDim => 600,
            DimCase::LowDim => 20,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DimCase::HighDim => "high_dim",
            DimCase::LowDim => "low_dim",
        }
    }
}

impl std::str::FromStr for DimCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high_dim" | "high" => Ok(DimCase::HighDim),
            "low_dim" | "low" => Ok(DimCase::LowDim),
            other => Err(Error::InvalidParams(format!("unknown dimension case `{other}`"))),
        }
    }
}

pub const MIXTURE_COMPONENTS: usize = 5;
pub const BASELINE_K: usize = 3;

#[derive(Debug, Clone)]
pub struct MixtureMeans {
    /// One row per mixture component; the first `K` are the communities.
    pub rows: Vec<Vec<f64>>,
    /// 0-based columns that carry signal in at least one component.
    pub useful_columns: Vec<usize>,
}

/// Component means of the simulation design.
///
/// High-dim: 60 of 600 columns are drawn as informative and every component
/// mean is `mu * Bernoulli(1/2)` there, zero elsewhere. Low-dim: component
/// `k` (1-based) has mean `mu + 0.1 * Bernoulli(1/2)` on 1-based columns
/// `5k-4..=5k-1` and `0.1 * Bernoulli(1/2)` elsewhere; columns past `p = 20`
/// are dropped, so component 5 has no elevated columns.
pub fn benchmark_means(case: DimCase, mu: f64, seed: u64) -> MixtureMeans {
    let p = case.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; p]; MIXTURE_COMPONENTS];
    match case {
        DimCase::HighDim => {
            let mut useful: Vec<usize> = sample(&mut rng, p, p / 10).into_vec();
            useful.sort_unstable();
            for row in &mut rows {
                for &j in &useful {
                    row[j] = if rng.gen_bool(0.5) { mu } else { 0.0 };
                }
            }
            MixtureMeans {
                rows,
                useful_columns: useful,
            }
        }
        DimCase::LowDim => {
            let mut useful = BTreeSet::new();
            for (c, row) in rows.iter_mut().enumerate() {
                let k1 = c + 1;
                let block = (5 * k1 - 4)..=(5 * k1 - 1);
                for (j, slot) in row.iter_mut().enumerate() {
                    let bump = if rng.gen_bool(0.5) { 0.1 } else { 0.0 };
                    if block.contains(&(j + 1)) {
                        *slot = mu + bump;
                        useful.insert(j);
                    } else {
                        *slot = bump;
                    }
                }
            }
            MixtureMeans {
                rows,
                useful_columns: useful.into_iter().collect(),
            }
        }
    }
}

/// Knobs of the three-community benchmark model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub n: usize,
    pub dim_case: DimCase,
    /// Between-community intensity (off-diagonal of P).
    pub between: f64,
    /// Signal strength of the component means.
    pub mu: f64,
    pub gamma: f64,
    pub seed: u64,
}

impl BaselineSpec {
    pub fn default_mu(case: DimCase) -> f64 {
        match case {
            DimCase::HighDim => 0.3,
            DimCase::LowDim => 0.5,
        }
    }

    pub fn new(n: usize, dim_case: DimCase, seed: u64) -> Self {
        BaselineSpec {
            n,
            dim_case,
            between: 0.5,
            mu: Self::default_mu(dim_case),
            gamma: 0.1,
            seed,
        }
    }
}

pub const DENSE_THETA: ThetaLaw = ThetaLaw { lo: 0.3, hi: 0.6 };
pub const SPARSE_THETA: ThetaLaw = ThetaLaw { lo: 0.03, hi: 0.06 };

/// Three equally likely communities, two dense and one sparse, with
/// covariates from a five-component Gaussian mixture.
pub fn benchmark_model(spec: &BaselineSpec) -> ModelParams {
    let k = BASELINE_K;
    let a = spec.between;
    let p_matrix = (0..k)
        .map(|r| (0..k).map(|c| if r == c { 1.0 } else { a }).collect())
        .collect();
    let mix = benchmark_means(spec.dim_case, spec.mu, mix_seed(&[spec.seed, 0x6d65_616e]));
    let mut rows = mix.rows;
    let extra_means = rows.split_off(k);
    ModelParams {
        n: spec.n,
        k,
        pi: vec![1.0 / 3.0; 3],
        p_matrix,
        theta_law: vec![DENSE_THETA, DENSE_THETA, SPARSE_THETA],
        means: rows,
        extra_means,
        cov_noise_sd: 1.0,
        gamma: spec.gamma,
        seed: spec.seed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// Dense if every member has `theta_i >= c * theta_max`.
    pub c: f64,
    /// Sparse if every member has `n * theta_i * theta_max <= big_c`.
    pub big_c: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { c: 0.1, big_c: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegimeSpec {
    pub dense_communities: Vec<usize>,
    pub sparse_communities: Vec<usize>,
}

impl RegimeSpec {
    pub fn all_dense(k: usize) -> Self {
        RegimeSpec {
            dense_communities: (0..k).collect(),
            sparse_communities: Vec::new(),
        }
    }

    pub fn is_dense(&self, community: usize) -> bool {
        self.dense_communities.contains(&community)
    }

    pub fn dense_nodes(&self, truth: &LabelVector) -> Vec<usize> {
        (0..truth.n()).filter(|&i| self.is_dense(truth.get(i))).collect()
    }

    pub fn sparse_nodes(&self, truth: &LabelVector) -> Vec<usize> {
        (0..truth.n()).filter(|&i| !self.is_dense(truth.get(i))).collect()
    }
}

/// Labels every community dense or sparse. A community meeting both
/// conditions counts as dense.
pub fn classify_regime(
    theta: &[f64],
    truth: &LabelVector,
    thresholds: &RegimeThresholds,
) -> Result<RegimeSpec> {
    if theta.len() != truth.n() {
        return Err(Error::Dimension("theta and labels differ in length".into()));
    }
    if !(thresholds.c > 0.0 && thresholds.c < 1.0 && thresholds.big_c > 0.0) {
        return Err(Error::Domain("thresholds need 0 < c < 1 and C > 0".into()));
    }
    let n = theta.len() as f64;
    let theta_max = theta.iter().copied().fold(0.0, f64::max);
    let mut spec = RegimeSpec {
        dense_communities: Vec::new(),
        sparse_communities: Vec::new(),
    };
    for community in 0..truth.k() {
        let members = || (0..truth.n()).filter(move |&i| truth.get(i) == community);
        let lo = members().map(|i| theta[i]).fold(f64::INFINITY, f64::min);
        let hi = members().map(|i| theta[i]).fold(0.0, f64::max);
        if lo >= thresholds.c * theta_max {
            spec.dense_communities.push(community);
        } else if n * hi * theta_max <= thresholds.big_c {
            spec.sparse_communities.push(community);
        } else {
            return Err(Error::AmbiguousCommunity { community });
        }
    }
    Ok(spec)
}

/// Nodes in dense communities plus well-specified nodes in sparse ones.
pub fn good_set(instance: &GeneratedInstance, regime: &RegimeSpec) -> Vec<usize> {
    let bad: BTreeSet<usize> = instance.misspecified.iter().copied().collect();
    (0..instance.truth.n())
        .filter(|&i| regime.is_dense(instance.truth.get(i)) || !bad.contains(&i))
        .collect()
}

/// Fraction of nodes that are both mis-specified and in sparse communities.
pub fn epsilon_of(instance: &GeneratedInstance, regime: &RegimeSpec) -> f64 {
    let n = instance.truth.n();
    if n == 0 {
        return 0.0;
    }
    let bad = instance
        .misspecified
        .iter()
        .filter(|&&i| !regime.is_dense(instance.truth.get(i)))
        .count();
    bad as f64 / n as f64
}

/// `max(sqrt(d1/d2) * max row abs sum, sqrt(d2/d1) * max column abs sum)`.
pub fn tau_norm(z: &DMatrix<f64>) -> f64 {
    let (d1, d2) = z.shape();
    if d1 == 0 || d2 == 0 {
        return 0.0;
    }
    let inf = z.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max);
    let one = z.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    let r = (d1 as f64 / d2 as f64).sqrt();
    (r * inf).max(one / r)
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub weight_constant: f64,
    /// Keep the `i = j` term of `Theta Pi P Pi' Theta` in the dense block.
    /// Dropping it (the zero-diagonal expectation of `A`) perturbs each
    /// dense row by a term of relative size `O(1/n)`.
    pub include_self_term: bool,
    /// `lambda_K / lambda_1` at or below this is reported as rank deficiency.
    pub rank_tol: f64,
    pub svd: SubspaceOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            weight_constant: 0.5,
            include_self_term: true,
            rank_tol: 1e-10,
            svd: SubspaceOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleDecomposition {
    pub omega: DMatrix<f64>,
    pub expected_degrees: Vec<f64>,
    pub alpha_star: Vec<f64>,
    pub good_set: Vec<usize>,
    /// `n x K` left singular vectors of the good-row restriction of omega.
    pub xi: DMatrix<f64>,
    pub lambda: Vec<f64>,
    /// `p x K` right singular vectors.
    pub u: DMatrix<f64>,
}

/// Expected covariate of each node: the mean of the component it was drawn from.
pub fn expected_covariates(params: &ModelParams, instance: &GeneratedInstance) -> DMatrix<f64> {
    let n = instance.truth.n();
    DMatrix::from_fn(n, params.p(), |i, j| {
        params.component_mean(instance.drawn_distribution[i])[j]
    })
}

pub fn oracle_matrix(
    params: &ModelParams,
    instance: &GeneratedInstance,
    regime: &RegimeSpec,
    opts: &OracleOptions,
) -> Result<OracleDecomposition> {
    let n = instance.truth.n();
    let k = params.k;
    if n < 2 {
        return Err(Error::Domain("oracle needs at least 2 nodes".into()));
    }
    let theta = &instance.theta;
    let l = instance.truth.as_slice();
    let intensity = |i: usize, j: usize| theta[i] * theta[j] * params.p_matrix[l[i]][l[j]];

    let expected_degrees: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| intensity(i, j).min(1.0)).sum())
        .collect();
    let mean_degree = expected_degrees.iter().sum::<f64>() / n as f64;
    let log_n = (n as f64).ln();
    let alpha_star: Vec<f64> = expected_degrees
        .iter()
        .map(|&d| opts.weight_constant * mean_degree / (d / log_n + 1.0))
        .collect();

    let dense: Vec<bool> = (0..n).map(|i| regime.is_dense(l[i])).collect();
    let mut mixing = DMatrix::zeros(n, n);
    for i in 0..n {
        if dense[i] {
            for j in 0..n {
                if dense[j] && (j != i || opts.include_self_term) {
                    mixing[(i, j)] = intensity(i, j);
                }
            }
        } else {
            mixing[(i, i)] = alpha_star[i];
        }
    }
    let ex = expected_covariates(params, instance);
    let omega = mixing * ex;

    let good = good_set(instance, regime);
    let mut omega_good = DMatrix::zeros(n, omega.ncols());
    for &i in &good {
        omega_good.set_row(i, &omega.row(i));
    }
    if k > omega.ncols() {
        return Err(Error::RankDeficient {
            index: k,
            value: 0.0,
            largest: 0.0,
        });
    }
    let eig = top_k_eigen(&GramOperator(&omega_good), k, &opts.svd)?;
    let lambda: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    if lambda[k - 1] <= opts.rank_tol * lambda[0] || lambda[0] == 0.0 {
        return Err(Error::RankDeficient {
            index: k,
            value: lambda[k - 1],
            largest: lambda[0],
        });
    }
    let xi = eig.vectors;
    let inv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        lambda.iter().map(|s| 1.0 / s),
    ));
    let u = omega_good.transpose() * &xi * inv;
    Ok(OracleDecomposition {
        omega,
        expected_degrees,
        alpha_star,
        good_set: good,
        xi,
        lambda,
        u,
    })
}

#[derive(Debug, Clone)]
pub struct Lemma1Report {
    /// `(community, max ||xi_i / theta_i - representative||)` for dense communities.
    pub dense_deviation: Vec<(usize, f64)>,
    /// `(community, max ||xi_i / alpha*_i - representative||)` over good sparse nodes.
    pub sparse_deviation: Vec<(usize, f64)>,
    /// Largest row norm of xi outside the good set.
    pub bad_row_norm: f64,
    pub tol: f64,
    pub zero_tol: f64,
}

impl Lemma1Report {
    pub fn dense_ok(&self) -> bool {
        self.dense_deviation.iter().all(|&(_, d)| d <= self.tol)
    }

    pub fn sparse_ok(&self) -> bool {
        self.sparse_deviation.iter().all(|&(_, d)| d <= self.tol)
    }

    pub fn bad_rows_ok(&self) -> bool {
        self.bad_row_norm <= self.zero_tol
    }

    pub fn passed(&self) -> bool {
        self.dense_ok() && self.sparse_ok() && self.bad_rows_ok()
    }

    pub fn max_deviation(&self) -> f64 {
        self.dense_deviation
            .iter()
            .chain(&self.sparse_deviation)
            .map(|&(_, d)| d)
            .fold(0.0, f64::max)
    }
}

fn scaled_row_spread(xi: &DMatrix<f64>, nodes: &[usize], scale: &[f64]) -> f64 {
    let Some(&first) = nodes.first() else {
        return 0.0;
    };
    let rep = xi.row(first) / scale[first];
    nodes
        .iter()
        .map(|&i| (xi.row(i) / scale[i] - &rep).norm())
        .fold(0.0, f64::max)
}

/// Checks that good-set rows of the oracle singular vectors are a scalar
/// multiple (theta_i for dense, alpha*_i for sparse) of one vector per
/// community, and that rows outside the good set vanish.
pub fn verify_lemma1(
    dec: &OracleDecomposition,
    regime: &RegimeSpec,
    truth: &LabelVector,
    theta: &[f64],
    tol: f64,
) -> Lemma1Report {
    let good: BTreeSet<usize> = dec.good_set.iter().copied().collect();
    let members = |c: usize| -> Vec<usize> {
        (0..truth.n())
            .filter(|&i| truth.get(i) == c && good.contains(&i))
            .collect()
    };
    let dense_deviation = regime
        .dense_communities
        .iter()
        .map(|&c| (c, scaled_row_spread(&dec.xi, &members(c), theta)))
        .collect();
    let sparse_deviation = regime
        .sparse_communities
        .iter()
        .map(|&c| (c, scaled_row_spread(&dec.xi, &members(c), &dec.alpha_star)))
        .collect();
    let bad_row_norm = (0..truth.n())
        .filter(|i| !good.contains(i))
        .map(|i| dec.xi.row(i).norm())
        .fold(0.0, f64::max);
    Lemma1Report {
        dense_deviation,
        sparse_deviation,
        bad_row_norm,
        tol,
        zero_tol: 1e-10,
    }
}

/// Serializable record of a generated instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub params: ModelParams,
    pub misspecified: Vec<usize>,
    pub theta: Vec<f64>,
    pub drawn_distribution: Vec<usize>,
    pub clamped_probabilities: usize,
}

pub const EDGES_FILE: &str = "edges.txt";
pub const COVARIATES_FILE: &str = "covariates.csv";
pub const TRUTH_FILE: &str = "truth.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes edge list, covariates, truth labels and a JSON manifest into `dir`.
pub fn write_instance(dir: &Path, params: &ModelParams, inst: &GeneratedInstance) -> Result<()> {
    fs::create_dir_all(dir)?;
    io::write_edge_list(&inst.graph, dir.join(EDGES_FILE))?;
    io::write_covariates(&inst.covariates, dir.join(COVARIATES_FILE))?;
    io::save_labels(&inst.truth, dir.join(TRUTH_FILE))?;
    let manifest = Manifest {
        seed: params.seed,
        params: params.clone(),
        misspecified: inst.misspecified.clone(),
        theta: inst.theta.clone(),
        drawn_distribution: inst.drawn_distribution.clone(),
        clamped_probabilities: inst.clamped_probabilities,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

pub fn read_instance(dir: &Path) -> Result<(ModelParams, GeneratedInstance)> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let n = manifest.params.n;
    let graph = io::load_edge_list(dir.join(EDGES_FILE), Some(n))?.graph;
    let covariates = io::load_covariates(dir.join(COVARIATES_FILE))?;
    let truth = io::load_labels(dir.join(TRUTH_FILE))?.with_k(manifest.params.k)?;
    Ok((
        manifest.params,
        GeneratedInstance {
            graph,
            covariates,
            truth,
            theta: manifest.theta,
            misspecified: manifest.misspecified,
            drawn_distribution: manifest.drawn_distribution,
            clamped_probabilities: manifest.clamped_probabilities,
        },
    ))
}
