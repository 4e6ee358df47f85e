//! Monte-Carlo sweeps over the three-community benchmark model.
//!
//! Every (sweep value, repetition) pair gets its own instance seed derived
//! from the base seed, so results do not depend on scheduling. All methods
//! see the same generated instance.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{self, BaselineConfig, HSelection, Method};
use crate::clustering::{align_and_error, error_on_subset, KMeansOptions, DEFAULT_RESTARTS};
use crate::dcsbm::{
    self, classify_regime, epsilon_of, good_set, BaselineSpec, DimCase, GeneratedInstance,
    RegimeThresholds,
};
use crate::error::{Error, Result};
use crate::graph::{CovariateMatrix, Graph, LabelVector};
use crate::pipeline::{nac_cluster, NacOptions};
use crate::seed::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Study {
    /// Sweeps the between-community intensity.
    PMatrix,
    /// Sweeps the covariate signal strength.
    Signal,
    /// Sweeps the mis-specification rate.
    Misspec,
}

impl Study {
    pub fn as_str(self) -> &'static str {
        match self {
            Study::PMatrix => "p_matrix",
            Study::Signal => "signal",
            Study::Misspec => "misspec",
        }
    }

    fn id(self) -> u64 {
        match self {
            Study::PMatrix => 1,
            Study::Signal => 2,
            Study::Misspec => 3,
        }
    }

    /// Inclusive range of admissible sweep values.
    pub fn range(self, dim: DimCase) -> (f64, f64) {
        match (self, dim) {
            (Study::PMatrix, _) => (0.1, 0.9),
            (Study::Signal, DimCase::HighDim) => (0.1, 0.5),
            (Study::Signal, DimCase::LowDim) => (0.3, 0.7),
            (Study::Misspec, _) => (0.0, 0.7),
        }
    }

    pub fn default_values(self, dim: DimCase) -> Vec<f64> {
        let (lo, hi) = self.range(dim);
        let step = 0.1;
        let count = ((hi - lo) / step).round() as usize + 1;
        (0..count).map(|i| round6(lo + step * i as f64)).collect()
    }
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_matrix" => Ok(Study::PMatrix),
            "signal" => Ok(Study::Signal),
            "misspec" => Ok(Study::Misspec),
            other => Err(Error::InvalidParams(format!("unknown study `{other}`"))),
        }
    }
}

/// Run-size presets: `Desk` keeps CI runs short (n = 300, 20 reps), `Paper`
/// runs the full-scale sweep (n = 1000, 50 reps).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl Profile {
    pub fn n(self) -> usize {
        match self {
            Profile::Desk => 300,
            Profile::Paper => 1000,
        }
    }

    pub fn reps(self) -> usize {
        match self {
            Profile::Desk => 20,
            Profile::Paper => 50,
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::InvalidParams(format!("unknown profile `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub study: Study,
    pub dim_case: DimCase,
    pub values: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    /// Fixed parameters, overridden by whichever one the study sweeps.
    pub between: f64,
    pub mu: f64,
    pub gamma: f64,
    pub restarts: usize,
    pub thresholds: RegimeThresholds,
    pub h_selection: HSelection,
}

impl SweepConfig {
    pub fn new(study: Study, dim_case: DimCase, profile: Profile) -> Self {
        SweepConfig {
            study,
            dim_case,
            values: study.default_values(dim_case),
            n: profile.n(),
            reps: profile.reps(),
            methods: Method::ALL.to_vec(),
            base_seed: 2024,
            between: 0.5,
            mu: BaselineSpec::default_mu(dim_case),
            gamma: 0.1,
            restarts: DEFAULT_RESTARTS,
            thresholds: RegimeThresholds::default(),
            h_selection: HSelection::Oracle,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.study.range(self.dim_case);
        if self.values.is_empty() {
            return Err(Error::InvalidParams("no sweep values".into()));
        }
        if let Some(v) = self.values.iter().find(|&&v| !(v >= lo - 1e-12 && v <= hi + 1e-12)) {
            return Err(Error::InvalidParams(format!(
                "sweep value {v} outside [{lo}, {hi}] for study {}",
                self.study.as_str()
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParams("reps must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParams("no methods selected".into()));
        }
        if self.n < 10 {
            return Err(Error::InvalidParams("n must be at least 10".into()));
        }
        Ok(())
    }

    pub fn instance_seed(&self, value: f64, rep: usize) -> u64 {
        mix_seed(&[
            self.base_seed,
            self.study.id(),
            self.dim_case.p() as u64,
            value.to_bits(),
            rep as u64,
        ])
    }

    pub fn spec_for(&self, value: f64, rep: usize) -> BaselineSpec {
        let mut spec = BaselineSpec {
            n: self.n,
            dim_case: self.dim_case,
            between: self.between,
            mu: self.mu,
            gamma: self.gamma,
            seed: self.instance_seed(value, rep),
        };
        match self.study {
            Study::PMatrix => spec.between = value,
            Study::Signal => spec.mu = value,
            Study::Misspec => spec.gamma = value,
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRecord {
    pub study: Study,
    pub dim_case: DimCase,
    pub value: f64,
    pub rep: usize,
    pub method: Method,
    /// `None` when the method failed; see `status`.
    pub error: Option<f64>,
    /// Error on dense-community nodes.
    pub error_dense: Option<f64>,
    /// Error on well-specified sparse-community nodes.
    pub error_sparse_good: Option<f64>,
    /// Error on the full good set.
    pub error_good: Option<f64>,
    pub epsilon: f64,
    pub status: String,
    pub wall_time_s: f64,
}

/// Runs one method on an instance and returns its labels.
pub fn run_method(
    method: Method,
    graph: &Graph,
    covariates: &CovariateMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    selection: HSelection,
    truth: Option<&LabelVector>,
) -> Result<LabelVector> {
    let cfg = BaselineConfig {
        restarts,
        seed,
        selection,
        ..Default::default()
    };
    let labels = match method {
        Method::Nac => {
            let opts = NacOptions {
                kmeans: KMeansOptions {
                    restarts,
                    ..Default::default()
                },
                ..Default::default()
            }
            .with_seed(seed);
            nac_cluster(graph, covariates, k, &opts)?.clustering.labels
        }
        Method::NetRegLaplacian => baselines::net_reg_laplacian(graph, k, &cfg)?.clustering.labels,
        Method::CovOnly => baselines::cov_only(covariates, k, &cfg)?.clustering.labels,
        Method::CovAssisted => {
            baselines::cov_assisted(graph, covariates, k, &cfg, truth)?.clustering.labels
        }
    };
    Ok(labels)
}

/// Error rates of one prediction on the instance's node groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupErrors {
    pub overall: f64,
    pub dense: Option<f64>,
    pub sparse_good: Option<f64>,
    pub good: Option<f64>,
}

pub fn group_errors(
    pred: &LabelVector,
    inst: &GeneratedInstance,
    thresholds: &RegimeThresholds,
) -> Result<(GroupErrors, f64)> {
    let truth = &inst.truth;
    let k = truth.k();
    let regime = classify_regime(&inst.theta, truth, thresholds)?;
    let report = align_and_error(pred, truth, k)?;
    let good = good_set(inst, &regime);
    let dense = regime.dense_nodes(truth);
    let sparse_good: Vec<usize> = good.iter().copied().filter(|&i| !regime.is_dense(truth.get(i))).collect();
    let subset = |s: &[usize]| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            error_on_subset(pred, truth, &report.permutation, s).map(Some)
        }
    };
    Ok((
        GroupErrors {
            overall: report.error_rate,
            dense: subset(&dense)?,
            sparse_good: subset(&sparse_good)?,
            good: subset(&good)?,
        },
        epsilon_of(inst, &regime),
    ))
}

fn run_task(cfg: &SweepConfig, value: f64, rep: usize) -> Vec<SimulationRecord> {
    let spec = cfg.spec_for(value, rep);
    let params = dcsbm::benchmark_model(&spec);
    let base = |method: Method| SimulationRecord {
        study: cfg.study,
        dim_case: cfg.dim_case,
        value,
        rep,
        method,
        error: None,
        error_dense: None,
        error_sparse_good: None,
        error_good: None,
        epsilon: f64::NAN,
        status: String::new(),
        wall_time_s: 0.0,
    };
    let inst = match dcsbm::generate(&params) {
        Ok(inst) => inst,
        Err(e) => {
            return cfg
                .methods
                .iter()
                .map(|&m| SimulationRecord {
                    status: format!("error: {e}"),
                    ..base(m)
                })
                .collect()
        }
    };
    cfg.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let outcome = run_method(
                method,
                &inst.graph,
                &inst.covariates,
                params.k,
                spec.seed,
                cfg.restarts,
                cfg.h_selection,
                Some(&inst.truth),
            )
            .and_then(|labels| group_errors(&labels, &inst, &cfg.thresholds));
            let wall = start.elapsed().as_secs_f64();
            match outcome {
                Ok((errs, eps)) => SimulationRecord {
                    error: Some(errs.overall),
                    error_dense: errs.dense,
                    error_sparse_good: errs.sparse_good,
                    error_good: errs.good,
                    epsilon: eps,
                    status: "ok".into(),
                    wall_time_s: wall,
                    ..base(method)
                },
                Err(e) => SimulationRecord {
                    status: format!("error: {e}"),
                    wall_time_s: wall,
                    ..base(method)
                },
            }
        })
        .collect()
}

/// Runs every (value, rep, method) combination. Records come back sorted by
/// value, rep and method order of the config.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SimulationRecord>> {
    cfg.validate()?;
    let tasks: Vec<(f64, usize)> = cfg
        .values
        .iter()
        .flat_map(|&v| (0..cfg.reps).map(move |r| (v, r)))
        .collect();
    let nested: Vec<Vec<SimulationRecord>> = tasks
        .par_iter()
        .map(|&(v, r)| run_task(cfg, v, r))
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<Vec<SimulationRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const RECORDS_HEADER: &str =
    "study,dim_case,value,rep,method,error,error_dense,error_sparse_good,error_good,epsilon,status";

/// Long-format record table. Wall times are kept out of this file so that
/// reruns are byte-identical; see [`format_timings`].
pub fn format_records(records: &[SimulationRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let eps = if r.epsilon.is_nan() { String::new() } else { r.epsilon.to_string() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.study.as_str(),
            r.dim_case.as_str(),
            r.value,
            r.rep,
            r.method,
            opt(r.error),
            opt(r.error_dense),
            opt(r.error_sparse_good),
            opt(r.error_good),
            eps,
            csv_field(&r.status)
        );
    }
    out
}

pub fn format_timings(records: &[SimulationRecord]) -> String {
    let mut out = String::from("study,dim_case,value,rep,method,wall_time_s\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.study.as_str(),
            r.dim_case.as_str(),
            r.value,
            r.rep,
            r.method,
            r.wall_time_s
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub value: f64,
    pub method: Method,
    pub reps_ok: usize,
    pub reps_failed: usize,
    pub mean_error: f64,
    /// Standard error of the mean; zero with fewer than two reps.
    pub se_error: f64,
    pub mean_error_dense: Option<f64>,
    pub mean_error_sparse_good: Option<f64>,
    pub mean_epsilon: f64,
    pub mean_wall_time_s: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Per (value, method) summaries in first-appearance order.
pub fn aggregate(records: &[SimulationRecord]) -> Vec<AggregateRow> {
    let mut keys: Vec<(u64, Method)> = Vec::new();
    for r in records {
        let key = (r.value.to_bits(), r.method);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(bits, method)| {
            let group: Vec<&SimulationRecord> = records
                .iter()
                .filter(|r| r.value.to_bits() == bits && r.method == method)
                .collect();
            let errors: Vec<f64> = group.iter().filter_map(|r| r.error).collect();
            let collect = |f: fn(&SimulationRecord) -> Option<f64>| -> Option<f64> {
                let v: Vec<f64> = group.iter().filter_map(|r| f(r)).collect();
                (!v.is_empty()).then(|| mean(&v))
            };
            let eps: Vec<f64> = group.iter().map(|r| r.epsilon).filter(|e| !e.is_nan()).collect();
            let walls: Vec<f64> = group.iter().map(|r| r.wall_time_s).collect();
            AggregateRow {
                value: f64::from_bits(bits),
                method,
                reps_ok: errors.len(),
                reps_failed: group.len() - errors.len(),
                mean_error: mean(&errors),
                se_error: standard_error(&errors),
                mean_error_dense: collect(|r| r.error_dense),
                mean_error_sparse_good: collect(|r| r.error_sparse_good),
                mean_epsilon: mean(&eps),
                mean_wall_time_s: mean(&walls),
            }
        })
        .collect()
}

pub fn format_aggregate(cfg: &SweepConfig, rows: &[AggregateRow]) -> String {
    let mut out = String::from(
        "study,dim_case,value,method,reps_ok,reps_failed,mean_error,se_error,mean_error_dense,mean_error_sparse_good,mean_epsilon\n",
    );
    for a in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            cfg.study.as_str(),
            cfg.dim_case.as_str(),
            a.value,
            a.method,
            a.reps_ok,
            a.reps_failed,
            a.mean_error,
            a.se_error,
            opt(a.mean_error_dense),
            opt(a.mean_error_sparse_good),
            a.mean_epsilon
        );
    }
    out
}

pub const RECORDS_FILE: &str = "records.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Writes `records.csv`, `aggregate.csv` and `timings.csv` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &SweepConfig, records: &[SimulationRecord]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(RECORDS_FILE), format_records(records))?;
    fs::write(dir.join(AGGREGATE_FILE), format_aggregate(cfg, &aggregate(records)))?;
    fs::write(dir.join(TIMINGS_FILE), format_timings(records))?;
    Ok(())
}

/// Regenerates the instances behind `count` randomly chosen successful
/// records, reruns their methods and checks the stored error. Returns the
/// number of records audited.
pub fn audit_records(
    cfg: &SweepConfig,
    records: &[SimulationRecord],
    count: usize,
    seed: u64,
) -> Result<usize> {
    let ok: Vec<&SimulationRecord> = records.iter().filter(|r| r.error.is_some()).collect();
    let take = count.min(ok.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in sample(&mut rng, ok.len(), take) {
        let r = ok[idx];
        let spec = cfg.spec_for(r.value, r.rep);
        let inst = dcsbm::generate(&dcsbm::benchmark_model(&spec))?;
        let labels = run_method(
            r.method,
            &inst.graph,
            &inst.covariates,
            inst.truth.k(),
            spec.seed,
            cfg.restarts,
            cfg.h_selection,
            Some(&inst.truth),
        )?;
        let recomputed = align_and_error(&labels, &inst.truth, inst.truth.k())?.error_rate;
        if Some(recomputed) != r.error {
            return Err(Error::Domain(format!(
                "audit mismatch for value {} rep {} method {}: stored {:?}, recomputed {recomputed}",
                r.value, r.rep, r.method, r.error
            )));
        }
    }
    Ok(take)
}
