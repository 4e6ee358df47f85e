//! Restarted k-means (k-means++ seeding, Lloyd iterations) and
//! permutation-aligned error metrics.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::LabelVector;
use crate::seed::mix_seed;

pub const DEFAULT_RESTARTS: usize = 20;
pub const DEFAULT_MAX_ITER: usize = 300;
pub const MAX_ALIGN_K: usize = 10;

#[derive(Debug, Clone, Copy)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            restarts: DEFAULT_RESTARTS,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub labels: LabelVector,
    /// `K x d` matrix of cluster centers.
    pub centers: DMatrix<f64>,
    pub wcss: f64,
    pub restarts_used: usize,
    pub best_restart_seed: u64,
    /// Objective after every center update of the winning restart.
    pub wcss_trace: Vec<f64>,
}

/// Points stored row-major for the inner loops.
struct Points {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl Points {
    fn new(m: &DMatrix<f64>) -> Self {
        let (n, d) = m.shape();
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            data.extend(m.row(i).iter());
        }
        Points { data, n, d }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center; ties go to the lower index.
fn nearest(point: &[f64], centers: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.chunks_exact(d).enumerate() {
        let dist = sq_dist(point, center);
        if dist < best.1 {
            best = (c, dist);
        }
    }
    best
}

struct RunOutcome {
    labels: Vec<usize>,
    centers: Vec<f64>,
    wcss: f64,
    trace: Vec<f64>,
}

fn plus_plus_init(pts: &Points, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = pts.d;
    let mut centers = Vec::with_capacity(k * d);
    let first = rng.gen_range(0..pts.n);
    centers.extend_from_slice(pts.row(first));
    let mut dist: Vec<f64> = (0..pts.n).map(|i| sq_dist(pts.row(i), pts.row(first))).collect();
    for _ in 1..k {
        let total: f64 = dist.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = pts.n - 1;
            for (i, &w) in dist.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.gen_range(0..pts.n)
        };
        centers.extend_from_slice(pts.row(chosen));
        for (i, slot) in dist.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(pts.row(i), pts.row(chosen)));
        }
    }
    centers
}

fn update_centers(pts: &Points, labels: &[usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let d = pts.d;
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, x) in sums[l * d..(l + 1) * d].iter_mut().zip(pts.row(i)) {
            *s += x;
        }
    }
    for (c, &cnt) in counts.iter().enumerate() {
        if cnt > 0 {
            for s in &mut sums[c * d..(c + 1) * d] {
                *s /= cnt as f64;
            }
        }
    }
    (sums, counts)
}

fn objective(pts: &Points, labels: &[usize], centers: &[f64]) -> f64 {
    let d = pts.d;
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(pts.row(i), &centers[l * d..(l + 1) * d]))
        .sum()
}

/// Moves, for each empty cluster, the point farthest from its own center
/// (taken from a cluster with at least two members) into the empty cluster.
fn repair_empty(pts: &Points, labels: &mut [usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let d = pts.d;
    let (mut centers, mut counts) = update_centers(pts, labels, k);
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let mut far = None;
        let mut far_dist = -1.0;
        for i in 0..pts.n {
            let l = labels[i];
            if counts[l] < 2 {
                continue;
            }
            let dist = sq_dist(pts.row(i), &centers[l * d..(l + 1) * d]);
            if dist > far_dist {
                far_dist = dist;
                far = Some(i);
            }
        }
        let Some(i) = far else { break };
        labels[i] = empty;
        let recomputed = update_centers(pts, labels, k);
        centers = recomputed.0;
        counts = recomputed.1;
    }
    (centers, counts)
}

fn lloyd(pts: &Points, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> RunOutcome {
    let d = pts.d;
    let mut centers = plus_plus_init(pts, k, rng);
    let mut labels = vec![usize::MAX; pts.n];
    let mut trace = Vec::new();
    for _ in 0..max_iter {
        let mut changed = false;
        for i in 0..pts.n {
            let (c, _) = nearest(pts.row(i), &centers, d);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        centers = repair_empty(pts, &mut labels, k).0;
        trace.push(objective(pts, &labels, &centers));
    }
    let wcss = objective(pts, &labels, &centers);
    RunOutcome {
        labels,
        centers,
        wcss,
        trace,
    }
}

/// Best of `restarts` independent k-means++/Lloyd runs by within-cluster
/// sum of squares; ties resolve to the lowest restart index.
pub fn kmeans(points: &DMatrix<f64>, k: usize, opts: &KMeansOptions) -> Result<ClusteringResult> {
    let n = points.nrows();
    if k == 0 || n < k {
        return Err(Error::Domain(format!("k-means needs 1 <= K <= n, got K = {k}, n = {n}")));
    }
    let restarts = opts.restarts.max(1);
    let pts = Points::new(points);
    let runs: Vec<(u64, RunOutcome)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let seed = mix_seed(&[opts.seed, r as u64]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (seed, lloyd(&pts, k, opts.max_iter, &mut rng))
        })
        .collect();
    let (seed, best) = runs
        .into_iter()
        .reduce(|a, b| if b.1.wcss < a.1.wcss { b } else { a })
        .expect("at least one restart");
    let d = pts.d;
    Ok(ClusteringResult {
        labels: LabelVector::new(best.labels, k)?,
        centers: DMatrix::from_row_slice(k, d, &best.centers),
        wcss: best.wcss,
        restarts_used: restarts,
        best_restart_seed: seed,
        wcss_trace: best.trace,
    })
}

/// `sum_i ||row_i - center_{label(i)}||^2` recomputed from scratch.
pub fn wcss_of(points: &DMatrix<f64>, labels: &[usize], centers: &DMatrix<f64>) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (points.row(i) - centers.row(l)).norm_squared())
        .sum()
}

/// Optimal k-means objective of a fixed partition (centers are cluster means).
pub fn partition_wcss(points: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let pts = Points::new(points);
    let (centers, _) = update_centers(&pts, labels, k);
    objective(&pts, labels, &centers)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    /// `permutation[predicted] = truth label`.
    pub permutation: Vec<usize>,
    pub error_rate: f64,
    pub mismatches: usize,
    /// `confusion[predicted][truth]` counts.
    pub confusion: Vec<Vec<usize>>,
}

fn check_pair(pred: &LabelVector, truth: &LabelVector, k: usize) -> Result<()> {
    if pred.n() != truth.n() {
        return Err(Error::Dimension(format!(
            "predicted labels have {} entries, truth has {}",
            pred.n(),
            truth.n()
        )));
    }
    if k > MAX_ALIGN_K {
        return Err(Error::Unsupported(format!(
            "exhaustive alignment supports K <= {MAX_ALIGN_K}, got {k}"
        )));
    }
    if let Some(&l) = pred.as_slice().iter().chain(truth.as_slice()).find(|&&l| l >= k) {
        return Err(Error::Domain(format!("label {l} not below K = {k}")));
    }
    Ok(())
}

pub fn confusion_matrix(pred: &[usize], truth: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut conf = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        conf[p][t] += 1;
    }
    conf
}

/// Minimum mismatch rate over all `K!` relabelings of the prediction.
pub fn align_and_error(pred: &LabelVector, truth: &LabelVector, k: usize) -> Result<AlignmentReport> {
    check_pair(pred, truth, k)?;
    if pred.n() == 0 {
        return Err(Error::Domain("no nodes to align".into()));
    }
    let confusion = confusion_matrix(pred.as_slice(), truth.as_slice(), k);
    let mut best: Option<(usize, Vec<usize>)> = None;
    for perm in (0..k).permutations(k) {
        let matched: usize = perm.iter().enumerate().map(|(p, &t)| confusion[p][t]).sum();
        if best.as_ref().map_or(true, |(m, _)| matched > *m) {
            best = Some((matched, perm));
        }
    }
    let (matched, permutation) = best.expect("K >= 1");
    let n = pred.n();
    Ok(AlignmentReport {
        permutation,
        error_rate: (n - matched) as f64 / n as f64,
        mismatches: n - matched,
        confusion,
    })
}

/// Mismatch rate on `subset` under a permutation fitted elsewhere.
pub fn error_on_subset(
    pred: &LabelVector,
    truth: &LabelVector,
    permutation: &[usize],
    subset: &[usize],
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Domain("subset is empty".into()));
    }
    if pred.n() != truth.n() {
        return Err(Error::Dimension("label vectors differ in length".into()));
    }
    let mut wrong = 0usize;
    for &i in subset {
        if i >= pred.n() {
            return Err(Error::Domain(format!("subset index {i} out of range")));
        }
        if permutation[pred.get(i)] != truth.get(i) {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / subset.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(v: &[usize], k: usize) -> LabelVector {
        LabelVector::new(v.to_vec(), k).unwrap()
    }

    #[test]
    fn separated_identical_pairs() {
        let pts = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.0, 0.0, 10.0, 10.0, 10.0, 10.0]);
        let res = kmeans(&pts, 2, &KMeansOptions::default()).unwrap();
        assert_eq!(res.wcss, 0.0);
        let l = res.labels.as_slice();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
    }

    #[test]
    fn n_equals_k() {
        let pts = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 5.0]);
        let res = kmeans(&pts, 3, &KMeansOptions::default()).unwrap();
        assert_eq!(res.wcss, 0.0);
        let mut l = res.labels.as_slice().to_vec();
        l.sort_unstable();
        assert_eq!(l, vec![0, 1, 2]);
    }

    #[test]
    fn identical_points_still_fill_every_cluster() {
        let pts = DMatrix::zeros(6, 2);
        let res = kmeans(&pts, 3, &KMeansOptions::default()).unwrap();
        for c in 0..3 {
            assert!(res.labels.as_slice().contains(&c));
        }
        assert_eq!(res.wcss, 0.0);
    }

    #[test]
    fn too_few_points() {
        let pts = DMatrix::zeros(2, 2);
        assert!(matches!(kmeans(&pts, 3, &KMeansOptions::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn alignment_examples() {
        let t = lv(&[0, 0, 1, 1, 2], 3);
        let r = align_and_error(&t, &t, 3).unwrap();
        assert_eq!(r.error_rate, 0.0);
        assert_eq!(r.permutation, vec![0, 1, 2]);

        let truth = lv(&[0, 0, 1, 1], 2);
        let swapped = lv(&[1, 1, 0, 0], 2);
        let r = align_and_error(&swapped, &truth, 2).unwrap();
        assert_eq!(r.error_rate, 0.0);
        assert_eq!(r.permutation, vec![1, 0]);

        let one_flip = lv(&[0, 1, 1, 1], 2);
        let r = align_and_error(&one_flip, &truth, 2).unwrap();
        assert_eq!(r.error_rate, 0.25);
        assert_eq!(r.confusion, vec![vec![1, 0], vec![1, 2]]);
    }

    #[test]
    fn alignment_rejects_large_k_and_mismatch() {
        let a = lv(&[0; 3], 11);
        assert!(matches!(align_and_error(&a, &a, 11), Err(Error::Unsupported(_))));
        assert!(align_and_error(&lv(&[0, 1], 2), &lv(&[0], 2), 2).is_err());
    }

    #[test]
    fn subset_error_examples() {
        let truth = lv(&[0, 0, 0, 1, 1, 1], 2);
        let pred = lv(&[1, 1, 0, 0, 0, 0], 2);
        let r = align_and_error(&pred, &truth, 2).unwrap();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(error_on_subset(&pred, &truth, &r.permutation, &all).unwrap(), r.error_rate);
        // Node 2 is the only mistake; the subset excluding it is perfect.
        assert_eq!(error_on_subset(&pred, &truth, &r.permutation, &[0, 1, 3, 4, 5]).unwrap(), 0.0);
        assert!(error_on_subset(&pred, &truth, &r.permutation, &[]).is_err());
    }

    fn arb_points() -> impl Strategy<Value = (usize, DMatrix<f64>, u64)> {
        (2usize..5, 8usize..40, any::<u64>()).prop_flat_map(|(k, n, seed)| {
            (
                Just(k),
                prop::collection::vec(-10.0f64..10.0, n * 2)
                    .prop_map(move |v| DMatrix::from_row_slice(n, 2, &v)),
                Just(seed),
            )
        })
    }

    proptest! {
        #[test]
        fn wcss_consistent_and_monotone((k, pts, seed) in arb_points()) {
            let res = kmeans(&pts, k, &KMeansOptions { restarts: 4, seed, ..Default::default() }).unwrap();
            let recomputed = wcss_of(&pts, res.labels.as_slice(), &res.centers);
            prop_assert!((recomputed - res.wcss).abs() <= 1e-8 * res.wcss.max(1e-300) + 1e-12);
            for w in res.wcss_trace.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12);
            }
            prop_assert!(res.labels.as_slice().iter().all(|&l| l < k));
        }

        #[test]
        fn alignment_ignores_label_names(
            truth in prop::collection::vec(0usize..4, 1..30),
            pred in prop::collection::vec(0usize..4, 1..30),
            sigma in Just(vec![2usize, 0, 3, 1]),
        ) {
            let n = truth.len().min(pred.len());
            let t = lv(&truth[..n], 4);
            let p = lv(&pred[..n], 4);
            let relabeled = lv(&p.as_slice().iter().map(|&l| sigma[l]).collect::<Vec<_>>(), 4);
            let a = align_and_error(&p, &t, 4).unwrap();
            let b = align_and_error(&relabeled, &t, 4).unwrap();
            prop_assert_eq!(a.mismatches, b.mismatches);
        }
    }
}
