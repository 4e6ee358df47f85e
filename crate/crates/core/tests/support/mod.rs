//! Independent reference implementations used only by the tests. They are
//! deliberately naive: plain loops over `Vec<Vec<f64>>`, no shared code
//! with the library's numerics.

#![allow(dead_code)]

use nac_core::dcsbm::{self, BaselineSpec, DimCase, GeneratedInstance, ModelParams};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn to_dense(m: &DMatrix<f64>) -> Dense {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn from_dense(d: &Dense) -> DMatrix<f64> {
    let cols = d.first().map_or(0, Vec::len);
    DMatrix::from_fn(d.len(), cols, |i, j| d[i][j])
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0))
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues in descending order and the matching eigenvectors as columns.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Dense = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    (values, vectors)
}

/// Top-`k` left singular vectors and singular values via the eigen-problem
/// of `Y Y'`.
pub fn dense_svd_top_k(y: &Dense, k: usize) -> (Vec<f64>, Dense) {
    let n = y.len();
    let p = y.first().map_or(0, Vec::len);
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = (0..p).map(|c| y[i][c] * y[j][c]).sum();
        }
    }
    let (values, vectors) = jacobi_eigen(&gram);
    let s = values.iter().take(k).map(|v| v.max(0.0).sqrt()).collect();
    let u = vectors.iter().map(|row| row[..k].to_vec()).collect();
    (s, u)
}

/// `y_i = alpha_i x_i + sum_{j ~ i} x_j` computed straight from a dense
/// adjacency matrix.
pub fn scalar_nac(adj: &Dense, x: &Dense, c: f64) -> (Dense, Vec<f64>) {
    let n = adj.len();
    let p = x.first().map_or(0, Vec::len);
    let deg: Vec<f64> = adj.iter().map(|row| row.iter().sum()).collect();
    let mean_deg = deg.iter().sum::<f64>() / n as f64;
    let log_n = (n as f64).ln();
    let alpha: Vec<f64> = deg.iter().map(|&d| c * mean_deg / (d / log_n + 1.0)).collect();
    let mut y = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..p {
            let mut s = alpha[i] * x[i][k];
            for j in 0..n {
                s += adj[i][j] * x[j][k];
            }
            y[i][k] = s;
        }
    }
    (y, alpha)
}

/// Minimum within-cluster sum of squares over every assignment of the rows
/// to at most `k` labels.
pub fn brute_force_wcss(points: &Dense, k: usize) -> f64 {
    let n = points.len();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        best = best.min(assignment_wcss(points, &labels, k));
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

pub fn assignment_wcss(points: &Dense, labels: &[usize], k: usize) -> f64 {
    let d = points.first().map_or(0, Vec::len);
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<&Vec<f64>> =
            points.iter().zip(labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
        if members.is_empty() {
            continue;
        }
        let mut center = vec![0.0; d];
        for m in &members {
            for (a, b) in center.iter_mut().zip(m.iter()) {
                *a += b;
            }
        }
        for a in &mut center {
            *a /= members.len() as f64;
        }
        for m in &members {
            total += m.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
    }
    total
}

/// Largest principal angle between the column spans of two orthonormal
/// bases, from the sine side: `||(I - B B') A||_2`.
pub fn principal_angle(a: &Dense, b: &Dense) -> f64 {
    let n = a.len();
    let k = a[0].len();
    let mut resid = a.clone();
    for c in 0..k {
        for j in 0..b[0].len() {
            let dot: f64 = (0..n).map(|r| b[r][j] * a[r][c]).sum();
            for r in 0..n {
                resid[r][c] -= dot * b[r][j];
            }
        }
    }
    let mut gram = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = (0..n).map(|r| resid[r][i] * resid[r][j]).sum();
        }
    }
    let (vals, _) = jacobi_eigen(&gram);
    vals[0].max(0.0).sqrt().min(1.0).asin()
}

/// Benchmark instance with the published fixed parameters.
pub fn baseline_instance(
    n: usize,
    dim_case: DimCase,
    mu: f64,
    gamma: f64,
    seed: u64,
) -> (ModelParams, GeneratedInstance) {
    let spec = BaselineSpec {
        n,
        dim_case,
        between: 0.5,
        mu,
        gamma,
        seed,
    };
    let params = dcsbm::benchmark_model(&spec);
    let inst = dcsbm::generate(&params).expect("valid benchmark parameters");
    (params, inst)
}

/// Worst principal angle and worst relative singular-value error of the
/// library's truncated SVD against [`dense_svd_top_k`] over random matrices
/// with `n, p <= 30`.
pub fn svd_oracle_sweep(trials: u64, seed: u64) -> (f64, f64) {
    use nac_core::spectral::{top_k_left_singular, SubspaceOptions};
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let (mut worst_angle, mut worst_sv) = (0.0f64, 0.0f64);
    for trial in 0..trials {
        let n = rng.gen_range(2..=30);
        let p = rng.gen_range(2..=30);
        let k = rng.gen_range(1..=n.min(p).min(5));
        let y = random_matrix(&mut rng, n, p);
        let opts = SubspaceOptions { seed: trial, ..Default::default() };
        let emb = match top_k_left_singular(&y, k, &opts) {
            Ok(e) => e,
            Err(_) => return (f64::INFINITY, f64::INFINITY),
        };
        let (s, u) = dense_svd_top_k(&to_dense(&y), k);
        worst_angle = worst_angle.max(principal_angle(&to_dense(&emb.xi_hat), &u));
        for (a, b) in emb.singular_values.iter().zip(&s) {
            worst_sv = worst_sv.max((a - b).abs() / b);
        }
    }
    (worst_angle, worst_sv)
}

/// Number of trials (random point sets, `n <= 10`, K in {2, 3}) where
/// restarted k-means reaches the exhaustive optimum.
pub fn kmeans_oracle_sweep(trials: u64, seed: u64) -> u64 {
    use nac_core::clustering::{kmeans, KMeansOptions};
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut hits = 0;
    for t in 0..trials {
        let n = rng.gen_range(4..=10);
        let k = rng.gen_range(2..=3);
        let pts = random_matrix(&mut rng, n, 2);
        let optimum = brute_force_wcss(&to_dense(&pts), k);
        let opts = KMeansOptions { restarts: 50, seed: t, ..Default::default() };
        let res = kmeans(&pts, k, &opts).expect("n >= k");
        assert!(res.wcss >= optimum - 1e-9, "k-means beat the exhaustive optimum");
        if res.wcss <= optimum + 1e-9 {
            hits += 1;
        }
    }
    hits
}

/// Worst entrywise gap between the library's adjusted covariates and
/// [`scalar_nac`] over random graphs with `n <= 50`.
pub fn nac_oracle_sweep(trials: u64, seed: u64) -> f64 {
    use nac_core::nac::build_nac;
    use nac_core::{CovariateMatrix, Graph};
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(2..=50);
        let p = rng.gen_range(1..=8);
        let density = rng.gen_range(0.0..0.6);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        let x = random_matrix(&mut rng, n, p);
        let c = rng.gen_range(0.05..0.95);
        let out = build_nac(&g, &CovariateMatrix::new(x.clone()).unwrap(), c).unwrap();
        let (y, alpha) = scalar_nac(&to_dense(&g.to_dense()), &to_dense(&x), c);
        worst = worst.max((&out.y - from_dense(&y)).abs().max());
        for (a, b) in out.alpha.iter().zip(&alpha) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Largest change in alignment error when a prediction is relabeled by any
/// of the K! permutations, K <= 4.
pub fn alignment_invariance_sweep(seed: u64) -> f64 {
    use itertools::Itertools;
    use nac_core::clustering::align_and_error;
    use nac_core::LabelVector;
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 1..=4 {
        for _ in 0..10 {
            let n = rng.gen_range(k..40);
            let truth: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
            let truth = LabelVector::new(truth, k).unwrap();
            let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let base = align_and_error(&LabelVector::new(pred.clone(), k).unwrap(), &truth, k)
                .unwrap()
                .error_rate;
            for perm in (0..k).permutations(k) {
                let relabeled = LabelVector::new(pred.iter().map(|&l| perm[l]).collect(), k).unwrap();
                let e = align_and_error(&relabeled, &truth, k).unwrap().error_rate;
                worst = worst.max((e - base).abs());
            }
        }
    }
    worst
}

/// Largest change in the wcss of a k-means partition when the embedding is
/// multiplied by a random orthogonal matrix.
pub fn rotation_invariance_sweep(trials: u64, seed: u64) -> f64 {
    use nac_core::clustering::{kmeans, partition_wcss, KMeansOptions};
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let n = rng.gen_range(10..60);
        let d = rng.gen_range(2..6);
        let k = rng.gen_range(2..5);
        let pts = random_matrix(&mut rng, n, d);
        let q = random_matrix(&mut rng, d, d).qr().q();
        let rotated = &pts * &q;
        let res = kmeans(&pts, k, &KMeansOptions { seed: trial, ..Default::default() }).unwrap();
        let labels = res.labels.as_slice();
        worst = worst.max((partition_wcss(&pts, labels, k) - partition_wcss(&rotated, labels, k)).abs());
        worst = worst.max((partition_wcss(&pts, labels, k) - res.wcss).abs());
    }
    worst
}
