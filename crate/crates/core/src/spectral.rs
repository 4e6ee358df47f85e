//! Top-K eigenvectors of symmetric positive semidefinite operators by
//! seeded subspace iteration, and the row-normalization step.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// A symmetric PSD linear operator that can be applied to a block of vectors.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, block: &DMatrix<f64>) -> DMatrix<f64>;
}

/// `Y Y^T` for a dense rectangular `Y`, never formed explicitly.
pub struct GramOperator<'a>(pub &'a DMatrix<f64>);

impl SymmetricOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, block: &DMatrix<f64>) -> DMatrix<f64> {
        self.0 * (self.0.transpose() * block)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SubspaceOptions {
    /// Relative change of each of the top-K Ritz values between sweeps.
    pub tol: f64,
    /// Eigen-residual bound, relative to the largest Ritz value. Ritz values
    /// settle quadratically faster than the vectors, so this is what pins
    /// down the subspace.
    pub residual_tol: f64,
    pub max_sweeps: usize,
    pub oversample: usize,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            tol: 1e-10,
            residual_tol: 1e-9,
            max_sweeps: 1000,
            oversample: 2,
            seed: 0x5eed,
        }
    }
}

/// Top eigenpairs of a symmetric operator, eigenvalues non-increasing.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub vectors: DMatrix<f64>,
    pub values: Vec<f64>,
    pub sweeps: usize,
    /// `max_k ||A v_k - theta_k v_k|| / theta_1`.
    pub residual: f64,
    pub converged: bool,
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

/// Flips each column so that its entry of largest magnitude is positive.
fn fix_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
}

/// Subspace iteration with Rayleigh-Ritz projection. Returns the current
/// estimate even when the sweep cap is hit; `converged` records which.
pub fn top_k_eigen_best_effort<O: SymmetricOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &SubspaceOptions,
) -> Result<EigenResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "requested {k} eigenvectors of an operator of dimension {n}"
        )));
    }
    let m = (k + opts.oversample).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = DMatrix::from_fn(n, m, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormalize(start);
    let mut prev: Option<Vec<f64>> = None;
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let z = op.apply(&q);
        let h = q.transpose() * &z;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let w = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
        let ritz = &q * &w;
        let applied = &z * &w;

        let scale = theta[0].abs().max(f64::MIN_POSITIVE);
        let residual = (0..k)
            .map(|c| (applied.column(c) - ritz.column(c) * theta[c]).norm())
            .fold(0.0, f64::max)
            / scale;
        let values_settled = prev.as_ref().is_some_and(|p| {
            (0..k).all(|i| {
                let floor = 1e-4 * scale;
                (theta[i] - p[i]).abs() <= opts.tol * theta[i].abs().max(floor)
            })
        });
        let done = values_settled && residual <= opts.residual_tol;
        if done || sweeps >= opts.max_sweeps {
            let mut vectors = ritz.columns(0, k).into_owned();
            fix_signs(&mut vectors);
            return Ok(EigenResult {
                vectors,
                values: theta[..k].to_vec(),
                sweeps,
                residual,
                converged: done,
            });
        }
        prev = Some(theta);
        q = orthonormalize(applied);
    }
}

/// Like [`top_k_eigen_best_effort`] but non-convergence is an error.
pub fn top_k_eigen<O: SymmetricOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &SubspaceOptions,
) -> Result<EigenResult> {
    let res = top_k_eigen_best_effort(op, k, opts)?;
    if !res.converged {
        return Err(Error::Convergence {
            sweeps: res.sweeps,
            residual: res.residual,
        });
    }
    Ok(res)
}

/// Top-K left singular vectors and singular values of a dense matrix.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub xi_hat: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

impl SpectralEmbedding {
    pub fn n(&self) -> usize {
        self.xi_hat.nrows()
    }

    pub fn k(&self) -> usize {
        self.xi_hat.ncols()
    }

    pub fn from_eigen(res: EigenResult, sqrt_values: bool) -> Self {
        let singular_values = res
            .values
            .iter()
            .map(|&v| if sqrt_values { v.max(0.0).sqrt() } else { v.max(0.0) })
            .collect();
        SpectralEmbedding {
            xi_hat: res.vectors,
            singular_values,
            sweeps: res.sweeps,
            converged: res.converged,
        }
    }
}

fn check_svd_rank(y: &DMatrix<f64>, k: usize) -> Result<()> {
    let (n, p) = y.shape();
    if k == 0 || k > n.min(p) {
        return Err(Error::Domain(format!(
            "K = {k} outside [1, min(n, p)] = [1, {}]",
            n.min(p)
        )));
    }
    Ok(())
}

pub fn top_k_left_singular(
    y: &DMatrix<f64>,
    k: usize,
    opts: &SubspaceOptions,
) -> Result<SpectralEmbedding> {
    check_svd_rank(y, k)?;
    let res = top_k_eigen(&GramOperator(y), k, opts)?;
    Ok(SpectralEmbedding::from_eigen(res, true))
}

/// Same as [`top_k_left_singular`] but returns the unconverged estimate
/// instead of failing when the sweep cap is reached.
pub fn top_k_left_singular_best_effort(
    y: &DMatrix<f64>,
    k: usize,
    opts: &SubspaceOptions,
) -> Result<SpectralEmbedding> {
    check_svd_rank(y, k)?;
    let res = top_k_eigen_best_effort(&GramOperator(y), k, opts)?;
    Ok(SpectralEmbedding::from_eigen(res, true))
}

pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-12;

/// Embedding with every non-degenerate row scaled to unit length.
#[derive(Debug, Clone)]
pub struct RowNormalizedEmbedding {
    pub r_hat: DMatrix<f64>,
    /// Rows whose norm was at or below the threshold; left at zero.
    pub zero_rows: Vec<usize>,
}

pub fn row_normalize(xi: &DMatrix<f64>, zero_threshold: f64) -> RowNormalizedEmbedding {
    let mut r_hat = xi.clone();
    let mut zero_rows = Vec::new();
    for i in 0..r_hat.nrows() {
        let norm = r_hat.row(i).norm();
        if norm > zero_threshold {
            r_hat.row_mut(i).unscale_mut(norm);
        } else {
            r_hat.row_mut(i).fill(0.0);
            zero_rows.push(i);
        }
    }
    RowNormalizedEmbedding { r_hat, zero_rows }
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices with orthonormal columns.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let m = a.transpose() * b;
    let sv: DVector<f64> = m.singular_values();
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min).clamp(0.0, 1.0);
    smallest.acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let y = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let emb = top_k_left_singular(&y, 2, &SubspaceOptions::default()).unwrap();
        assert!((emb.singular_values[0] - 3.0).abs() < 1e-10);
        assert!((emb.singular_values[1] - 2.0).abs() < 1e-10);
        let e1 = emb.xi_hat.column(0);
        let e2 = emb.xi_hat.column(1);
        assert!((e1[0].abs() - 1.0).abs() < 1e-8 && e1[2].abs() < 1e-8);
        assert!((e2[1].abs() - 1.0).abs() < 1e-8 && e2[2].abs() < 1e-8);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = DVector::from_vec(vec![1.0, 2.0, 2.0, 4.0]).normalize();
        let v = DVector::from_vec(vec![3.0, 0.0, 4.0]).normalize();
        let y = &u * v.transpose();
        let emb = top_k_left_singular(&y, 1, &SubspaceOptions::default()).unwrap();
        assert!((emb.singular_values[0] - 1.0).abs() < 1e-12);
        assert!((emb.xi_hat.column(0).dot(&u).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_out_of_range() {
        let y = DMatrix::<f64>::zeros(4, 2);
        let opts = SubspaceOptions::default();
        assert!(matches!(top_k_left_singular(&y, 0, &opts), Err(Error::Domain(_))));
        assert!(matches!(top_k_left_singular(&y, 3, &opts), Err(Error::Domain(_))));
    }

    #[test]
    fn sweep_cap_reports_convergence_error() {
        let y = DMatrix::from_fn(30, 30, |i, j| ((i * 7 + j * 13) % 11) as f64 + (i == j) as u8 as f64);
        let opts = SubspaceOptions {
            max_sweeps: 1,
            ..Default::default()
        };
        match top_k_left_singular(&y, 3, &opts) {
            Err(Error::Convergence { sweeps, residual }) => {
                assert_eq!(sweeps, 1);
                assert!(residual.is_finite());
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let y = DMatrix::from_fn(25, 6, |i, j| ((i * 31 + j * 17) % 23) as f64 - 11.0);
        let opts = SubspaceOptions::default();
        let a = top_k_left_singular(&y, 3, &opts).unwrap();
        let b = top_k_left_singular(&y, 3, &opts).unwrap();
        assert_eq!(a.xi_hat, b.xi_hat);
        assert_eq!(a.singular_values, b.singular_values);
    }

    #[test]
    fn row_normalize_cases() {
        let xi = DMatrix::from_row_slice(3, 2, &[3.0, 4.0, 0.0, 0.0, 0.6, 0.8]);
        let r = row_normalize(&xi, DEFAULT_ZERO_THRESHOLD);
        assert!((r.r_hat[(0, 0)] - 0.6).abs() < 1e-15 && (r.r_hat[(0, 1)] - 0.8).abs() < 1e-15);
        assert_eq!(r.zero_rows, vec![1]);
        assert_eq!(r.r_hat.row(1).norm(), 0.0);
        assert!((r.r_hat[(2, 0)] - 0.6).abs() <= 1e-15 && (r.r_hat[(2, 1)] - 0.8).abs() <= 1e-15);
        let again = row_normalize(&r.r_hat, DEFAULT_ZERO_THRESHOLD);
        assert!((&again.r_hat - &r.r_hat).abs().max() <= 1e-15);
    }
}
