//! Library numerics checked against the naive references in `support`.

mod support;

use nac_core::clustering::{kmeans, KMeansOptions};
use nac_core::spectral::{top_k_left_singular, SubspaceOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

#[test]
fn jacobi_reference_diagonalizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_matrix(&mut rng, 8, 8);
    let sym = &m + m.transpose();
    let (vals, vecs) = jacobi_eigen(&to_dense(&sym));
    let v = from_dense(&vecs);
    let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals.clone()));
    assert!((&v * d * v.transpose() - sym).abs().max() < 1e-10);
    assert!(vals.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn svd_matches_dense_reference_on_tall_example() {
    let mut rng = ChaCha8Rng::seed_from_u64(207);
    let y = random_matrix(&mut rng, 20, 7);
    let emb = top_k_left_singular(&y, 3, &SubspaceOptions::default()).unwrap();
    let (s, u) = dense_svd_top_k(&to_dense(&y), 3);
    assert!(principal_angle(&to_dense(&emb.xi_hat), &u) <= 1e-6);
    for (a, b) in emb.singular_values.iter().zip(&s) {
        assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
    }
}

#[test]
fn svd_matches_dense_reference_on_random_matrices() {
    let (angle, sv) = svd_oracle_sweep(100, 42);
    assert!(angle <= 1e-6, "worst principal angle {angle}");
    assert!(sv <= 1e-8, "worst singular value error {sv}");
}

#[test]
fn nac_matches_scalar_reference() {
    let worst = nac_oracle_sweep(100, 7);
    assert!(worst <= 1e-10, "max diff {worst}");
}

#[test]
fn kmeans_reaches_brute_force_optimum_on_eight_points() {
    let pts = nalgebra::DMatrix::from_row_slice(
        8,
        2,
        &[0.0, 0.0, 0.2, 0.1, 0.1, 0.3, 0.3, 0.2, 3.0, 3.0, 3.2, 2.9, 2.8, 3.1, 3.1, 3.3],
    );
    let optimum = brute_force_wcss(&to_dense(&pts), 2);
    let res = kmeans(&pts, 2, &KMeansOptions { restarts: 50, ..Default::default() }).unwrap();
    assert!((res.wcss - optimum).abs() <= 1e-9, "{} vs {optimum}", res.wcss);
}

#[test]
fn kmeans_matches_brute_force_in_most_trials() {
    let hits = kmeans_oracle_sweep(200, 99);
    assert!(hits >= 190, "{hits}/200");
}
