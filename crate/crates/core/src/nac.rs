//! Network-adjusted covariates `Y = A X + diag(alpha) X`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{CovariateMatrix, Graph};

pub const DEFAULT_WEIGHT_CONSTANT: f64 = 0.5;

/// Network-adjusted covariate matrix together with the node weights used.
#[derive(Debug, Clone)]
pub struct NacMatrix {
    pub y: DMatrix<f64>,
    pub alpha: Vec<f64>,
}

impl NacMatrix {
    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn p(&self) -> usize {
        self.y.ncols()
    }
}

fn check_weight_constant(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!(
            "weight constant must lie in (0, 1), got {c}"
        )));
    }
    Ok(())
}

/// Node weights `alpha_i = c * dbar / (d_i / ln n + 1)`.
///
/// High-degree nodes get small weights, so their neighbors dominate `y_i`;
/// low-degree nodes get weights near `c * dbar`, so their own covariates do.
pub fn alpha_weights(g: &Graph, c: f64) -> Result<Vec<f64>> {
    check_weight_constant(c)?;
    let n = g.n();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes, got {n}")));
    }
    let dbar = g.average_degree()?;
    let log_n = (n as f64).ln();
    Ok((0..n)
        .map(|i| c * dbar / (g.degree(i) as f64 / log_n + 1.0))
        .collect())
}

pub fn build_nac(g: &Graph, x: &CovariateMatrix, c: f64) -> Result<NacMatrix> {
    if x.n() != g.n() {
        return Err(Error::Dimension(format!(
            "covariates have {} rows but graph has {} nodes",
            x.n(),
            g.n()
        )));
    }
    let alpha = alpha_weights(g, c)?;
    let xv = x.values();
    let p = x.p();
    let mut y = DMatrix::zeros(g.n(), p);
    // Columns outermost: nalgebra storage is column-major.
    for col in 0..p {
        let xc = xv.column(col);
        let mut yc = y.column_mut(col);
        for i in 0..g.n() {
            let mut acc = alpha[i] * xc[i];
            for &j in g.neighbors(i) {
                acc += xc[j];
            }
            yc[i] = acc;
        }
    }
    Ok(NacMatrix { y, alpha })
}
