//! Community detection in attributed graphs by spectral clustering on
//! network-adjusted covariates, plus a degree-corrected blockmodel
//! generator, oracle diagnostics, baseline methods and a simulation harness.

pub mod baselines;
pub mod clustering;
pub mod config;
pub mod dcsbm;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod nac;
pub mod pipeline;
pub mod seed;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{CovariateMatrix, Graph, LabelVector};
