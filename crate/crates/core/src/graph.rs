//! Graph, covariate and label containers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Undirected simple graph stored as a symmetric CSR adjacency.
///
/// Neighbor lists are sorted ascending and contain no duplicates or
/// self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Builds a graph from unordered pairs. Duplicate pairs (in either
    /// orientation) collapse to one edge and self-loops are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Domain(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                continue;
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in adj {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Ok(Graph {
            n,
            offsets,
            neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.neighbors(i).binary_search(&j).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// Mean degree `2|E| / n`.
    pub fn average_degree(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(self.neighbors.len() as f64 / self.n as f64)
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Dense 0/1 adjacency. Intended for small graphs and tests.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for &j in self.neighbors(i) {
                a[(i, j)] = 1.0;
            }
        }
        a
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Dimension(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.n
            )));
        }
        Graph::from_edges(self.n, self.edges().map(|(i, j)| (perm[i], perm[j])))
    }
}

/// Dense `n x p` covariate matrix; row `i` is the covariate vector of node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateMatrix(DMatrix<f64>);

impl CovariateMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if let Some((idx, _)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (r, c) = (idx % values.nrows(), idx / values.nrows());
            return Err(Error::Domain(format!(
                "non-finite covariate at row {r}, column {c}"
            )));
        }
        Ok(CovariateMatrix(values))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != p) {
            return Err(Error::Dimension(format!(
                "row {i} has {} fields, expected {p}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn p(&self) -> usize {
        self.0.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Community assignment per node, each label in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("number of communities must be at least 1".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::Domain(format!("label {l} of node {i} not below K = {k}")));
        }
        Ok(LabelVector { labels, k })
    }

    /// Uses `max label + 1` as the community count.
    pub fn infer_k(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, k)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Same labels with a larger community count.
    pub fn with_k(self, k: usize) -> Result<Self> {
        Self::new(self.labels, k)
    }

    /// Node indices of community `c`.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == c).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn degrees_small_graphs() {
        assert_eq!(Graph::empty(3).degrees(), vec![0, 0, 0]);
        assert_eq!(triangle().degrees(), vec![2, 2, 2]);
        assert_eq!(path3().degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn average_degree_small_graphs() {
        assert_eq!(triangle().average_degree().unwrap(), 2.0);
        assert!((path3().average_degree().unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(Graph::empty(5).average_degree().unwrap(), 0.0);
        assert!(matches!(Graph::empty(0).average_degree(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn duplicates_and_loops_collapse() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (2, 2)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(2, 2));
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn labels_validate_k() {
        assert!(LabelVector::new(vec![0, 2], 2).is_err());
        assert!(LabelVector::new(vec![], 0).is_err());
        assert_eq!(LabelVector::infer_k(vec![0, 2, 1]).unwrap().k(), 3);
    }

    #[test]
    fn covariates_reject_ragged_and_nan() {
        assert!(CovariateMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(CovariateMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    fn arb_edges() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..25).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..80)))
    }

    proptest! {
        #[test]
        fn symmetric_loop_free_and_handshake((n, edges) in arb_edges()) {
            let g = Graph::from_edges(n, edges).unwrap();
            for i in 0..n {
                prop_assert!(!g.has_edge(i, i));
                for &j in g.neighbors(i) {
                    prop_assert!(j < n);
                    prop_assert!(g.has_edge(j, i));
                }
            }
            let sum: usize = g.degrees().iter().sum();
            prop_assert_eq!(sum, 2 * g.edge_count());
        }
    }
}
