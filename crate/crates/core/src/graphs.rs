//! Undirected weighted graphs and the networks they induce: adjacency,
//! Laplacian and heat kernel.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::network::MeasureNetwork;

/// Undirected graph on vertices `0..n` with nonnegative edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
}

impl Graph {
    /// Rejects self-loops, out-of-range endpoints and duplicate edges
    /// (`{i, j}` and `{j, i}` count as the same edge).
    pub fn new(n: usize, edges: Vec<(usize, usize)>, weights: Option<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("graph"));
        }
        if let Some(w) = &weights {
            if w.len() != edges.len() {
                return Err(Error::Shape {
                    what: "edge weights",
                    expected: edges.len(),
                    found: w.len(),
                });
            }
            if let Some((k, v)) = w.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::Graph(format!("edge {k} has invalid weight {v}")));
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for (k, &(i, j)) in edges.iter().enumerate() {
            if i >= n || j >= n {
                return Err(Error::Graph(format!(
                    "edge {k} = ({i}, {j}) has an endpoint outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::Graph(format!("edge {k} is a self-loop at {i}")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Graph(format!("edge {k} = ({i}, {j}) is a duplicate")));
            }
        }
        Ok(Self { n, edges, weights })
    }

    pub fn unweighted(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(n, edges, None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[k])
    }

    /// Graph with vertex `k` renamed to `perm[k]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Shape {
                what: "permutation",
                expected: self.n,
                found: perm.len(),
            });
        }
        let edges = self.edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        Self::new(self.n, edges, self.weights.clone())
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            a[(i, j)] = self.weight(k);
            a[(j, i)] = self.weight(k);
        }
        a
    }

    /// Parses one edge per line as `i j` or `i j w`. Blank lines and text
    /// after `#` are ignored. The vertex count is one more than the largest
    /// index, unless `n` is given.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        let mut weighted = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Graph(format!("line {}: {msg}: {raw:?}", lineno + 1));
            if !(2..=3).contains(&fields.len()) {
                return Err(bad("expected `i j` or `i j w`"));
            }
            let i: usize = fields[0].parse().map_err(|_| bad("bad vertex index"))?;
            let j: usize = fields[1].parse().map_err(|_| bad("bad vertex index"))?;
            let has_weight = fields.len() == 3;
            if *weighted.get_or_insert(has_weight) != has_weight {
                return Err(bad("mixed weighted and unweighted edges"));
            }
            if has_weight {
                weights.push(fields[2].parse::<f64>().map_err(|_| bad("bad edge weight"))?);
            }
            edges.push((i, j));
        }
        let inferred = edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
        let n = n.unwrap_or(inferred);
        Self::new(n, edges, weighted.unwrap_or(false).then_some(weights))
    }
}

/// Uniform weights with `ω` the (weighted) adjacency matrix.
pub fn adjacency_network(g: &Graph) -> MeasureNetwork {
    MeasureNetwork::uniform(g.adjacency()).expect("graph has at least one vertex")
}

/// `L = D − A`.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let a = g.adjacency();
    let mut l = -&a;
    for i in 0..g.n {
        l[(i, i)] = a.row(i).sum();
    }
    l
}

/// Uniform weights with `ω = exp(−tL)`, from the eigendecomposition of `L`.
/// Eigenvalues below zero (roundoff) are clamped to zero.
pub fn heat_kernel_network(g: &Graph, t: f64) -> Result<MeasureNetwork> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("heat kernel time must be positive, got {t}")));
    }
    let eig = SymmetricEigen::new(laplacian(g));
    let decay = eig.eigenvalues.map(|l| (-t * l.max(0.0)).exp());
    let v = &eig.eigenvectors;
    let mut omega = v * DMatrix::from_diagonal(&decay) * v.transpose();
    omega = (&omega + omega.transpose()) * 0.5;
    MeasureNetwork::uniform(omega)
}
