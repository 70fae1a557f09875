//! Seeded generators for test and benchmark instances. Every generator
//! draws only from the supplied RNG, so a fixed seed gives a fixed instance.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::euclidean::EuclideanCloud;
use crate::graphs::Graph;
use crate::network::MeasureNetwork;

/// Probability vector with entries drawn from `[0.5, 1.5)` then normalized.
pub fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Uniform weights and `ω = AᵀA + n·10⁻³·I` for a Gaussian `A`.
pub fn random_spd_network<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MeasureNetwork> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut omega = a.tr_mul(&a);
    omega = (&omega + omega.transpose()) * 0.5;
    for i in 0..n {
        omega[(i, i)] += n as f64 * 1e-3;
    }
    MeasureNetwork::uniform(omega)
}

/// Uniform weights and the shortest-path metric of a random connected graph
/// with edge lengths in `[0.5, 2)`.
pub fn random_metric_network<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MeasureNetwork> {
    if n == 0 {
        return Err(Error::Empty("metric"));
    }
    let mut d = DMatrix::from_element(n, n, f64::INFINITY);
    for i in 0..n {
        d[(i, i)] = 0.0;
    }
    // A random tree keeps the graph connected; extra edges vary the geometry.
    for k in 1..n {
        let j = rng.random_range(0..k);
        let len = rng.random_range(0.5..2.0);
        d[(k, j)] = len;
        d[(j, k)] = len;
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[(i, j)].is_infinite() && rng.random_bool(0.4) {
                let len = rng.random_range(0.5..2.0);
                d[(i, j)] = len;
                d[(j, i)] = len;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    MeasureNetwork::uniform(d)
}

/// Standard Gaussian points with uniform weights.
pub fn random_cloud<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<EuclideanCloud> {
    if n == 0 {
        return Err(Error::Empty("points"));
    }
    EuclideanCloud::uniform(DMatrix::from_fn(dim, n, |_, _| rng.sample(StandardNormal)))
}

/// Erdős–Rényi graph: each pair is an edge independently with probability `prob`.
pub fn random_graph<R: Rng + ?Sized>(n: usize, prob: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::Parameter(format!(
            "edge probability must lie in [0, 1], got {prob}"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(prob) {
                edges.push((i, j));
            }
        }
    }
    Graph::unweighted(n, edges)
}

/// Random coupling: a positive random table brought onto the marginals by
/// alternating row and column scaling.
pub fn random_coupling<R: Rng + ?Sized>(a: &[f64], b: &[f64], rng: &mut R) -> Result<Coupling> {
    let (n, m) = (a.len(), b.len());
    let mut t = DMatrix::from_fn(n, m, |_, _| rng.random_range(0.05..1.0));
    for _ in 0..10_000 {
        for (mut col, target) in t.column_iter_mut().zip(b) {
            let s = col.sum();
            col.scale_mut(target / s);
        }
        for (mut row, target) in t.row_iter_mut().zip(a) {
            let s = row.sum();
            row.scale_mut(target / s);
        }
        let err = t
            .column_iter()
            .zip(b)
            .map(|(col, target)| (col.sum() - target).abs())
            .fold(0.0, f64::max);
        if err < 1e-15 {
            break;
        }
    }
    Coupling::new(t, a.to_vec(), b.to_vec())
}
