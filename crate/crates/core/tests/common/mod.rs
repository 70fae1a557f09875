#![allow(dead_code)]

use gromon::{Coupling, MeasureNetwork};
use itertools::Itertools;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Straight quadruple loop, no shortcuts. `p = None` means the sup over support.
pub fn naive_distortion(x: &MeasureNetwork, y: &MeasureNetwork, t: &DMatrix<f64>, p: Option<f64>) -> f64 {
    let (n, m) = (x.len(), y.len());
    let mut acc = 0.0f64;
    for i in 0..n {
        for j in 0..m {
            for k in 0..n {
                for l in 0..m {
                    let d = (x.omega()[(i, k)] - y.omega()[(j, l)]).abs();
                    match p {
                        Some(p) => acc += d.powf(p) * t[(i, j)] * t[(k, l)],
                        None => {
                            if t[(i, j)] > 1e-12 && t[(k, l)] > 1e-12 {
                                acc = acc.max(d);
                            }
                        }
                    }
                }
            }
        }
    }
    match p {
        Some(p) => acc.powf(1.0 / p),
        None => acc,
    }
}

pub fn map_table(assignment: &[usize], weights: &[f64], m: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(assignment.len(), m);
    for (i, &j) in assignment.iter().enumerate() {
        t[(i, j)] = weights[i];
    }
    t
}

/// Every function `X → Y` whose pushforward matches `Y`'s weights.
pub fn all_measure_preserving(x: &MeasureNetwork, y: &MeasureNetwork) -> Vec<Vec<usize>> {
    let (n, m) = (x.len(), y.len());
    (0..n)
        .map(|_| 0..m)
        .multi_cartesian_product()
        .filter(|f| {
            let mut push = vec![0.0; m];
            for (i, &j) in f.iter().enumerate() {
                push[j] += x.weights()[i];
            }
            push.iter().zip(y.weights()).all(|(a, b)| (a - b).abs() < 1e-9)
        })
        .collect()
}

/// Brute-force GM over all functions; `None` when no map exists.
pub fn brute_gm(x: &MeasureNetwork, y: &MeasureNetwork, p: Option<f64>) -> Option<f64> {
    all_measure_preserving(x, y)
        .iter()
        .map(|f| naive_distortion(x, y, &map_table(f, x.weights(), y.len()), p))
        .min_by(f64::total_cmp)
}

/// Minimum `dis₂` over all bijections of two uniform networks of equal size.
pub fn brute_permutation_min(x: &MeasureNetwork, y: &MeasureNetwork) -> f64 {
    let n = x.len();
    (0..n)
        .permutations(n)
        .map(|perm| naive_distortion(x, y, &map_table(&perm, x.weights(), n), Some(2.0)))
        .fold(f64::INFINITY, f64::min)
}

pub fn coupling_table(c: &Coupling) -> DMatrix<f64> {
    c.table().clone()
}
