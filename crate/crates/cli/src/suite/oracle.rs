//! Reference computations that share no code with the solvers: plain loops
//! over every coupling cell, every function and every permutation.

use gromon::MeasureNetwork;
use itertools::Itertools;
use nalgebra::DMatrix;

/// Quadruple loop over cells. `None` is the sup over cells with mass above `1e-12`.
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

/// Minimum over all `mⁿ` functions whose pushforward is `Y`'s measure.
pub fn brute_gm(x: &MeasureNetwork, y: &MeasureNetwork, p: Option<f64>) -> Option<f64> {
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
        .map(|f| naive_distortion(x, y, &map_table(&f, x.weights(), m), p))
        .min_by(f64::total_cmp)
}

/// `min_σ dis₂` over all bijections between equal-size uniform networks.
pub fn brute_permutation_min(x: &MeasureNetwork, y: &MeasureNetwork) -> f64 {
    let n = x.len();
    let w = 1.0 / n as f64;
    (0..n)
        .permutations(n)
        .map(|s| {
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    let d = x.omega()[(i, k)] - y.omega()[(s[i], s[k])];
                    acc += d * d * w * w;
                }
            }
            acc.sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}
