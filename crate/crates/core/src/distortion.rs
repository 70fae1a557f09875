//! Distortion functionals, p-size and pullback networks.

use nalgebra::DMatrix;

use crate::coupling::{check_measure_preserving, Coupling, MongeMap};
use crate::error::{Error, Result};
use crate::network::{require_metric, Exponent, MeasureNetwork};
use crate::sum::CompensatedSum;
use crate::tol::TOL_MASS;

fn check_same_weights(side: &'static str, expected: &[f64], found: &[f64]) -> Result<()> {
    if expected.len() != found.len() {
        return Err(Error::Shape {
            what: side,
            expected: expected.len(),
            found: found.len(),
        });
    }
    for (index, (&e, &f)) in expected.iter().zip(found).enumerate() {
        if (e - f).abs() > TOL_MASS {
            return Err(Error::Marginal {
                side,
                index,
                expected: e,
                found: f,
            });
        }
    }
    Ok(())
}

/// p-distortion of a coupling between two networks.
///
/// For finite `p` this is `(Σ |ω_X(i,k) − ω_Y(j,l)|^p π(i,j) π(k,l))^{1/p}`; for
/// `p = ∞` it is the largest mismatch over pairs of support cells.
pub fn distortion_p(x: &MeasureNetwork, y: &MeasureNetwork, pi: &Coupling, p: Exponent) -> Result<f64> {
    check_same_weights("row", x.weights(), pi.source_weights())?;
    check_same_weights("column", y.weights(), pi.target_weights())?;
    let wx = x.omega();
    let wy = y.omega();
    match p {
        Exponent::Finite(p) => {
            let table = pi.table();
            let (n, m) = table.shape();
            let cells: Vec<(usize, usize, f64)> = (0..n)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, table[(i, j)]))
                .filter(|&(_, _, v)| v > 0.0)
                .collect();
            let mut acc = CompensatedSum::new();
            for &(i, j, a) in &cells {
                for &(k, l, b) in &cells {
                    acc.add(Exponent::pow(p, wx[(i, k)] - wy[(j, l)]) * a * b);
                }
            }
            Ok(Exponent::root(p, acc.value()))
        }
        Exponent::Infinity => {
            let cells = pi.support();
            let mut worst: f64 = 0.0;
            for &(i, j) in &cells {
                for &(k, l) in &cells {
                    worst = worst.max((wx[(i, k)] - wy[(j, l)]).abs());
                }
            }
            Ok(worst)
        }
    }
}

/// p-distortion of a measure-preserving map, by the double sum over source pairs.
pub fn distortion_map(x: &MeasureNetwork, y: &MeasureNetwork, phi: &MongeMap, p: Exponent) -> Result<f64> {
    check_measure_preserving(phi.assignment(), x.weights(), y.weights())?;
    Ok(map_distortion_unchecked(x, y, phi.assignment(), p))
}

pub(crate) fn map_distortion_unchecked(
    x: &MeasureNetwork,
    y: &MeasureNetwork,
    assignment: &[usize],
    p: Exponent,
) -> f64 {
    let w = x.weights();
    let wx = x.omega();
    let wy = y.omega();
    let n = assignment.len();
    match p {
        Exponent::Finite(p) => {
            let mut acc = CompensatedSum::new();
            for i in 0..n {
                for k in 0..n {
                    let diff = wx[(i, k)] - wy[(assignment[i], assignment[k])];
                    acc.add(Exponent::pow(p, diff) * w[i] * w[k]);
                }
            }
            Exponent::root(p, acc.value())
        }
        Exponent::Infinity => {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for k in 0..n {
                    worst = worst.max((wx[(i, k)] - wy[(assignment[i], assignment[k])]).abs());
                }
            }
            worst
        }
    }
}

/// The p-size of a network: its distortion against the one-point space.
pub fn size_p(net: &MeasureNetwork, p: Exponent) -> f64 {
    let w = net.weights();
    let omega = net.omega();
    let n = net.len();
    match p {
        Exponent::Finite(p) => {
            let mut acc = CompensatedSum::new();
            for i in 0..n {
                for k in 0..n {
                    acc.add(Exponent::pow(p, omega[(i, k)]) * w[i] * w[k]);
                }
            }
            Exponent::root(p, acc.value())
        }
        Exponent::Infinity => omega.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
    }
}

/// Pulls the metric of `target` back along `rho`, giving the pseudometric
/// `ω(z, z') = d(ρ(z), ρ(z'))` on the source index set.
pub fn pullback_network(target: &MeasureNetwork, rho: &MongeMap, source_weights: &[f64]) -> Result<MeasureNetwork> {
    require_metric(target)?;
    pullback_unchecked(target, rho, source_weights)
}

/// Pullback of an arbitrary network function along a measure-preserving map.
pub(crate) fn pullback_unchecked(
    target: &MeasureNetwork,
    rho: &MongeMap,
    source_weights: &[f64],
) -> Result<MeasureNetwork> {
    check_measure_preserving(rho.assignment(), source_weights, target.weights())?;
    let d = target.omega();
    let a = rho.assignment();
    let n = a.len();
    MeasureNetwork::new(source_weights.to_vec(), DMatrix::from_fn(n, n, |i, k| d[(a[i], a[k])]))
}

/// `dis₂(π)²` through the expanded form
/// `Σ ω_X² μμ + Σ ω_Y² νν − 2⟨ω_X, π ω_Y πᵀ⟩`, valid for any coupling.
pub(crate) fn squared_distortion_fast(x: &MeasureNetwork, y: &MeasureNetwork, table: &DMatrix<f64>) -> f64 {
    let cross = x.omega().dot(&(table * y.omega() * table.transpose()));
    size_p(x, Exponent::TWO).powi(2) + size_p(y, Exponent::TWO).powi(2) - 2.0 * cross
}
