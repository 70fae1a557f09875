//! `GW₂` for uniform networks with symmetric positive definite network functions.
//!
//! With `ω_X = U_Xᵀ U_X` and `ω_Y = V_Yᵀ V_Y`, minimizing `dis₂(π)²` over couplings
//! is the same as maximizing the convex function `‖U_X π V_Yᵀ‖²`, whose maximum
//! over the scaled Birkhoff polytope sits at a permutation. The search below
//! therefore only visits permutations.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::assignment::max_gain_assignment;
use crate::coupling::MongeMap;
use crate::distortion::map_distortion_unchecked;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, max_asymmetry};
use crate::network::{Exponent, MeasureNetwork};
use crate::tol::{ASCENT_GAIN, TOL_METRIC};

use super::report::{Distance, Method, SolveReport, Witness};
use super::restart_rng;

pub const DEFAULT_RESTARTS: usize = 20;

/// Best permutation found by multi-start vertex ascent on `⟨ω_X π, π ω_Y⟩`.
///
/// Restart 0 starts from the identity; restart `r > 0` from a random
/// permutation drawn from stream `r` of `seed`. The result does not depend on
/// how restarts are scheduled across threads.
pub fn gw_spd_vertex_ascent(x: &MeasureNetwork, y: &MeasureNetwork, restarts: usize, seed: u64) -> Result<SolveReport> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::Shape {
            what: "vertex ascent cardinality",
            expected: n,
            found: y.len(),
        });
    }
    if !x.is_uniform() || !y.is_uniform() {
        return Err(Error::NonUniform);
    }
    let mut warnings = Vec::new();
    for (name, net) in [("X", x), ("Y", y)] {
        let asym = max_asymmetry(net.omega());
        if asym > TOL_METRIC {
            return Err(Error::NotSpd(format!("{name} is not symmetric (deviation {asym:e})")));
        }
        let factor = cholesky(net.omega()).map_err(|e| match e {
            Error::NotSpd(msg) => Error::NotSpd(format!("{name}: {msg}")),
            other => other,
        })?;
        if factor.near_singular {
            warnings.push(format!("{name} is nearly singular"));
        }
    }

    let restarts = restarts.max(1);
    let runs: Vec<Ascent> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                (0..n).collect()
            } else {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut restart_rng(seed, r as u64));
                perm
            };
            ascend(x.omega(), y.omega(), start)
        })
        .collect();
    // first restart wins ties
    let best = runs
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.gain.total_cmp(&b.gain).then(ib.cmp(ia)))
        .map(|(_, a)| a)
        .expect("at least one restart");

    let value = map_distortion_unchecked(x, y, &best.perm, Exponent::TWO);
    let mut report = SolveReport::new(
        Distance::Finite(value),
        Witness::Map(MongeMap::from_parts_unchecked(best.perm.clone(), n)),
        Method::VertexAscent,
    );
    report.iterations = runs.iter().map(|a| a.moves).sum();
    report.warnings = warnings;
    Ok(report)
}

struct Ascent {
    perm: Vec<usize>,
    gain: f64,
    moves: usize,
}

/// `Σ_{i,k} ω_X(i,k) ω_Y(σ(i), σ(k))`.
fn gain(wx: &DMatrix<f64>, wy: &DMatrix<f64>, perm: &[usize]) -> f64 {
    let n = perm.len();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            s += wx[(i, k)] * wy[(perm[i], perm[k])];
        }
    }
    s
}

/// Climb from `perm` until neither the linearized vertex step, nor any
/// transposition, nor any 3-cycle improves the objective by more than
/// [`ASCENT_GAIN`].
fn ascend(wx: &DMatrix<f64>, wy: &DMatrix<f64>, mut perm: Vec<usize>) -> Ascent {
    let n = perm.len();
    let scale = 1.0 / (n * n) as f64;
    let mut current = gain(wx, wy, &perm);
    let mut moves = 0;
    loop {
        // gradient of the gain at σ: 2 (ω_X P ω_Y)(i, j) with P(k, σ(k)) = 1
        let grad = DMatrix::from_fn(n, n, |i, j| {
            2.0 * (0..n).map(|k| wx[(i, k)] * wy[(perm[k], j)]).sum::<f64>()
        });
        if let Ok(next) = max_gain_assignment(&grad) {
            let value = gain(wx, wy, &next);
            if (value - current) * scale > ASCENT_GAIN {
                perm = next;
                current = value;
                moves += 1;
                continue;
            }
        }
        let step =
            best_local_move(wx, wy, &perm, &swaps(n)).or_else(|| best_local_move(wx, wy, &perm, &three_cycles(n)));
        match step {
            Some((cycle, delta)) => {
                apply_cycle(&mut perm, &cycle);
                current += delta;
                moves += 1;
            }
            None => break,
        }
    }
    // re-evaluate to drop accumulated rounding from incremental updates
    let current = gain(wx, wy, &perm);
    Ascent {
        perm,
        gain: current * scale,
        moves,
    }
}

fn swaps(n: usize) -> Vec<Vec<usize>> {
    (0..n).flat_map(|i| (i + 1..n).map(move |k| vec![i, k])).collect()
}

/// Both orientations of every 3-cycle of positions.
fn three_cycles(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push(vec![i, j, k]);
                out.push(vec![i, k, j]);
            }
        }
    }
    out
}

/// Position `c[t]` takes the target previously held by position `c[t + 1]`.
fn apply_cycle(perm: &mut [usize], cycle: &[usize]) {
    let first = perm[cycle[0]];
    for t in 0..cycle.len() - 1 {
        perm[cycle[t]] = perm[cycle[t + 1]];
    }
    perm[cycle[cycle.len() - 1]] = first;
}

/// Change in the gain when the positions in `cycle` are rotated. Only rows
/// and columns touching the cycle change, so this costs `O(n · |cycle|)`.
fn cycle_delta(wx: &DMatrix<f64>, wy: &DMatrix<f64>, perm: &[usize], moved: &[usize], cycle: &[usize]) -> f64 {
    let n = perm.len();
    let mut delta = 0.0;
    for &i in cycle {
        for k in 0..n {
            delta += wx[(i, k)] * (wy[(moved[i], moved[k])] - wy[(perm[i], perm[k])]);
            if !cycle.contains(&k) {
                delta += wx[(k, i)] * (wy[(moved[k], moved[i])] - wy[(perm[k], perm[i])]);
            }
        }
    }
    delta
}

/// Most improving cycle in `candidates` (first one on ties), if it gains more
/// than [`ASCENT_GAIN`] on the normalized objective.
fn best_local_move(
    wx: &DMatrix<f64>,
    wy: &DMatrix<f64>,
    perm: &[usize],
    candidates: &[Vec<usize>],
) -> Option<(Vec<usize>, f64)> {
    let scale = 1.0 / (perm.len() * perm.len()) as f64;
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut moved = perm.to_vec();
    for cycle in candidates {
        apply_cycle(&mut moved, cycle);
        let delta = cycle_delta(wx, wy, perm, &moved, cycle);
        moved.copy_from_slice(perm);
        if delta > best.as_ref().map_or(0.0, |b| b.1) {
            best = Some((cycle.clone(), delta));
        }
    }
    best.filter(|b| b.1 * scale > ASCENT_GAIN)
}
