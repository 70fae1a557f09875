//! Exact Gromov-Monge distances by branch-and-bound over measure-preserving maps.

use crate::coupling::MongeMap;
use crate::distortion::map_distortion_unchecked;
use crate::error::{Error, Result};
use crate::network::{Exponent, MeasureNetwork};
use crate::tol::EPS_SUPP;

use super::enumerate::{count_monge_maps, Fibers};
use super::report::{Distance, Method, SolveReport, Witness};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// `GM_p(X, Y)`: minimum distortion over all measure-preserving maps `X → Y`.
///
/// Refuses with [`Error::TooLarge`] when more than `cap` maps exist. Returns an
/// infinite value when there are none.
pub fn gm_exact(x: &MeasureNetwork, y: &MeasureNetwork, p: Exponent, cap: u64) -> Result<SolveReport> {
    let count = count_monge_maps(x.weights(), y.weights(), cap.saturating_add(1));
    if count > cap {
        return Err(Error::TooLarge { count, cap });
    }
    let mut report = if count == 0 {
        SolveReport::new(Distance::Infinite, Witness::None, Method::Enumeration)
    } else {
        let mut search = Search::new(x, y, p);
        search.descend(0, 0.0);
        let best = search.best.expect("at least one map exists");
        let value = map_distortion_unchecked(x, y, &best, p);
        let mut report = SolveReport::new(
            Distance::Finite(value),
            Witness::Map(MongeMap::from_parts_unchecked(best, y.len())),
            Method::Enumeration,
        );
        report.iterations = search.leaves;
        report
    };
    if p.is_infinite() {
        report.support_eps = Some(EPS_SUPP);
    }
    Ok(report)
}

/// `GM_∞(X, Y)`: minimum sup-distortion over measure-preserving maps.
pub fn gm_infinity(x: &MeasureNetwork, y: &MeasureNetwork, cap: u64) -> Result<SolveReport> {
    gm_exact(x, y, Exponent::Infinity, cap)
}

/// Depth-first search assigning source points in index order. The partial
/// objective only grows, so any branch reaching the incumbent is cut.
struct Search<'a> {
    x: &'a MeasureNetwork,
    y: &'a MeasureNetwork,
    p: Exponent,
    fibers: Fibers,
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
    best_cost: f64,
    leaves: usize,
}

impl<'a> Search<'a> {
    fn new(x: &'a MeasureNetwork, y: &'a MeasureNetwork, p: Exponent) -> Self {
        Self {
            x,
            y,
            p,
            fibers: Fibers::new(x.weights(), y.weights()),
            chosen: Vec::with_capacity(x.len()),
            best: None,
            best_cost: f64::INFINITY,
            leaves: 0,
        }
    }

    /// Cost added by placing source `i` on target `j` given the earlier choices.
    fn increment(&self, i: usize, j: usize, partial: f64) -> f64 {
        let wx = self.x.omega();
        let wy = self.y.omega();
        let w = self.x.weights();
        match self.p {
            Exponent::Finite(p) => {
                let mut add = Exponent::pow(p, wx[(i, i)] - wy[(j, j)]) * w[i] * w[i];
                for (k, &l) in self.chosen.iter().enumerate() {
                    let both = Exponent::pow(p, wx[(i, k)] - wy[(j, l)]) + Exponent::pow(p, wx[(k, i)] - wy[(l, j)]);
                    add += both * w[i] * w[k];
                }
                partial + add
            }
            Exponent::Infinity => {
                let mut worst = partial.max((wx[(i, i)] - wy[(j, j)]).abs());
                for (k, &l) in self.chosen.iter().enumerate() {
                    worst = worst
                        .max((wx[(i, k)] - wy[(j, l)]).abs())
                        .max((wx[(k, i)] - wy[(l, j)]).abs());
                }
                worst
            }
        }
    }

    fn descend(&mut self, i: usize, partial: f64) {
        if i == self.x.len() {
            if self.fibers.complete() {
                self.leaves += 1;
                if partial < self.best_cost {
                    self.best_cost = partial;
                    self.best = Some(self.chosen.clone());
                }
            }
            return;
        }
        for j in 0..self.y.len() {
            if !self.fibers.fits(i, j) {
                continue;
            }
            let cost = self.increment(i, j, partial);
            if cost >= self.best_cost {
                continue;
            }
            self.fibers.take(i, j);
            if !self.fibers.dead(i + 1) {
                self.chosen.push(j);
                self.descend(i + 1, cost);
                self.chosen.pop();
            }
            self.fibers.restore(i, j);
        }
    }
}
