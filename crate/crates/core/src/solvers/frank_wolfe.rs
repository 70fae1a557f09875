//! Conditional gradient for `GW₂` over the coupling polytope.

use nalgebra::DMatrix;

use crate::assignment::min_cost_assignment;
use crate::coupling::Coupling;
use crate::distortion::{distortion_p, squared_distortion_fast};
use crate::error::Result;
use crate::network::{Exponent, MeasureNetwork};
use crate::transport::solve_transport;

use super::report::{Distance, Method, SolveReport, Witness};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrankWolfeOptions {
    pub max_iters: usize,
    /// Stop once the Frank-Wolfe gap `−⟨∇f, S − π⟩` falls to this value.
    pub tol: f64,
}

impl Default for FrankWolfeOptions {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 1e-9,
        }
    }
}

/// Upper bound on `GW₂(X, Y)` from a first-order stationary coupling.
///
/// Starts at `init` (the product coupling when `None`). Each step moves toward
/// the polytope vertex minimizing the linearized objective, with an exact line
/// search on the quadratic, so the objective never increases.
pub fn gw_frank_wolfe(
    x: &MeasureNetwork,
    y: &MeasureNetwork,
    init: Option<&Coupling>,
    opts: FrankWolfeOptions,
) -> Result<SolveReport> {
    let mut pi = match init {
        Some(c) => {
            // validates the marginals against both networks
            distortion_p(x, y, c, Exponent::TWO)?;
            c.table().clone()
        }
        None => Coupling::product(x.weights(), y.weights())?.table().clone(),
    };
    let (n, m) = (x.len(), y.len());
    let square_uniform = n == m && x.is_uniform() && y.is_uniform();
    let wx = x.omega();
    let wy = y.omega();

    let mut objective = squared_distortion_fast(x, y, &pi);
    let mut trace = vec![objective];
    let mut converged = false;
    let mut stalled = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let grad = -2.0 * (wx * &pi * wy.transpose() + wx.transpose() * &pi * wy);
        let vertex = linear_oracle(&grad, x.weights(), y.weights(), square_uniform)?;
        let dir = vertex - &pi;
        let slope = grad.dot(&dir);
        if -slope <= opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let curvature = -2.0 * wx.dot(&(&dir * wy * dir.transpose()));
        let step = if curvature > 0.0 {
            (-slope / (2.0 * curvature)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let candidate = &pi + step * &dir;
        let value = squared_distortion_fast(x, y, &candidate);
        if value > objective {
            // rounding only; the exact step cannot increase the quadratic
            stalled = true;
            break;
        }
        pi = candidate;
        objective = value;
        trace.push(objective);
    }

    pi.iter_mut().for_each(|v| *v = v.max(0.0));
    let witness = Coupling::new(pi, x.weights().to_vec(), y.weights().to_vec())?;
    let value = distortion_p(x, y, &witness, Exponent::TWO)?;
    let mut report = SolveReport::new(Distance::Finite(value), Witness::Coupling(witness), Method::FrankWolfe);
    report.iterations = iterations;
    report.converged = converged;
    report.trace = trace;
    if stalled {
        report
            .warnings
            .push("line search stalled at rounding level".to_string());
    }
    Ok(report)
}

/// Vertex of the coupling polytope minimizing `⟨grad, S⟩`.
fn linear_oracle(grad: &DMatrix<f64>, a: &[f64], b: &[f64], square_uniform: bool) -> Result<DMatrix<f64>> {
    if square_uniform {
        let n = a.len();
        let perm = min_cost_assignment(grad)?;
        let mut s = DMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            s[(i, j)] = a[i];
        }
        Ok(s)
    } else {
        solve_transport(a, b, grad)
    }
}
