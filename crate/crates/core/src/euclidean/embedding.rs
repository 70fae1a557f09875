use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::{require_metric, Exponent, MeasureNetwork};
use crate::solvers::{gm_exact, gm_infinity, Distance};

/// Embedding Gromov-Monge distance at `p = ∞`, which equals `½ GM_∞` exactly.
pub fn gm_em_infinity(x: &MeasureNetwork, y: &MeasureNetwork, cap: u64) -> Result<Distance> {
    require_metric(x)?;
    require_metric(y)?;
    Ok(gm_infinity(x, y, cap)?.value.halved())
}

/// `½ GM_p`, a certified lower bound on the embedding Gromov-Monge distance.
pub fn gm_em_lower(x: &MeasureNetwork, y: &MeasureNetwork, p: Exponent, cap: u64) -> Result<Distance> {
    require_metric(x)?;
    require_metric(y)?;
    Ok(gm_exact(x, y, p, cap)?.value.halved())
}

/// Embedding distance between the `n`-point simplex and a single point,
/// computed in closed form and by direct minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingValue {
    pub closed_form: f64,
    pub numerical: f64,
    /// Minimizer found by the numerical solve.
    pub alpha: Vec<f64>,
    /// Whether the constant vector `(½, …, ½)` satisfies every constraint.
    pub half_feasible: bool,
}

impl EmbeddingValue {
    pub fn gap(&self) -> f64 {
        (self.closed_form - self.numerical).abs()
    }
}

/// Minimizes `(Σ αᵢ^p / n)^{1/p}` over distances `αᵢ` from the simplex points
/// to the image of the point, subject to the triangle constraints
/// `|αᵢ − αⱼ| ≤ 1 ≤ αᵢ + αⱼ`. The closed form is `½` for `n ≥ 2`.
///
/// The numerical value comes from a log-barrier interior-point method. The
/// box `α ≤ 1` is added; clipping any feasible `α` to it keeps feasibility
/// and never increases the objective.
pub fn simplex_point_embedding_value(n: usize, p: Exponent) -> Result<EmbeddingValue> {
    if n == 0 {
        return Err(Error::Empty("simplex"));
    }
    let p = match p {
        Exponent::Finite(p) => p,
        Exponent::Infinity => return Err(Error::UnsupportedExponent("simplex embedding minimization", "finite p")),
    };
    if n == 1 {
        return Ok(EmbeddingValue {
            closed_form: 0.0,
            numerical: 0.0,
            alpha: vec![0.0],
            half_feasible: true,
        });
    }
    let constraints = Constraints::simplex(n);
    let half = DVector::from_element(n, 0.5);
    let half_feasible = constraints.slacks(&half).iter().all(|&s| s >= -1e-15);
    let alpha = barrier_minimize(&constraints, p, DVector::from_element(n, 0.75));
    let objective: f64 = alpha.iter().map(|a| Exponent::pow(p, *a)).sum::<f64>() / n as f64;
    Ok(EmbeddingValue {
        closed_form: 0.5,
        numerical: Exponent::root(p, objective),
        alpha: alpha.iter().copied().collect(),
        half_feasible,
    })
}

/// Linear constraints `A α ≤ b`.
struct Constraints {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Constraints {
    fn simplex(n: usize) -> Self {
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        let unit = |pairs: &[(usize, f64)]| {
            let mut r = vec![0.0; n];
            for &(k, v) in pairs {
                r[k] = v;
            }
            r
        };
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    rows.push((unit(&[(i, -1.0), (j, -1.0)]), -1.0));
                }
                if i != j {
                    rows.push((unit(&[(i, 1.0), (j, -1.0)]), 1.0));
                }
            }
            rows.push((unit(&[(i, -1.0)]), 0.0));
            rows.push((unit(&[(i, 1.0)]), 1.0));
        }
        let a = DMatrix::from_fn(rows.len(), n, |r, c| rows[r].0[c]);
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        Self { a, b }
    }

    fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.b - &self.a * x
    }
}

/// Minimizes `Σ xᵢ^p` over the interior of the constraint set by Newton's
/// method on `t·f(x) − Σ log(slack)`, increasing `t` until the duality gap
/// bound `m/t` is below `1e-11`.
fn barrier_minimize(cons: &Constraints, p: f64, start: DVector<f64>) -> DVector<f64> {
    let m = cons.b.len() as f64;
    let n = start.len();
    let f = |x: &DVector<f64>| x.iter().map(|v| v.powf(p)).sum::<f64>();
    let mut x = start;
    let mut t = 1.0;
    while m / t > 1e-11 {
        for _ in 0..200 {
            let s = cons.slacks(&x);
            let inv = s.map(|v| 1.0 / v);
            let grad = DVector::from_fn(n, |i, _| t * p * x[i].powf(p - 1.0)) + cons.a.transpose() * &inv;
            let weighted = DMatrix::from_fn(cons.a.nrows(), n, |r, c| cons.a[(r, c)] * inv[r]);
            let mut hess = weighted.transpose() * &weighted;
            if p != 1.0 {
                for i in 0..n {
                    hess[(i, i)] += t * p * (p - 1.0) * x[i].powf(p - 2.0);
                }
            }
            let Some(chol) = hess.cholesky() else { break };
            let step = -chol.solve(&grad);
            let decrement = -grad.dot(&step);
            if decrement / 2.0 <= 1e-13 {
                break;
            }
            let phi = |y: &DVector<f64>| -> Option<f64> {
                let s = cons.slacks(y);
                if s.iter().any(|&v| v <= 0.0) || y.iter().any(|&v| v <= 0.0) {
                    return None;
                }
                Some(t * f(y) - s.iter().map(|v| v.ln()).sum::<f64>())
            };
            let current = phi(&x).expect("iterate stays interior");
            let mut h = 1.0;
            let mut moved = false;
            while h > 1e-12 {
                let trial = &x + h * &step;
                if let Some(v) = phi(&trial) {
                    if v <= current - 0.25 * h * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                h *= 0.5;
            }
            if !moved {
                break;
            }
        }
        t *= 10.0;
    }
    x
}
