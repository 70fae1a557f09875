use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tol::SPD_PIVOT;

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    pub lower: DMatrix<f64>,
    /// Some pivot fell below [`SPD_PIVOT`].
    pub near_singular: bool,
}

/// Cholesky factorization of a symmetric table; fails on a nonpositive pivot.
pub fn cholesky(a: &DMatrix<f64>) -> Result<CholeskyFactor> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape {
            what: "cholesky columns",
            expected: n,
            found: a.ncols(),
        });
    }
    let mut lower = DMatrix::zeros(n, n);
    let mut near_singular = false;
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= lower[(j, k)] * lower[(j, k)];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::NotSpd(format!("pivot {j} is {d:e}")));
        }
        if d < SPD_PIVOT {
            near_singular = true;
        }
        let ljj = d.sqrt();
        lower[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= lower[(i, k)] * lower[(j, k)];
            }
            lower[(i, j)] = s / ljj;
        }
    }
    Ok(CholeskyFactor { lower, near_singular })
}

pub(crate) fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}
