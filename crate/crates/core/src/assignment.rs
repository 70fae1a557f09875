//! Square linear assignment by shortest augmenting paths with dual potentials.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Minimum-cost perfect matching of a square cost table; returns `row -> column`.
///
/// Columns are scanned in increasing order and only strictly better
/// reductions are taken, so ties resolve toward the lowest column index.
pub fn min_cost_assignment(cost: &DMatrix<f64>) -> Result<Vec<usize>> {
    let n = cost.nrows();
    if cost.ncols() != n {
        return Err(Error::Shape {
            what: "assignment cost columns",
            expected: n,
            found: cost.ncols(),
        });
    }
    for i in 0..n {
        for j in 0..n {
            if !cost[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    field: "assignment cost",
                    row: i,
                    col: j,
                });
            }
        }
    }
    // 1-based with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0; n];
    for j in 1..=n {
        result[owner[j] - 1] = j - 1;
    }
    Ok(result)
}

/// Maximum-gain perfect matching.
pub fn max_gain_assignment(gain: &DMatrix<f64>) -> Result<Vec<usize>> {
    min_cost_assignment(&(-gain))
}

pub fn assignment_cost(cost: &DMatrix<f64>, assignment: &[usize]) -> f64 {
    crate::sum::csum(assignment.iter().enumerate().map(|(i, &j)| cost[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn brute_force(cost: &DMatrix<f64>) -> f64 {
        let n = cost.nrows();
        (0..n)
            .permutations(n)
            .map(|p| p.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn small_known_instance() {
        let cost = dmatrix![4.0, 1.0, 3.0; 2.0, 0.0, 5.0; 3.0, 2.0, 2.0];
        let a = min_cost_assignment(&cost).unwrap();
        assert_eq!(assignment_cost(&cost, &a), 5.0);
        assert_eq!(a, vec![1, 0, 2]);
    }

    #[test]
    fn ties_pick_identity_on_constant_costs() {
        let a = min_cost_assignment(&DMatrix::from_element(4, 4, 1.0)).unwrap();
        assert_eq!(a, vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_and_nonsquare() {
        assert_eq!(min_cost_assignment(&DMatrix::zeros(0, 0)).unwrap(), Vec::<usize>::new());
        assert!(min_cost_assignment(&DMatrix::zeros(2, 3)).is_err());
        assert!(min_cost_assignment(&dmatrix![f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..7, seed in proptest::collection::vec(-10.0f64..10.0, 36)) {
            let cost = DMatrix::from_fn(n, n, |i, j| seed[i * 6 + j]);
            let a = min_cost_assignment(&cost).unwrap();
            let mut seen = a.clone();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
            prop_assert!((assignment_cost(&cost, &a) - brute_force(&cost)).abs() < 1e-9);
        }
    }
}
