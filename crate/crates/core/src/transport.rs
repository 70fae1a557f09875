//! Exact discrete transport by the transportation simplex method.
//!
//! The basis is kept as a spanning tree over row and column nodes
//! (`n + m − 1` cells, degenerate cells included). Entering cells follow
//! Dantzig's rule; after a run of degenerate pivots the method switches to
//! Bland's rule, which cannot cycle.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const DEGENERATE_RUN: usize = 50;

/// Minimizes `⟨cost, π⟩` over couplings of `supply` and `demand`.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = supply.len();
    let m = demand.len();
    if n == 0 || m == 0 {
        return Err(Error::Empty("transport marginals"));
    }
    if cost.shape() != (n, m) {
        return Err(Error::Shape {
            what: "transport cost",
            expected: n * m,
            found: cost.len(),
        });
    }
    let scale = cost.iter().fold(1.0_f64, |s, c| s.max(c.abs()));
    let tol = 1e-12 * scale;

    let mut flow = DMatrix::zeros(n, m);
    let mut basis = north_west_corner(supply, demand, &mut flow);
    let mut is_basic = DMatrix::from_element(n, m, false);
    for &(i, j) in &basis {
        is_basic[(i, j)] = true;
    }

    let max_pivots = 50 * n * m + 1000;
    let mut degenerate = 0;
    for _ in 0..max_pivots {
        let (u, v) = potentials(n, m, &basis, cost);
        let bland = degenerate >= DEGENERATE_RUN;
        let mut entering = None;
        let mut best = -tol;
        'scan: for i in 0..n {
            for j in 0..m {
                if is_basic[(i, j)] {
                    continue;
                }
                let reduced = cost[(i, j)] - u[i] - v[j];
                if reduced < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = reduced;
                }
            }
        }
        let Some((ie, je)) = entering else {
            return Ok(flow);
        };

        let path = tree_path(n, m, &basis, ie, je);
        // path[k] is a basis index; signs alternate starting with − at the column end
        let mut leave: Option<(usize, f64)> = None;
        for (k, &b) in path.iter().enumerate() {
            if k % 2 == 1 {
                continue;
            }
            let cell = basis[b];
            let x = flow[cell];
            let better = match leave {
                None => true,
                Some((lb, lx)) => x < lx || (x == lx && cell < basis[lb]),
            };
            if better {
                leave = Some((b, x));
            }
        }
        let (leave_idx, theta) = leave.expect("cycle always has a minus cell");
        for (k, &b) in path.iter().enumerate() {
            let cell = basis[b];
            if k % 2 == 0 {
                flow[cell] = (flow[cell] - theta).max(0.0);
            } else {
                flow[cell] += theta;
            }
        }
        flow[(ie, je)] = theta;
        let left = basis[leave_idx];
        flow[left] = 0.0;
        is_basic[left] = false;
        is_basic[(ie, je)] = true;
        basis[leave_idx] = (ie, je);

        if theta == 0.0 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
    }
    Err(Error::Transport(max_pivots))
}

fn north_west_corner(supply: &[f64], demand: &[f64], flow: &mut DMatrix<f64>) -> Vec<(usize, usize)> {
    let (n, m) = (supply.len(), demand.len());
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let mut basis = Vec::with_capacity(n + m - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let x = a[i].min(b[j]).max(0.0);
        flow[(i, j)] = x;
        basis.push((i, j));
        a[i] -= x;
        b[j] -= x;
        if i == n - 1 && j == m - 1 {
            break;
        }
        if i == n - 1 {
            j += 1;
        } else if j == m - 1 || a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    basis
}

/// Row potentials `u` and column potentials `v` with `u_i + v_j = c_ij` on the basis.
fn potentials(n: usize, m: usize, basis: &[(usize, usize)], cost: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(n, m, basis);
    let mut pot = vec![f64::NAN; n + m];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0]);
    while let Some(node) = queue.pop_front() {
        for &b in &adj[node] {
            let (i, j) = basis[b];
            let other = if node == i { n + j } else { i };
            if pot[other].is_nan() {
                pot[other] = cost[(i, j)] - pot[node];
                queue.push_back(other);
            }
        }
    }
    let v = pot.split_off(n);
    (pot, v)
}

fn adjacency(n: usize, m: usize, basis: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n + m];
    for (b, &(i, j)) in basis.iter().enumerate() {
        adj[i].push(b);
        adj[n + j].push(b);
    }
    adj
}

/// Basis cells on the tree path from column node `je` back to row node `ie`.
fn tree_path(n: usize, m: usize, basis: &[(usize, usize)], ie: usize, je: usize) -> Vec<usize> {
    let adj = adjacency(n, m, basis);
    let mut parent: Vec<Option<usize>> = vec![None; n + m];
    let mut seen = vec![false; n + m];
    seen[ie] = true;
    let mut queue = VecDeque::from([ie]);
    while let Some(node) = queue.pop_front() {
        if node == n + je {
            break;
        }
        for &b in &adj[node] {
            let (i, j) = basis[b];
            let other = if node == i { n + j } else { i };
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some(b);
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = n + je;
    while node != ie {
        let b = parent[node].expect("basis is a spanning tree");
        path.push(b);
        let (i, j) = basis[b];
        node = if node == i { n + j } else { i };
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{assignment_cost, min_cost_assignment};
    use crate::sum::csum;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn total(cost: &DMatrix<f64>, flow: &DMatrix<f64>) -> f64 {
        csum(cost.iter().zip(flow.iter()).map(|(c, f)| c * f))
    }

    fn check_marginals(flow: &DMatrix<f64>, a: &[f64], b: &[f64]) {
        for (i, &ai) in a.iter().enumerate() {
            assert_abs_diff_eq!(flow.row(i).sum(), ai, epsilon = 1e-12);
        }
        for (j, &bj) in b.iter().enumerate() {
            assert_abs_diff_eq!(flow.column(j).sum(), bj, epsilon = 1e-12);
        }
        assert!(flow.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn textbook_instance() {
        // supplies 20/30/50, demands 30/40/30
        let a = [0.2, 0.3, 0.5];
        let b = [0.3, 0.4, 0.3];
        let cost = dmatrix![8.0, 6.0, 10.0; 9.0, 12.0, 13.0; 14.0, 9.0, 16.0];
        let flow = solve_transport(&a, &b, &cost).unwrap();
        check_marginals(&flow, &a, &b);
        // optimum: x13=.2, x21=.3, x32=.4, x33=.1 -> 2 + 2.7 + 3.6 + 1.6
        assert_abs_diff_eq!(total(&cost, &flow), 9.9, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_uniform_square_matches_assignment() {
        let cost = dmatrix![4.0, 1.0, 3.0; 2.0, 0.0, 5.0; 3.0, 2.0, 2.0];
        let w = [1.0 / 3.0; 3];
        let flow = solve_transport(&w, &w, &cost).unwrap();
        check_marginals(&flow, &w, &w);
        let a = min_cost_assignment(&cost).unwrap();
        assert_abs_diff_eq!(total(&cost, &flow), assignment_cost(&cost, &a) / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn single_row_or_column() {
        let flow = solve_transport(&[1.0], &[0.25, 0.75], &dmatrix![3.0, 1.0]).unwrap();
        assert_eq!(flow, dmatrix![0.25, 0.75]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn optimal_against_uniform_assignment(n in 1usize..6, raw in proptest::collection::vec(0.0f64..10.0, 25)) {
            let cost = DMatrix::from_fn(n, n, |i, j| raw[i * 5 + j].round());
            let w = vec![1.0 / n as f64; n];
            let flow = solve_transport(&w, &w, &cost).unwrap();
            let a = min_cost_assignment(&cost).unwrap();
            prop_assert!((total(&cost, &flow) - assignment_cost(&cost, &a) / n as f64).abs() < 1e-10);
        }

        #[test]
        fn feasible_and_no_worse_than_product(
            n in 1usize..6, m in 1usize..6,
            ra in proptest::collection::vec(0.1f64..1.0, 5),
            rb in proptest::collection::vec(0.1f64..1.0, 5),
            rc in proptest::collection::vec(-5.0f64..5.0, 25),
        ) {
            let sa: f64 = ra[..n].iter().sum();
            let sb: f64 = rb[..m].iter().sum();
            let a: Vec<f64> = ra[..n].iter().map(|x| x / sa).collect();
            let b: Vec<f64> = rb[..m].iter().map(|x| x / sb).collect();
            let cost = DMatrix::from_fn(n, m, |i, j| rc[i * 5 + j]);
            let flow = solve_transport(&a, &b, &cost).unwrap();
            check_marginals(&flow, &a, &b);
            let product = DMatrix::from_fn(n, m, |i, j| a[i] * b[j]);
            prop_assert!(total(&cost, &flow) <= total(&cost, &product) + 1e-12);
        }
    }
}
