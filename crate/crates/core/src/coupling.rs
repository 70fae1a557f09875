//! Couplings of two probability vectors and measure-preserving maps between them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::check_weights;
use crate::sum::{csum, CompensatedSum};
use crate::tol::{EPS_SUPP, TOL_MASS};

/// A nonnegative `n × m` table whose row sums are `source_weights` and whose
/// column sums are `target_weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    table: DMatrix<f64>,
    source_weights: Vec<f64>,
    target_weights: Vec<f64>,
}

impl Coupling {
    pub fn new(table: DMatrix<f64>, source_weights: Vec<f64>, target_weights: Vec<f64>) -> Result<Self> {
        check_weights("source_weights", &source_weights)?;
        check_weights("target_weights", &target_weights)?;
        check_marginals(&table, &source_weights, &target_weights)?;
        Ok(Self {
            table,
            source_weights,
            target_weights,
        })
    }

    /// The product coupling `μ ⊗ ν`.
    pub fn product(source_weights: &[f64], target_weights: &[f64]) -> Result<Self> {
        let table = DMatrix::from_fn(source_weights.len(), target_weights.len(), |i, j| {
            source_weights[i] * target_weights[j]
        });
        Self::new(table, source_weights.to_vec(), target_weights.to_vec())
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn source_weights(&self) -> &[f64] {
        &self.source_weights
    }

    pub fn target_weights(&self) -> &[f64] {
        &self.target_weights
    }

    pub fn shape(&self) -> (usize, usize) {
        self.table.shape()
    }

    /// Cells with mass above [`EPS_SUPP`], in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let (n, m) = self.shape();
        (0..n)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|&(i, j)| self.table[(i, j)] > EPS_SUPP)
            .collect()
    }
}

fn check_marginals(table: &DMatrix<f64>, source: &[f64], target: &[f64]) -> Result<()> {
    let (n, m) = table.shape();
    if n != source.len() {
        return Err(Error::Shape {
            what: "coupling rows",
            expected: source.len(),
            found: n,
        });
    }
    if m != target.len() {
        return Err(Error::Shape {
            what: "coupling columns",
            expected: target.len(),
            found: m,
        });
    }
    for i in 0..n {
        for j in 0..m {
            let v = table[(i, j)];
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    field: "table",
                    row: i,
                    col: j,
                });
            }
            if v < 0.0 {
                return Err(Error::NegativeMass {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    for (i, &expected) in source.iter().enumerate() {
        let found = csum(table.row(i).iter().copied());
        if (found - expected).abs() > TOL_MASS {
            return Err(Error::Marginal {
                side: "row",
                index: i,
                expected,
                found,
            });
        }
    }
    for (j, &expected) in target.iter().enumerate() {
        let found = csum(table.column(j).iter().copied());
        if (found - expected).abs() > TOL_MASS {
            return Err(Error::Marginal {
                side: "column",
                index: j,
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// A map `X → Y` given by target indices; valid maps push `source_weights`
/// forward onto `target_weights`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MongeMap {
    assignment: Vec<usize>,
    target_len: usize,
}

impl MongeMap {
    pub fn new(assignment: Vec<usize>, source_weights: &[f64], target_weights: &[f64]) -> Result<Self> {
        check_measure_preserving(&assignment, source_weights, target_weights)?;
        Ok(Self {
            assignment,
            target_len: target_weights.len(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            target_len: n,
        }
    }

    pub(crate) fn from_parts_unchecked(assignment: Vec<usize>, target_len: usize) -> Self {
        Self { assignment, target_len }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }
}

/// Checks `φ_# source = target` within [`TOL_MASS`].
pub fn check_measure_preserving(assignment: &[usize], source: &[f64], target: &[f64]) -> Result<()> {
    if assignment.len() != source.len() {
        return Err(Error::Shape {
            what: "assignment",
            expected: source.len(),
            found: assignment.len(),
        });
    }
    let mut fibers = vec![CompensatedSum::new(); target.len()];
    for (index, &j) in assignment.iter().enumerate() {
        if j >= target.len() {
            return Err(Error::AssignmentRange {
                index,
                target: j,
                len: target.len(),
            });
        }
        fibers[j].add(source[index]);
    }
    for (j, (fiber, &expected)) in fibers.iter().zip(target).enumerate() {
        let found = fiber.value();
        if (found - expected).abs() > TOL_MASS {
            return Err(Error::NotMeasurePreserving {
                target: j,
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// The coupling `π_φ = (id × φ)_# μ`: row `i` puts all of `source_weights[i]` on column `φ(i)`.
pub fn coupling_from_map(phi: &MongeMap, source_weights: &[f64], target_weights: &[f64]) -> Result<Coupling> {
    check_measure_preserving(phi.assignment(), source_weights, target_weights)?;
    let mut table = DMatrix::zeros(source_weights.len(), target_weights.len());
    for (i, &j) in phi.assignment().iter().enumerate() {
        table[(i, j)] = source_weights[i];
    }
    Coupling::new(table, source_weights.to_vec(), target_weights.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn identity_map_gives_diagonal_coupling() {
        let w = [0.5, 0.5];
        let pi = coupling_from_map(&MongeMap::identity(2), &w, &w).unwrap();
        assert_eq!(pi.table(), &dmatrix![0.5, 0.0; 0.0, 0.5]);
    }

    #[test]
    fn two_to_one_map() {
        let src = [0.25; 4];
        let tgt = [0.5; 2];
        let phi = MongeMap::new(vec![0, 1, 0, 1], &src, &tgt).unwrap();
        let pi = coupling_from_map(&phi, &src, &tgt).unwrap();
        assert_eq!(pi.table(), &dmatrix![0.25, 0.0; 0.0, 0.25; 0.25, 0.0; 0.0, 0.25]);
    }

    #[test]
    fn unequal_weights_map() {
        let src = [0.5, 0.25, 0.25];
        let tgt = [0.25, 0.25, 0.5];
        let phi = MongeMap::new(vec![2, 0, 1], &src, &tgt).unwrap();
        let pi = coupling_from_map(&phi, &src, &tgt).unwrap();
        assert_eq!(pi.table(), &dmatrix![0.0, 0.0, 0.5; 0.25, 0.0, 0.0; 0.0, 0.25, 0.0]);
    }

    #[test]
    fn rejects_non_measure_preserving() {
        let src = [0.5, 0.25, 0.25];
        let tgt = [0.25, 0.25, 0.5];
        assert!(matches!(
            MongeMap::new(vec![0, 1, 2], &src, &tgt),
            Err(Error::NotMeasurePreserving { target: 0, .. })
        ));
        assert!(matches!(
            MongeMap::new(vec![0, 1, 3], &src, &tgt),
            Err(Error::AssignmentRange { .. })
        ));
        assert!(MongeMap::new(vec![0, 1], &src, &tgt).is_err());
    }

    #[test]
    fn marginal_checks() {
        let w = vec![0.5, 0.5];
        assert!(Coupling::new(dmatrix![0.5, 0.0; 0.0, 0.5], w.clone(), w.clone()).is_ok());
        assert!(matches!(
            Coupling::new(dmatrix![0.5, 0.0; 0.5, 0.0], w.clone(), w.clone()),
            Err(Error::Marginal { side: "column", .. })
        ));
        assert!(matches!(
            Coupling::new(dmatrix![0.6, -0.1; -0.1, 0.6], w.clone(), w),
            Err(Error::NegativeMass { .. })
        ));
    }

    #[test]
    fn product_support_is_everything() {
        let pi = Coupling::product(&[1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(pi.support(), vec![(0, 0), (0, 1)]);
    }
}
