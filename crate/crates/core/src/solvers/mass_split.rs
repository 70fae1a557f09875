//! Mass splitting: realizing a coupling as a measure-preserving map out of a
//! pseudometric refinement of the source.

use crate::coupling::{Coupling, MongeMap};
use crate::distortion::{distortion_map, distortion_p, pullback_unchecked};
use crate::error::{Error, Result};
use crate::network::{validate_network, Exponent, MeasureNetwork};
use crate::sum::csum;

/// `Z = supp(π)` with `μ_Z = π`, `ω_Z = ρ* ω_X`, and the two coordinate projections.
///
/// When `X` is a metric space, `network` is a pseudometric mass splitting of `X`.
/// For a general network the same pullback is built and the distortion
/// identity still holds.
#[derive(Debug, Clone, PartialEq)]
pub struct MassSplit {
    pub network: MeasureNetwork,
    pub source_is_metric: bool,
    /// First projection `Z → X`.
    pub rho: MongeMap,
    /// Second projection `Z → Y`.
    pub phi: MongeMap,
    /// The `(i, j)` support cell behind each point of `Z`.
    pub cells: Vec<(usize, usize)>,
}

pub fn mass_split_from_coupling(x: &MeasureNetwork, y: &MeasureNetwork, pi: &Coupling) -> Result<MassSplit> {
    let source_is_metric = validate_network(x).is_metric;
    // marginal compatibility with both networks
    distortion_p(x, y, pi, Exponent::Infinity)?;
    let cells = pi.support();
    if cells.is_empty() {
        return Err(Error::Empty("coupling support"));
    }
    let table = pi.table();
    let mass = csum(cells.iter().map(|&c| table[c]));
    let weights: Vec<f64> = cells.iter().map(|&c| table[c] / mass).collect();
    let rho = MongeMap::new(cells.iter().map(|c| c.0).collect(), &weights, x.weights())?;
    let phi = MongeMap::new(cells.iter().map(|c| c.1).collect(), &weights, y.weights())?;
    let mut network = pullback_unchecked(x, &rho, &weights)?;
    if let (Some(lx), Some(ly)) = (x.labels(), y.labels()) {
        let labels = cells.iter().map(|&(i, j)| format!("({},{})", lx[i], ly[j])).collect();
        network = network.with_labels(labels)?;
    }
    Ok(MassSplit {
        network,
        source_is_metric,
        rho,
        phi,
        cells,
    })
}

/// `dis_p` of the split's second projection; an upper bound on `GW_p(X, Y)`
/// that is attained when `π` is optimal.
pub fn gm_over_split(x: &MeasureNetwork, y: &MeasureNetwork, pi: &Coupling, p: Exponent) -> Result<f64> {
    let split = mass_split_from_coupling(x, y, pi)?;
    distortion_map(&split.network, y, &split.phi, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::coupling_from_map;
    use crate::network::validate_network;
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, DMatrix};

    #[test]
    fn point_vs_two_points_splits_into_two() {
        let x = MeasureNetwork::one_point();
        let y = MeasureNetwork::simplex(2).unwrap();
        let pi = Coupling::product(x.weights(), y.weights()).unwrap();
        let split = mass_split_from_coupling(&x, &y, &pi).unwrap();
        assert!(split.source_is_metric);
        assert_eq!(split.network.len(), 2);
        assert_eq!(split.network.omega(), &DMatrix::zeros(2, 2));
        assert_eq!(split.network.weights(), &[0.5, 0.5]);
        assert_eq!(split.phi.assignment(), &[0, 1]);
        for p in [1.0, 2.0] {
            let d = gm_over_split(&x, &y, &pi, Exponent::Finite(p)).unwrap();
            assert_abs_diff_eq!(d, 2f64.powf(-1.0 / p), epsilon = 1e-15);
        }
    }

    #[test]
    fn diagonal_split_reproduces_the_source() {
        let x = MeasureNetwork::new(
            vec![0.2, 0.3, 0.5],
            dmatrix![0.0, 1.0, 2.0; 1.0, 0.0, 1.5; 2.0, 1.5, 0.0],
        )
        .unwrap();
        let pi = coupling_from_map(&MongeMap::identity(3), x.weights(), x.weights()).unwrap();
        let split = mass_split_from_coupling(&x, &x, &pi).unwrap();
        assert_eq!(split.network.omega(), x.omega());
        assert_eq!(split.network.weights(), x.weights());
        assert_eq!(gm_over_split(&x, &x, &pi, Exponent::TWO).unwrap(), 0.0);
    }

    #[test]
    fn split_of_a_zero_distortion_coupling() {
        // metric source and target, glued by a non-map coupling of distortion 0
        let x = MeasureNetwork::new(vec![0.5, 0.5], dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        let y = MeasureNetwork::uniform(dmatrix![
            0.0, 0.0, 1.0, 1.0;
            0.0, 0.0, 1.0, 1.0;
            1.0, 1.0, 0.0, 0.0;
            1.0, 1.0, 0.0, 0.0
        ])
        .unwrap();
        let table = dmatrix![0.25, 0.25, 0.0, 0.0; 0.0, 0.0, 0.25, 0.25];
        let pi = Coupling::new(table, x.weights().to_vec(), y.weights().to_vec()).unwrap();
        let split = mass_split_from_coupling(&x, &y, &pi).unwrap();
        assert_eq!(split.network.len(), 4);
        assert!(validate_network(&split.network).is_pseudometric);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
            assert_eq!(distortion_map(&split.network, &y, &split.phi, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn weak_iso_pair_splits_with_zero_distortion() {
        let x = MeasureNetwork::new(
            vec![0.5, 0.25, 0.25],
            dmatrix![1.0, 0.0, 0.0; 0.0, 0.0, 0.0; 0.0, 0.0, 0.0],
        )
        .unwrap();
        let y = MeasureNetwork::new(
            vec![0.25, 0.25, 0.5],
            dmatrix![1.0, 1.0, 0.0; 1.0, 1.0, 0.0; 0.0, 0.0, 0.0],
        )
        .unwrap();
        let table = dmatrix![0.25, 0.25, 0.0; 0.0, 0.0, 0.25; 0.0, 0.0, 0.25];
        let pi = Coupling::new(table, x.weights().to_vec(), y.weights().to_vec()).unwrap();
        let split = mass_split_from_coupling(&x, &y, &pi).unwrap();
        assert!(!split.source_is_metric);
        assert_eq!(split.cells, vec![(0, 0), (0, 1), (1, 2), (2, 2)]);
        assert_eq!(split.network.weights(), &[0.25; 4]);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
            assert_eq!(gm_over_split(&x, &y, &pi, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_foreign_coupling() {
        let x = MeasureNetwork::simplex(2).unwrap();
        let pi = Coupling::product(&[0.25, 0.75], x.weights()).unwrap();
        assert!(matches!(
            mass_split_from_coupling(&x, &x, &pi),
            Err(Error::Marginal { .. })
        ));
    }

    #[test]
    fn labels_follow_cells() {
        let x = MeasureNetwork::one_point().with_labels(vec!["x".into()]).unwrap();
        let y = MeasureNetwork::simplex(2)
            .unwrap()
            .with_labels(vec!["a".into(), "b".into()])
            .unwrap();
        let pi = Coupling::product(x.weights(), y.weights()).unwrap();
        let split = mass_split_from_coupling(&x, &y, &pi).unwrap();
        assert_eq!(
            split.network.labels().unwrap(),
            &["(x,a)".to_string(), "(x,b)".to_string()]
        );
    }
}
