use nalgebra::{DMatrix, DVector};

use crate::coupling::{check_measure_preserving, MongeMap};
use crate::error::{Error, Result};

use super::cloud::{EuclideanCloud, Isometry, IsometryGroup};

/// Weighted least-squares rigid transform taking `X` onto `Y` along `phi`:
/// minimizes `Σᵢ wᵢ ‖T(xᵢ) − y_{φ(i)}‖²`.
///
/// The orthogonal part is the polar factor of the weighted cross-covariance.
/// A vanishing cross-covariance (e.g. all of `X` at one point) gives the
/// identity rotation, so `T` is a pure translation onto `Y`'s centroid.
pub fn procrustes_align(
    x: &EuclideanCloud,
    y: &EuclideanCloud,
    phi: &MongeMap,
    group: IsometryGroup,
) -> Result<Isometry> {
    if x.dim() != y.dim() {
        return Err(Error::Shape {
            what: "cloud dimension",
            expected: x.dim(),
            found: y.dim(),
        });
    }
    check_measure_preserving(phi.assignment(), x.weights(), y.weights())?;
    Ok(align_unchecked(x, y, phi.assignment(), group))
}

pub(crate) fn align_unchecked(
    x: &EuclideanCloud,
    y: &EuclideanCloud,
    assignment: &[usize],
    group: IsometryGroup,
) -> Isometry {
    let d = x.dim();
    let w = x.weights();
    let xp = x.points();
    let yp = y.points();
    let mut cx = DVector::zeros(d);
    let mut cy = DVector::zeros(d);
    for (i, &j) in assignment.iter().enumerate() {
        cx += w[i] * xp.column(i);
        cy += w[i] * yp.column(j);
    }
    let mut h = DMatrix::zeros(d, d);
    for (i, &j) in assignment.iter().enumerate() {
        h += w[i] * (yp.column(j) - &cy) * (xp.column(i) - &cx).transpose();
    }
    let rotation = polar_factor(h, group);
    let translation = &cy - &rotation * &cx;
    Isometry { rotation, translation }
}

/// Orthogonal `R` maximizing `tr(Hᵀ R)`, restricted to `det R = 1` for `Proper`.
fn polar_factor(h: DMatrix<f64>, group: IsometryGroup) -> DMatrix<f64> {
    let d = h.nrows();
    let scale = h.amax();
    if scale <= 1e-300 {
        return DMatrix::identity(d, d);
    }
    let svd = (h / scale).svd(true, true);
    let mut u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let mut r = &u * &v_t;
    if group == IsometryGroup::Proper && r.determinant() < 0.0 {
        let smallest = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(d - 1);
        u.column_mut(smallest).neg_mut();
        r = &u * &v_t;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn residual(x: &EuclideanCloud, y: &EuclideanCloud, t: &Isometry, a: &[usize]) -> f64 {
        a.iter()
            .enumerate()
            .map(|(i, &j)| x.weights()[i] * (t.apply(&x.point(i)) - y.point(j)).norm_squared())
            .sum()
    }

    #[test]
    fn recovers_a_known_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 1..=3 {
            let x = EuclideanCloud::uniform(DMatrix::from_fn(dim, 7, |_, _| rng.sample(StandardNormal))).unwrap();
            let t0 = Isometry::random(dim, &mut rng);
            let y = x.transformed(&t0).unwrap();
            let t = procrustes_align(&x, &y, &MongeMap::identity(7), IsometryGroup::Full).unwrap();
            assert!(residual(&x, &y, &t, &(0..7).collect::<Vec<_>>()) < 1e-20);
            assert!((&t.rotation - &t0.rotation).amax() < 1e-10);
        }
    }

    #[test]
    fn one_dimensional_least_squares() {
        let x = EuclideanCloud::uniform(dmatrix![0.0, 1.0]).unwrap();
        let y = EuclideanCloud::uniform(dmatrix![0.0, 2.0]).unwrap();
        let t = procrustes_align(&x, &y, &MongeMap::identity(2), IsometryGroup::Full).unwrap();
        assert_eq!(t.rotation, dmatrix![1.0]);
        assert_abs_diff_eq!(t.translation[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(residual(&x, &y, &t, &[0, 1]), 0.5 * (0.25 + 0.25), epsilon = 1e-15);
    }

    #[test]
    fn collapsed_source_is_pure_translation() {
        let x = EuclideanCloud::uniform(dmatrix![1.0, 1.0, 1.0; 2.0, 2.0, 2.0]).unwrap();
        let y = EuclideanCloud::uniform(dmatrix![0.0, 3.0, 0.0; 0.0, 0.0, 3.0]).unwrap();
        let t = procrustes_align(&x, &y, &MongeMap::identity(3), IsometryGroup::Full).unwrap();
        assert_eq!(t.rotation, DMatrix::identity(2, 2));
        let image = t.apply(&x.point(0));
        assert_abs_diff_eq!(image[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(image[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reflections_only_when_allowed() {
        let x = EuclideanCloud::uniform(dmatrix![0.0, 1.0, 0.0; 0.0, 0.0, 2.0]).unwrap();
        let mirror = Isometry::new(dmatrix![1.0, 0.0; 0.0, -1.0], DVector::zeros(2)).unwrap();
        let y = x.transformed(&mirror).unwrap();
        let id = MongeMap::identity(3);
        let full = procrustes_align(&x, &y, &id, IsometryGroup::Full).unwrap();
        assert!(!full.is_proper());
        assert!(residual(&x, &y, &full, &[0, 1, 2]) < 1e-20);
        let proper = procrustes_align(&x, &y, &id, IsometryGroup::Proper).unwrap();
        assert!(proper.is_proper());
        assert!(residual(&x, &y, &proper, &[0, 1, 2]) > 1e-3);
    }

    #[test]
    fn dimension_mismatch() {
        let x = EuclideanCloud::uniform(dmatrix![0.0, 1.0]).unwrap();
        let y = EuclideanCloud::uniform(dmatrix![0.0, 1.0; 0.0, 0.0]).unwrap();
        assert!(procrustes_align(&x, &y, &MongeMap::identity(2), IsometryGroup::Full).is_err());
    }
}
