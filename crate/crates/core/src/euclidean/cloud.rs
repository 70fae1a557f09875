use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::network::{check_weights, is_uniform, MeasureNetwork};

/// Weighted points in `ℝ^dim`, stored as the columns of a `dim × n` table.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanCloud {
    points: DMatrix<f64>,
    weights: Vec<f64>,
}

impl EuclideanCloud {
    pub fn new(points: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        check_weights("weights", &weights)?;
        if points.nrows() == 0 {
            return Err(Error::Empty("dim"));
        }
        if points.ncols() != weights.len() {
            return Err(Error::Shape {
                what: "points",
                expected: weights.len(),
                found: points.ncols(),
            });
        }
        for (k, v) in points.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    field: "points",
                    row: k / points.nrows(),
                    col: k % points.nrows(),
                });
            }
        }
        Ok(Self { points, weights })
    }

    /// Cloud from a list of coordinate rows, one per point.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        for row in rows {
            if row.len() != dim {
                return Err(Error::Shape {
                    what: "point coordinates",
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(dim, rows.len(), |d, i| rows[i][d]), weights)
    }

    pub fn uniform(points: DMatrix<f64>) -> Result<Self> {
        let n = points.ncols();
        if n == 0 {
            return Err(Error::Empty("points"));
        }
        Self::new(points, vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.column(i).into_owned()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        is_uniform(&self.weights)
    }

    pub fn centroid(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.dim());
        for (i, w) in self.weights.iter().enumerate() {
            c += *w * self.points.column(i);
        }
        c
    }

    /// The cloud `T(X)`.
    pub fn transformed(&self, t: &Isometry) -> Result<Self> {
        if t.dim() != self.dim() {
            return Err(Error::Shape {
                what: "isometry dimension",
                expected: self.dim(),
                found: t.dim(),
            });
        }
        let mut points = &t.rotation * &self.points;
        for mut col in points.column_iter_mut() {
            col += &t.translation;
        }
        Self::new(points, self.weights.clone())
    }

    /// Relabels points so that new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::Shape {
                what: "permutation",
                expected: self.len(),
                found: perm.len(),
            });
        }
        let points = DMatrix::from_fn(self.dim(), self.len(), |d, k| self.points[(d, perm[k])]);
        Self::new(points, perm.iter().map(|&p| self.weights[p]).collect())
    }
}

/// Distance network of a cloud: `ω(i, j) = ‖xᵢ − xⱼ‖`, or its square.
pub fn cloud_to_network(cloud: &EuclideanCloud, squared: bool) -> Result<MeasureNetwork> {
    let n = cloud.len();
    let pts = cloud.points();
    let omega = DMatrix::from_fn(n, n, |i, j| {
        let d2 = (pts.column(i) - pts.column(j)).norm_squared();
        if squared {
            d2
        } else {
            d2.sqrt()
        }
    });
    MeasureNetwork::new(cloud.weights().to_vec(), omega)
}

/// Which isometries registration may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsometryGroup {
    /// All of `E(n)`, reflections included.
    #[default]
    Full,
    /// Orientation-preserving motions only.
    Proper,
}

/// `x ↦ rotation · x + translation` with an orthogonal `rotation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    pub rotation: DMatrix<f64>,
    pub translation: DVector<f64>,
}

const ORTHOGONALITY_TOL: f64 = 1e-10;

impl Isometry {
    pub fn new(rotation: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let d = rotation.nrows();
        if rotation.ncols() != d || translation.len() != d {
            return Err(Error::Shape {
                what: "isometry",
                expected: d,
                found: if rotation.ncols() != d {
                    rotation.ncols()
                } else {
                    translation.len()
                },
            });
        }
        let err = (rotation.transpose() * &rotation - DMatrix::identity(d, d)).amax();
        if err.is_nan() || err > ORTHOGONALITY_TOL {
            return Err(Error::Parameter(format!(
                "rotation is not orthogonal (deviation {err:e})"
            )));
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            rotation: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rotation * x + &self.translation
    }

    pub fn is_proper(&self) -> bool {
        self.rotation.determinant() > 0.0
    }

    /// Haar-random orthogonal part (reflections included) with a Gaussian translation.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let rotation = random_orthogonal(dim, rng);
        let translation = DVector::from_fn(dim, |_, _| rng.sample(StandardNormal));
        Self { rotation, translation }
    }
}

pub(crate) fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
