use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::assignment::min_cost_assignment;
use crate::coupling::MongeMap;
use crate::error::{Error, Result};
use crate::network::Exponent;
use crate::solvers::{restart_rng, Distance, Method, SolveReport, Witness};
use crate::sum::csum;

use super::cloud::{random_orthogonal, EuclideanCloud, Isometry, IsometryGroup};
use super::procrustes::align_unchecked;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisoOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_alternations: usize,
    pub group: IsometryGroup,
}

impl Default for MisoOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_alternations: 100,
            group: IsometryGroup::Full,
        }
    }
}

/// Upper bound on the isometry-invariant Monge distance by alternating
/// registration and assignment.
///
/// Given `T`, the best map solves an assignment with cost `‖T(xᵢ) − yⱼ‖^p`;
/// given `φ`, `T` is the weighted Procrustes fit. Procrustes is exact only
/// for `p = 2`; other exponents reuse that fit and score at the true `p`.
///
/// Uniform clouds with `|Y|` dividing `|X|` are supported by giving each
/// target point `|X|/|Y|` assignment slots. When `|Y|` does not divide `|X|`
/// no measure-preserving map exists and the value is infinite.
///
/// Restart 0 starts from `φ(i) = i mod |Y|`; the next restarts start from the
/// principal-axis alignments (all sign choices), the rest from random
/// orthogonal frames. Restarts are independent and run in parallel.
pub fn m_iso(x: &EuclideanCloud, y: &EuclideanCloud, p: Exponent, opts: MisoOptions) -> Result<SolveReport> {
    if x.dim() != y.dim() {
        return Err(Error::Shape {
            what: "cloud dimension",
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let p = match p {
        Exponent::Finite(p) => p,
        Exponent::Infinity => {
            return Err(Error::UnsupportedExponent(
                "isometry-invariant Monge registration",
                "finite p",
            ))
        }
    };
    if !x.is_uniform() || !y.is_uniform() {
        return Err(Error::NonUniform);
    }
    let (n, m) = (x.len(), y.len());
    if n % m != 0 {
        return Ok(SolveReport::new(
            Distance::Infinite,
            Witness::None,
            Method::AlternatingProcrustes,
        ));
    }

    let problem = Problem { x, y, p, slots: n / m };
    let starts = initial_states(x, y, &opts);
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|start| problem.alternate(start, &opts))
        .collect();

    // Lowest cost wins; ties go to the earliest restart.
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.cost < runs[best].cost {
            best = r;
        }
    }
    let iterations = runs.iter().map(|r| r.alternations).sum();
    let run = runs.into_iter().nth(best).expect("at least one restart");
    let value = Exponent::root(p, run.cost);
    let mut report = SolveReport::new(
        Distance::Finite(value),
        Witness::Registration {
            map: MongeMap::from_parts_unchecked(run.assignment, m),
            isometry: run.isometry,
        },
        Method::AlternatingProcrustes,
    );
    report.iterations = iterations;
    report.converged = run.converged;
    report.trace = run.trace;
    if p != 2.0 {
        report
            .warnings
            .push("registration step uses the least-squares fit; value is an upper bound".to_string());
    }
    Ok(report)
}

enum Start {
    Map(Vec<usize>),
    Transform(Isometry),
}

struct Run {
    cost: f64,
    assignment: Vec<usize>,
    isometry: Isometry,
    alternations: usize,
    converged: bool,
    trace: Vec<f64>,
}

struct Problem<'a> {
    x: &'a EuclideanCloud,
    y: &'a EuclideanCloud,
    p: f64,
    slots: usize,
}

impl Problem<'_> {
    /// `Σᵢ wᵢ ‖T(xᵢ) − y_{φ(i)}‖^p`.
    fn cost(&self, t: &Isometry, assignment: &[usize]) -> f64 {
        let w = self.x.weights();
        csum(assignment.iter().enumerate().map(|(i, &j)| {
            let d = (t.apply(&self.x.point(i)) - self.y.point(j)).norm();
            w[i] * Exponent::pow(self.p, d)
        }))
    }

    /// Best map for a fixed `T`: slot `s` of the replicated target is point `s / slots`.
    fn assign(&self, t: &Isometry) -> Vec<usize> {
        let n = self.x.len();
        let moved: Vec<_> = (0..n).map(|i| t.apply(&self.x.point(i))).collect();
        let cost = DMatrix::from_fn(n, n, |i, s| {
            Exponent::pow(self.p, (&moved[i] - self.y.point(s / self.slots)).norm())
        });
        let slots = min_cost_assignment(&cost).expect("finite square cost table");
        slots.into_iter().map(|s| s / self.slots).collect()
    }

    fn alternate(&self, start: Start, opts: &MisoOptions) -> Run {
        let (mut t, mut assignment) = match start {
            Start::Map(a) => (align_unchecked(self.x, self.y, &a, opts.group), a),
            Start::Transform(t) => {
                let a = self.assign(&t);
                (t, a)
            }
        };
        let mut cost = self.cost(&t, &assignment);
        let mut trace = vec![cost];
        let mut best = (cost, assignment.clone(), t.clone());
        let mut converged = false;
        let mut alternations = 0;
        while alternations < opts.max_alternations {
            alternations += 1;
            let next = self.assign(&t);
            if next == assignment {
                converged = true;
                break;
            }
            assignment = next;
            cost = self.cost(&t, &assignment);
            trace.push(cost);
            if cost < best.0 {
                best = (cost, assignment.clone(), t.clone());
            }
            t = align_unchecked(self.x, self.y, &assignment, opts.group);
            cost = self.cost(&t, &assignment);
            trace.push(cost);
            if cost < best.0 {
                best = (cost, assignment.clone(), t.clone());
            }
        }
        Run {
            cost: best.0,
            assignment: best.1,
            isometry: best.2,
            alternations,
            converged,
            trace,
        }
    }
}

fn initial_states(x: &EuclideanCloud, y: &EuclideanCloud, opts: &MisoOptions) -> Vec<Start> {
    let restarts = opts.restarts.max(1);
    let (n, m) = (x.len(), y.len());
    let ex = principal_axes(x);
    let ey = principal_axes(y);
    let mut starts = vec![Start::Map((0..n).map(|i| i % m).collect())];
    for rotation in principal_alignments(&ex, &ey, opts.group) {
        if starts.len() == restarts {
            break;
        }
        starts.push(Start::Transform(centred(x, y, rotation)));
    }
    // Random frames are drawn relative to the principal axes, so every start
    // moves with the clouds and the result is isometry-invariant.
    while starts.len() < restarts {
        let mut rng = restart_rng(opts.seed, starts.len() as u64);
        let mut q = random_orthogonal(x.dim(), &mut rng);
        let mut rotation = &ey * &q * ex.transpose();
        if opts.group == IsometryGroup::Proper && rotation.determinant() < 0.0 {
            q.column_mut(x.dim() - 1).neg_mut();
            rotation = &ey * &q * ex.transpose();
        }
        starts.push(Start::Transform(centred(x, y, rotation)));
    }
    starts
}

/// The isometry with the given orthogonal part that matches the centroids.
fn centred(x: &EuclideanCloud, y: &EuclideanCloud, rotation: DMatrix<f64>) -> Isometry {
    let translation = y.centroid() - &rotation * x.centroid();
    Isometry { rotation, translation }
}

/// Rotations taking the principal axes of `X` onto those of `Y`, one per sign pattern.
fn principal_alignments(ex: &DMatrix<f64>, ey: &DMatrix<f64>, group: IsometryGroup) -> Vec<DMatrix<f64>> {
    let d = ex.nrows();
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        let mut flipped = ey.clone();
        for k in 0..d {
            if mask >> k & 1 == 1 {
                flipped.column_mut(k).neg_mut();
            }
        }
        let r = flipped * ex.transpose();
        if group == IsometryGroup::Proper && r.determinant() < 0.0 {
            continue;
        }
        out.push(r);
    }
    out
}

/// Eigenvectors of the weighted covariance, by decreasing eigenvalue. Each
/// axis is oriented so the cloud's third moment along it is nonnegative,
/// which makes the frame move with the cloud under any isometry.
fn principal_axes(cloud: &EuclideanCloud) -> DMatrix<f64> {
    let c = cloud.centroid();
    let d = cloud.dim();
    let centred: Vec<_> = (0..cloud.len()).map(|i| cloud.points().column(i) - &c).collect();
    let mut cov = DMatrix::zeros(d, d);
    for (v, w) in centred.iter().zip(cloud.weights()) {
        cov += *w * v * v.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut axes = DMatrix::from_fn(d, d, |r, k| eig.eigenvectors[(r, order[k])]);
    for k in 0..d {
        let skew: f64 = centred
            .iter()
            .zip(cloud.weights())
            .map(|(v, w)| w * v.dot(&axes.column(k)).powi(3))
            .sum();
        if skew < 0.0 {
            axes.column_mut(k).neg_mut();
        }
    }
    axes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> EuclideanCloud {
        EuclideanCloud::uniform(DMatrix::from_fn(dim, n, |_, _| rng.sample(StandardNormal))).unwrap()
    }

    #[test]
    fn two_point_line() {
        let x = EuclideanCloud::uniform(dmatrix![0.0, 1.0]).unwrap();
        let y = EuclideanCloud::uniform(dmatrix![0.0, 2.0]).unwrap();
        let r = m_iso(&x, &y, Exponent::TWO, MisoOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value.finite().unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(r.method, Method::AlternatingProcrustes);
    }

    #[test]
    fn congruent_clouds_register_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (dim, n) in [(1, 5), (2, 12), (3, 30)] {
            let x = gaussian(dim, n, &mut rng);
            let perm = {
                let mut p: Vec<usize> = (0..n).collect();
                p.reverse();
                p
            };
            let y = x
                .transformed(&Isometry::random(dim, &mut rng))
                .unwrap()
                .permuted(&perm)
                .unwrap();
            let r = m_iso(&x, &y, Exponent::TWO, MisoOptions::default()).unwrap();
            assert!(r.value.finite().unwrap() <= 1e-6, "dim {dim} n {n}: {}", r.value);
        }
    }

    #[test]
    fn alternation_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let x = gaussian(2, 9, &mut rng);
            let y = gaussian(2, 9, &mut rng);
            let r = m_iso(
                &x,
                &y,
                Exponent::TWO,
                MisoOptions {
                    restarts: 3,
                    ..Default::default()
                },
            )
            .unwrap();
            for w in r.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", r.trace);
            }
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = gaussian(3, 10, &mut rng);
        let y = gaussian(3, 10, &mut rng);
        let opts = MisoOptions {
            seed: 77,
            ..Default::default()
        };
        assert_eq!(
            m_iso(&x, &y, Exponent::TWO, opts).unwrap(),
            m_iso(&x, &y, Exponent::TWO, opts).unwrap()
        );
    }

    #[test]
    fn divisibility_and_unsupported_inputs() {
        let x = EuclideanCloud::uniform(dmatrix![0.0, 1.0, 2.0]).unwrap();
        let y = EuclideanCloud::uniform(dmatrix![0.0, 1.0]).unwrap();
        let r = m_iso(&x, &y, Exponent::TWO, MisoOptions::default()).unwrap();
        assert!(r.value.is_infinite());

        let four = EuclideanCloud::uniform(dmatrix![0.0, 0.0, 4.0, 4.0]).unwrap();
        let two = EuclideanCloud::uniform(dmatrix![0.0, 4.0]).unwrap();
        let r = m_iso(&four, &two, Exponent::ONE, MisoOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value.finite().unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(r.map().unwrap().assignment(), &[0, 0, 1, 1]);

        assert!(matches!(
            m_iso(&x, &y, Exponent::Infinity, MisoOptions::default()),
            Err(Error::UnsupportedExponent(..))
        ));
        let skew = EuclideanCloud::new(dmatrix![0.0, 1.0], vec![0.25, 0.75]).unwrap();
        assert_eq!(
            m_iso(&skew, &skew, Exponent::TWO, MisoOptions::default()),
            Err(Error::NonUniform)
        );
        let plane = EuclideanCloud::uniform(dmatrix![0.0, 1.0; 0.0, 0.0]).unwrap();
        assert!(m_iso(&y, &plane, Exponent::TWO, MisoOptions::default()).is_err());
    }
}
