//! Finite measure networks and the metric-axiom scan.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sum::csum;
use crate::tol::{TOL_MASS, TOL_METRIC};

/// Exponent `p` of a distortion or distance. `Infinity` is exact, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Err(Error::Exponent(p))
        }
    }

    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `|x|^p` for finite `p`, with the common integer cases kept exact.
    pub(crate) fn pow(p: f64, x: f64) -> f64 {
        let x = x.abs();
        if p == 1.0 {
            x
        } else if p == 2.0 {
            x * x
        } else {
            x.powf(p)
        }
    }

    pub(crate) fn root(p: f64, s: f64) -> f64 {
        let s = s.max(0.0);
        if p == 1.0 {
            s
        } else if p == 2.0 {
            s.sqrt()
        } else {
            s.powf(1.0 / p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            _ => {
                let p: f64 = s
                    .parse()
                    .map_err(|_| Error::Parameter(format!("cannot parse exponent {s:?}")))?;
                Exponent::finite(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// Checks that `weights` is a strictly positive probability vector.
pub(crate) fn check_weights(field: &'static str, weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Empty(field));
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                field,
                row: index,
                col: 0,
            });
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveWeight { field, index, value });
        }
    }
    let sum = csum(weights.iter().copied());
    if (sum - 1.0).abs() > TOL_MASS {
        return Err(Error::MassMismatch {
            field,
            sum,
            tol: TOL_MASS,
        });
    }
    Ok(())
}

pub(crate) fn is_uniform(weights: &[f64]) -> bool {
    let u = 1.0 / weights.len() as f64;
    weights.iter().all(|w| (w - u).abs() <= TOL_MASS)
}

/// A finite measure network: points with full-support probability weights and a
/// real-valued network function `omega`, stored as a dense square table.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureNetwork {
    labels: Option<Vec<String>>,
    weights: Vec<f64>,
    omega: DMatrix<f64>,
}

impl MeasureNetwork {
    pub fn new(weights: Vec<f64>, omega: DMatrix<f64>) -> Result<Self> {
        check_weights("weights", &weights)?;
        let n = weights.len();
        if omega.nrows() != n {
            return Err(Error::Shape {
                what: "omega rows",
                expected: n,
                found: omega.nrows(),
            });
        }
        if omega.ncols() != n {
            return Err(Error::Shape {
                what: "omega columns",
                expected: n,
                found: omega.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if !omega[(i, j)].is_finite() {
                    return Err(Error::NonFinite {
                        field: "omega",
                        row: i,
                        col: j,
                    });
                }
            }
        }
        Ok(Self {
            labels: None,
            weights,
            omega,
        })
    }

    /// Builds a network from row-major nested rows.
    pub fn from_rows(weights: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = weights.len();
        if rows.len() != n {
            return Err(Error::Shape {
                what: "omega rows",
                expected: n,
                found: rows.len(),
            });
        }
        for row in rows {
            if row.len() != n {
                return Err(Error::Shape {
                    what: "omega columns",
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::new(weights, DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Network with uniform weights.
    pub fn uniform(omega: DMatrix<f64>) -> Result<Self> {
        let n = omega.nrows();
        if n == 0 {
            return Err(Error::Empty("omega"));
        }
        Self::new(vec![1.0 / n as f64; n], omega)
    }

    /// The one-point space `*`.
    pub fn one_point() -> Self {
        Self {
            labels: None,
            weights: vec![1.0],
            omega: DMatrix::zeros(1, 1),
        }
    }

    /// The discrete simplex `Δₙ`: uniform weights, `ω(i, j) = 1 − δᵢⱼ`.
    pub fn simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("simplex"));
        }
        Self::uniform(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 }))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Shape {
                what: "labels",
                expected: self.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn is_uniform(&self) -> bool {
        is_uniform(&self.weights)
    }

    /// Relabels points so that new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::Shape {
                what: "permutation",
                expected: n,
                found: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Parameter(format!("{perm:?} is not a permutation")));
            }
        }
        let weights = perm.iter().map(|&p| self.weights[p]).collect();
        let omega = DMatrix::from_fn(n, n, |i, j| self.omega[(perm[i], perm[j])]);
        let labels = self
            .labels
            .as_ref()
            .map(|l| perm.iter().map(|&p| l[p].clone()).collect());
        Ok(Self { labels, weights, omega })
    }
}

/// Outcome of [`validate_network`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricFlag {
    pub is_metric: bool,
    /// Metric axioms with zero off-diagonal distances allowed.
    pub is_pseudometric: bool,
    /// Largest violation of symmetry, zero diagonal, nonnegativity or a triangle inequality.
    pub max_violation: f64,
}

/// Scans `omega` for the metric axioms.
pub fn validate_network(net: &MeasureNetwork) -> MetricFlag {
    let d = net.omega();
    let n = net.len();
    let mut violation: f64 = 0.0;
    let mut separated = true;
    for i in 0..n {
        violation = violation.max(d[(i, i)].abs());
        for j in 0..n {
            if i == j {
                continue;
            }
            violation = violation.max((d[(i, j)] - d[(j, i)]).abs());
            violation = violation.max(-d[(i, j)]);
            if d[(i, j)] <= TOL_METRIC {
                separated = false;
            }
            for k in 0..n {
                violation = violation.max(d[(i, j)] - d[(i, k)] - d[(k, j)]);
            }
        }
    }
    let is_pseudometric = violation <= TOL_METRIC;
    MetricFlag {
        is_metric: is_pseudometric && separated,
        is_pseudometric,
        max_violation: violation,
    }
}

pub(crate) fn require_metric(net: &MeasureNetwork) -> Result<()> {
    let flag = validate_network(net);
    if flag.is_metric {
        Ok(())
    } else {
        Err(Error::NotMetric {
            violation: flag.max_violation,
        })
    }
}
