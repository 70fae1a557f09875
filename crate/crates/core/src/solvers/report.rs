use std::fmt;

use serde::{Serialize, Serializer};

use crate::coupling::{Coupling, MongeMap};
use crate::euclidean::Isometry;

/// A distance value; `Infinite` marks an empty feasible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Finite(f64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Distance::Infinite)
    }

    pub fn halved(self) -> Distance {
        match self {
            Distance::Finite(v) => Distance::Finite(0.5 * v),
            Distance::Infinite => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => write!(f, "{v}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(v) => serializer.serialize_f64(*v),
            Distance::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    FrankWolfe,
    VertexAscent,
    AlternatingProcrustes,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Enumeration => "enumeration",
            Method::FrankWolfe => "frank_wolfe",
            Method::VertexAscent => "vertex_ascent",
            Method::AlternatingProcrustes => "alternating_procrustes",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Coupling(Coupling),
    Map(MongeMap),
    Registration { map: MongeMap, isometry: Isometry },
    None,
}

/// Result of a solver run. `value` is the distortion (or matching cost) of `witness`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub value: Distance,
    pub witness: Witness,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
    /// Support threshold used when a sup-distortion was evaluated.
    pub support_eps: Option<f64>,
    /// Objective after each iteration, for solvers that iterate.
    pub trace: Vec<f64>,
}

impl SolveReport {
    pub(crate) fn new(value: Distance, witness: Witness, method: Method) -> Self {
        Self {
            value,
            witness,
            method,
            iterations: 0,
            converged: true,
            warnings: Vec::new(),
            support_eps: None,
            trace: Vec::new(),
        }
    }

    pub fn map(&self) -> Option<&MongeMap> {
        match &self.witness {
            Witness::Map(m) | Witness::Registration { map: m, .. } => Some(m),
            _ => None,
        }
    }

    pub fn coupling(&self) -> Option<&Coupling> {
        match &self.witness {
            Witness::Coupling(c) => Some(c),
            _ => None,
        }
    }
}
