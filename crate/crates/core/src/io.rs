//! JSON file formats for networks, couplings, maps, clouds, isometries,
//! graphs and solver reports.
//!
//! Parse errors carry the line and column from the JSON reader; validation
//! errors name the offending field.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coupling::{Coupling, MongeMap};
use crate::error::{Error, Result};
use crate::euclidean::{EuclideanCloud, Isometry};
use crate::graphs::Graph;
use crate::solvers::{SolveReport, Witness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub weights: Vec<f64>,
    pub omega: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingFile {
    pub table: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudFile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    /// Uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryFile {
    pub rotation: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn parse<'a, T: Deserialize<'a>>(what: &'static str, text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format {
        what,
        detail: e.to_string(),
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn table(what: &'static str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != ncols) {
        return Err(Error::Format {
            what,
            detail: format!("row {r} has {} entries, expected {ncols}", row.len()),
        });
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn parse_network(text: &str) -> Result<crate::MeasureNetwork> {
    let file: NetworkFile = parse("network", text)?;
    let net = crate::MeasureNetwork::from_rows(file.weights, &file.omega)?;
    match file.labels {
        Some(labels) => net.with_labels(labels),
        None => Ok(net),
    }
}

pub fn network_file(net: &crate::MeasureNetwork) -> NetworkFile {
    NetworkFile {
        weights: net.weights().to_vec(),
        omega: rows_of(net.omega()),
        labels: net.labels().map(<[String]>::to_vec),
    }
}

pub fn network_json(net: &crate::MeasureNetwork) -> String {
    pretty(&network_file(net))
}

/// Reads a coupling table and checks it against the two weight vectors.
pub fn parse_coupling(text: &str, source_weights: &[f64], target_weights: &[f64]) -> Result<Coupling> {
    let file: CouplingFile = parse("coupling", text)?;
    Coupling::new(
        table("coupling table", &file.table)?,
        source_weights.to_vec(),
        target_weights.to_vec(),
    )
}

pub fn coupling_json(pi: &Coupling) -> String {
    pretty(&CouplingFile {
        table: rows_of(pi.table()),
    })
}

pub fn parse_map(text: &str, source_weights: &[f64], target_weights: &[f64]) -> Result<MongeMap> {
    let file: MapFile = parse("map", text)?;
    MongeMap::new(file.assignment, source_weights, target_weights)
}

pub fn map_json(phi: &MongeMap) -> String {
    pretty(&MapFile {
        assignment: phi.assignment().to_vec(),
    })
}

pub fn parse_cloud(text: &str) -> Result<EuclideanCloud> {
    let file: CloudFile = parse("cloud", text)?;
    let n = file.points.len();
    if n == 0 {
        return Err(Error::Empty("points"));
    }
    let weights = file.weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);
    EuclideanCloud::from_rows(file.dim, &file.points, weights)
}

pub fn cloud_json(cloud: &EuclideanCloud) -> String {
    pretty(&CloudFile {
        dim: cloud.dim(),
        points: cloud
            .points()
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect(),
        weights: Some(cloud.weights().to_vec()),
    })
}

pub fn parse_isometry(text: &str) -> Result<Isometry> {
    let file: IsometryFile = parse("isometry", text)?;
    Isometry::new(table("rotation", &file.rotation)?, DVector::from_vec(file.translation))
}

fn isometry_file(t: &Isometry) -> IsometryFile {
    IsometryFile {
        rotation: rows_of(&t.rotation),
        translation: t.translation.iter().copied().collect(),
    }
}

pub fn isometry_json(t: &Isometry) -> String {
    pretty(&isometry_file(t))
}

/// Reads a graph as JSON (`{"n", "edges", "weights"}`) or, when the text
/// does not start with `{`, as an edge list.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if !text.trim_start().starts_with('{') {
        return Graph::parse_edge_list(text, None);
    }
    let file: GraphFile = parse("graph", text)?;
    Graph::new(file.n, file.edges.iter().map(|e| (e[0], e[1])).collect(), file.weights)
}

pub fn graph_json(g: &Graph) -> String {
    pretty(&GraphFile {
        n: g.len(),
        edges: g.edges().iter().map(|&(i, j)| [i, j]).collect(),
        weights: g.weights().map(<[f64]>::to_vec),
    })
}

/// JSON form of a report. Infinite values are written as the string `"inf"`.
pub fn report_value(report: &SolveReport) -> Value {
    let witness = match &report.witness {
        Witness::Coupling(pi) => json!({ "table": rows_of(pi.table()) }),
        Witness::Map(phi) => json!({ "assignment": phi.assignment() }),
        Witness::Registration { map, isometry } => json!({
            "assignment": map.assignment(),
            "isometry": isometry_file(isometry),
        }),
        Witness::None => Value::Null,
    };
    let mut v = json!({
        "value": report.value,
        "method": report.method,
        "iterations": report.iterations,
        "converged": report.converged,
        "witness": witness,
        "warnings": report.warnings,
    });
    if let Some(eps) = report.support_eps {
        v["support_eps"] = json!(eps);
    }
    v
}

pub fn report_json(report: &SolveReport) -> String {
    pretty(&report_value(report))
}
