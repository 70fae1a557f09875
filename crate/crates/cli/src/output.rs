use std::fmt::Write;

use gromon::io::report_value;
use gromon::{SolveReport, Witness};
use serde_json::json;

use crate::{Format, RunConfig};

pub(crate) fn render_report(command: &str, cfg: &RunConfig, report: &SolveReport) -> String {
    match cfg.format {
        Format::Json => {
            let mut v = report_value(report);
            v["command"] = json!(command);
            v["p"] = json!(cfg.p);
            v["seed"] = json!(cfg.seed);
            let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Csv => format!(
            "command,p,value,converged,iterations,seed\n{command},{},{},{},{},{}\n",
            cfg.p, report.value, report.converged, report.iterations, cfg.seed
        ),
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "{command} (p = {}): {}", cfg.p, report.value);
            let _ = writeln!(s, "method: {}", report.method);
            let _ = writeln!(s, "iterations: {}, converged: {}", report.iterations, report.converged);
            match &report.witness {
                Witness::Map(phi) => {
                    let _ = writeln!(s, "map: {:?}", phi.assignment());
                }
                Witness::Registration { map, isometry } => {
                    let _ = writeln!(s, "map: {:?}", map.assignment());
                    let _ = writeln!(s, "translation: {:?}", isometry.translation.as_slice());
                }
                Witness::Coupling(pi) => {
                    let _ = writeln!(s, "coupling: {} x {} table", pi.shape().0, pi.shape().1);
                }
                Witness::None => {}
            }
            s
        }
    }
}
