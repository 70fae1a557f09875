use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use gromon::io::{
    cloud_json, graph_json, network_file, network_json, parse_cloud, parse_coupling, parse_graph, parse_network,
};
use gromon::random::{random_cloud, random_graph, random_metric_network, random_spd_network};
use gromon::{
    distortion_map, distortion_p, gm_exact, gw_frank_wolfe, gw_spd_vertex_ascent, heat_kernel_network, laplacian,
    m_iso, mass_split_from_coupling, EuclideanCloud, Exponent, FrankWolfeOptions, IsometryGroup, MeasureNetwork,
    MisoOptions, SolveReport,
};
use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::output::render_report;
use crate::{suite, Command, InstanceKind, RunConfig, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK};

/// Below this value of `t·λ_max` the heat kernel is resolvable in double precision.
const HEAT_RESOLVABLE: f64 = 30.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: gromon::Error },
    #[error(transparent)]
    Solver(#[from] gromon::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

/// What a command produced, collected before anything is written.
struct Outcome {
    body: String,
    notes: Vec<String>,
    code: i32,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            body,
            notes: Vec::new(),
            code: EXIT_OK,
        }
    }
}

pub(crate) fn execute(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if cfg.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let outcome = pool.install(|| dispatch(cfg))?;
    match &cfg.out {
        Some(path) => fs::write(path, &outcome.body).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => stdout.write_all(outcome.body.as_bytes())?,
    }
    for note in &outcome.notes {
        writeln!(stderr, "{note}")?;
    }
    Ok(outcome.code)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn with_path<T>(path: &Path, r: gromon::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_network(path: &Path) -> Result<MeasureNetwork, CliError> {
    with_path(path, parse_network(&read(path)?))
}

fn load_cloud(path: &Path) -> Result<EuclideanCloud, CliError> {
    with_path(path, parse_cloud(&read(path)?))
}

fn require_p2(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.p == Exponent::TWO {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{command} computes the p = 2 distance only, got --p {}",
            cfg.p
        )))
    }
}

fn report_outcome(name: &str, cfg: &RunConfig, report: &SolveReport, infeasible: impl FnOnce() -> String) -> Outcome {
    let mut outcome = Outcome::ok(render_report(name, cfg, report));
    outcome.notes = report.warnings.iter().map(|w| format!("warning: {w}")).collect();
    if report.value.is_infinite() {
        outcome.notes.push(infeasible());
        outcome.code = EXIT_INFEASIBLE;
    }
    outcome
}

fn no_map(x: &Path, n: usize, y: &Path, m: usize) -> String {
    format!(
        "no measure-preserving map from {} ({n} points) onto {} ({m} points)",
        x.display(),
        y.display()
    )
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match &cfg.command {
        Command::Gm { x: px, y: py } => {
            let (x, y) = (load_network(px)?, load_network(py)?);
            let report = gm_exact(&x, &y, cfg.p, cfg.cap)?;
            Ok(report_outcome("gm", cfg, &report, || no_map(px, x.len(), py, y.len())))
        }
        Command::Gw {
            x: px,
            y: py,
            init,
            max_iters,
        } => {
            require_p2(cfg, "gw")?;
            let (x, y) = (load_network(px)?, load_network(py)?);
            let start = match init {
                Some(path) => Some(with_path(path, parse_coupling(&read(path)?, x.weights(), y.weights()))?),
                None => None,
            };
            let opts = FrankWolfeOptions {
                max_iters: *max_iters,
                tol: cfg.tol,
            };
            let report = gw_frank_wolfe(&x, &y, start.as_ref(), opts)?;
            Ok(report_outcome("gw", cfg, &report, String::new))
        }
        Command::Spd { x: px, y: py } => {
            require_p2(cfg, "spd")?;
            let (x, y) = (load_network(px)?, load_network(py)?);
            let report = gw_spd_vertex_ascent(&x, &y, cfg.restarts, cfg.seed)?;
            Ok(report_outcome("spd", cfg, &report, String::new))
        }
        Command::Miso {
            x: px,
            y: py,
            max_alternations,
            proper,
        } => {
            let (x, y) = (load_cloud(px)?, load_cloud(py)?);
            let opts = MisoOptions {
                restarts: cfg.restarts,
                seed: cfg.seed,
                max_alternations: *max_alternations,
                group: if *proper {
                    IsometryGroup::Proper
                } else {
                    IsometryGroup::Full
                },
            };
            let report = m_iso(&x, &y, cfg.p, opts)?;
            Ok(report_outcome("miso", cfg, &report, || {
                no_map(px, x.len(), py, y.len())
            }))
        }
        Command::Heat { graph } => {
            let t = cfg
                .t
                .ok_or_else(|| CliError::Usage("heat requires --t <time>".into()))?;
            let g = with_path(graph, parse_graph(&read(graph)?))?;
            let net = heat_kernel_network(&g, t)?;
            let mut outcome = Outcome::ok(network_json(&net));
            let lmax = SymmetricEigen::new(laplacian(&g)).eigenvalues.max();
            if t * lmax > HEAT_RESOLVABLE {
                outcome.notes.push(format!(
                    "warning: t·λ_max = {:.1}; the smallest kernel eigenvalue is below double precision and the network may fail a positive definiteness check",
                    t * lmax
                ));
            }
            Ok(outcome)
        }
        Command::Split { x: px, y: py, coupling } => {
            let (x, y) = (load_network(px)?, load_network(py)?);
            let pi = with_path(coupling, parse_coupling(&read(coupling)?, x.weights(), y.weights()))?;
            let split = mass_split_from_coupling(&x, &y, &pi)?;
            let value = json!({
                "network": network_file(&split.network),
                "rho": split.rho.assignment(),
                "phi": split.phi.assignment(),
                "source_is_metric": split.source_is_metric,
                "p": cfg.p,
                "coupling_distortion": distortion_p(&x, &y, &pi, cfg.p)?,
                "split_distortion": distortion_map(&split.network, &y, &split.phi, cfg.p)?,
            });
            Ok(Outcome::ok(pretty(&value)))
        }
        Command::Rand { kind, n, dim, prob } => {
            if *n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let body = match kind {
                InstanceKind::Spd => network_json(&random_spd_network(*n, &mut rng)?),
                InstanceKind::Metric => network_json(&random_metric_network(*n, &mut rng)?),
                InstanceKind::Cloud => {
                    if *dim == 0 {
                        return Err(CliError::Usage("--dim must be at least 1".into()));
                    }
                    cloud_json(&random_cloud(*n, *dim, &mut rng)?)
                }
                InstanceKind::Graph => graph_json(&random_graph(*n, *prob, &mut rng)?),
            };
            Ok(Outcome::ok(body))
        }
        Command::Suite => {
            let results = suite::run_suite();
            let all = results.iter().all(|r| r.passed);
            let mut body = String::new();
            for r in &results {
                body.push_str(&r.line());
                body.push('\n');
            }
            body.push_str(&format!(
                "{} of {} criteria passed\n",
                results.iter().filter(|r| r.passed).count(),
                results.len()
            ));
            Ok(Outcome {
                body,
                notes: Vec::new(),
                code: if all { EXIT_OK } else { EXIT_INPUT },
            })
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}
