use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use gromon::io::{cloud_json, graph_json, network_json};
use gromon::random::{
    random_cloud, random_coupling, random_graph, random_metric_network, random_permutation, random_spd_network,
    random_weights,
};
use gromon::solvers::DEFAULT_CAP;
use gromon::{
    cloud_to_network, coupling_from_map, distortion_map, distortion_p, gm_em_infinity, gm_exact, gw_frank_wolfe,
    gw_spd_vertex_ascent, heat_kernel_network, m_iso, mass_split_from_coupling, simplex_point_embedding_value, size_p,
    Coupling, Distance, Exponent, FrankWolfeOptions, Graph, Isometry, MeasureNetwork, MisoOptions,
};
use nalgebra::{dmatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{brute_gm, brute_permutation_min, map_table, naive_distortion};
use super::{Checker, Criterion};

pub static CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        title: "simplex family GM_p(Δ2n, Δn)",
        budget: Some(Duration::from_secs(1)),
        check: simplex_family,
    },
    Criterion {
        id: 2,
        title: "p-size identity",
        budget: None,
        check: p_size_identity,
    },
    Criterion {
        id: 3,
        title: "one point vs Δ2",
        budget: None,
        check: one_point_vs_two,
    },
    Criterion {
        id: 4,
        title: "weak isomorphism gap",
        budget: None,
        check: weak_iso_gap,
    },
    Criterion {
        id: 5,
        title: "SPD vertex optimality",
        budget: Some(Duration::from_secs(120)),
        check: spd_vertex_optimality,
    },
    Criterion {
        id: 6,
        title: "mass splitting identity",
        budget: None,
        check: mass_splitting,
    },
    Criterion {
        id: 7,
        title: "embedding values",
        budget: None,
        check: embedding_values,
    },
    Criterion {
        id: 8,
        title: "sandwich bound",
        budget: None,
        check: sandwich,
    },
    Criterion {
        id: 9,
        title: "heat kernel",
        budget: None,
        check: heat_kernel,
    },
    Criterion {
        id: 10,
        title: "structural invariants",
        budget: None,
        check: structural,
    },
];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn finite(d: Distance) -> f64 {
    d.finite().unwrap_or(f64::INFINITY)
}

fn simplex_family(c: &mut Checker) {
    for n in 1..=4usize {
        for p in [1.0, 2.0] {
            let big = MeasureNetwork::simplex(2 * n).unwrap();
            let small = MeasureNetwork::simplex(n).unwrap();
            match gm_exact(&big, &small, Exponent::Finite(p), DEFAULT_CAP) {
                Ok(r) => c.close(
                    || format!("n={n} p={p}"),
                    finite(r.value),
                    (2.0 * n as f64).powf(-1.0 / p),
                    1e-9,
                ),
                Err(e) => c.fail(format!("n={n} p={p}: {e}")),
            }
        }
    }
}

fn p_size_identity(c: &mut Checker) {
    let point = MeasureNetwork::one_point();
    for n in 2..=10usize {
        let d = MeasureNetwork::simplex(n).unwrap();
        for p in [1.0, 2.0] {
            let want = (1.0 - 1.0 / n as f64).powf(1.0 / p);
            c.close(
                || format!("size n={n} p={p}"),
                size_p(&d, Exponent::Finite(p)),
                want,
                1e-12,
            );
            match gm_exact(&d, &point, Exponent::Finite(p), DEFAULT_CAP) {
                Ok(r) => c.close(|| format!("GM n={n} p={p}"), finite(r.value), want, 1e-12),
                Err(e) => c.fail(format!("GM n={n} p={p}: {e}")),
            }
        }
    }
}

fn one_point_vs_two(c: &mut Checker) {
    let x = MeasureNetwork::one_point();
    let y = MeasureNetwork::simplex(2).unwrap();
    let pi = Coupling::product(x.weights(), y.weights()).unwrap();
    let split = mass_split_from_coupling(&x, &y, &pi).unwrap();
    for p in [1.0, 2.0] {
        let e = Exponent::Finite(p);
        let want = 2f64.powf(-1.0 / p);
        c.close(
            || format!("coupling p={p}"),
            distortion_p(&x, &y, &pi, e).unwrap(),
            want,
            1e-12,
        );
        c.close(
            || format!("oracle p={p}"),
            naive_distortion(&x, &y, pi.table(), Some(p)),
            want,
            1e-12,
        );
        match gm_exact(&x, &y, e, DEFAULT_CAP) {
            Ok(r) => c.holds(
                || format!("GM p={p} should be infinite, got {}", r.value),
                r.value.is_infinite(),
            ),
            Err(err) => c.fail(format!("GM p={p}: {err}")),
        }
        let split_value = distortion_map(&split.network, &y, &split.phi, e).unwrap();
        c.close(|| format!("split p={p}"), split_value, want, 1e-12);
    }
}

/// Two networks that are weakly isomorphic but admit no zero-distortion map.
pub fn weak_iso_pair() -> (MeasureNetwork, MeasureNetwork, Coupling) {
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
    (x, y, pi)
}

fn weak_iso_gap(c: &mut Checker) {
    let (x, y, pi) = weak_iso_pair();
    let oracle = brute_gm(&x, &y, Some(2.0));
    c.close(|| "oracle".into(), oracle.unwrap_or(f64::NAN), 0.5f64.sqrt(), 1e-12);
    let gm = finite(gm_exact(&x, &y, Exponent::TWO, DEFAULT_CAP).unwrap().value);
    c.close(|| "GM_2".into(), gm, oracle.unwrap_or(f64::NAN), 1e-9);
    for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
        c.close(
            || format!("coupling {p}"),
            distortion_p(&x, &y, &pi, p).unwrap(),
            0.0,
            1e-12,
        );
    }
    c.holds(|| "GW < GM".into(), gm > 0.0);
}

fn spd_vertex_optimality(c: &mut Checker) {
    for n in 3..=7usize {
        for s in 0..50u64 {
            let seed = 10_000 * n as u64 + s;
            let mut r = rng(seed);
            let x = random_spd_network(n, &mut r).unwrap();
            let y = random_spd_network(n, &mut r).unwrap();
            let best = brute_permutation_min(&x, &y);
            match gw_spd_vertex_ascent(&x, &y, 20, seed) {
                Ok(report) => c.close(|| format!("n={n} seed={seed}"), finite(report.value), best, 1e-8),
                Err(e) => c.fail(format!("n={n} seed={seed}: {e}")),
            }
            let mut worst_gap = f64::INFINITY;
            for _ in 0..1000 {
                let pi = random_coupling(x.weights(), y.weights(), &mut r).unwrap();
                worst_gap = worst_gap.min(distortion_p(&x, &y, &pi, Exponent::TWO).unwrap() - best);
            }
            c.at_most(|| format!("couplings n={n} seed={seed}"), -worst_gap, 0.0, 1e-9);
        }
    }
}

fn mass_splitting(c: &mut Checker) {
    let mut r = rng(6);
    for trial in 0..100 {
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=8));
        let x = MeasureNetwork::new(
            random_weights(n, &mut r),
            random_metric_network(n, &mut r).unwrap().omega().clone(),
        )
        .unwrap();
        let y = MeasureNetwork::new(
            random_weights(m, &mut r),
            random_metric_network(m, &mut r).unwrap().omega().clone(),
        )
        .unwrap();
        let pi = random_coupling(x.weights(), y.weights(), &mut r).unwrap();
        let split = match mass_split_from_coupling(&x, &y, &pi) {
            Ok(s) => s,
            Err(e) => {
                c.fail(format!("trial {trial}: {e}"));
                continue;
            }
        };
        let phi_table = map_table(split.phi.assignment(), split.network.weights(), m);
        for p in [Some(1.0), Some(2.0), None] {
            let want = naive_distortion(&x, &y, pi.table(), p);
            let got = naive_distortion(&split.network, &y, &phi_table, p);
            c.close(|| format!("trial {trial} p={p:?}"), got, want, 1e-10);
        }
    }
}

fn embedding_values(c: &mut Checker) {
    for n in 2..=8usize {
        for p in [Exponent::ONE, Exponent::TWO] {
            match simplex_point_embedding_value(n, p) {
                Ok(v) => {
                    c.close(|| format!("closed form n={n} p={p}"), v.closed_form, 0.5, 0.0);
                    c.close(|| format!("numerical n={n} p={p}"), v.numerical, v.closed_form, 1e-6);
                    c.holds(|| format!("(½,…,½) infeasible n={n}"), v.half_feasible);
                }
                Err(e) => c.fail(format!("n={n} p={p}: {e}")),
            }
        }
        let em = gm_em_infinity(
            &MeasureNetwork::simplex(n).unwrap(),
            &MeasureNetwork::one_point(),
            DEFAULT_CAP,
        );
        c.close(
            || format!("GM^em_inf n={n}"),
            em.map(finite).unwrap_or(f64::NAN),
            0.5,
            1e-12,
        );
    }
}

fn sandwich(c: &mut Checker) {
    let mut r = rng(8);
    for trial in 0..100 {
        let n = r.random_range(1..=8);
        let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
        let m = divisors[r.random_range(0..divisors.len())];
        let dim = r.random_range(1..=3);
        let x = random_cloud(n, dim, &mut r).unwrap();
        let y = random_cloud(m, dim, &mut r).unwrap();
        let (nx, ny) = (
            cloud_to_network(&x, false).unwrap(),
            cloud_to_network(&y, false).unwrap(),
        );
        let opts = MisoOptions {
            restarts: 20,
            seed: trial,
            ..Default::default()
        };
        for p in [Exponent::ONE, Exponent::TWO] {
            let gm = finite(gm_exact(&nx, &ny, p, DEFAULT_CAP).unwrap().value);
            let miso = finite(m_iso(&x, &y, p, opts).unwrap().value);
            c.at_most(|| format!("trial {trial} {p}: ½GM vs M^iso"), 0.5 * gm, miso, 1e-6);
        }
        let t0 = Isometry::random(dim, &mut r);
        let copy = x
            .transformed(&t0)
            .unwrap()
            .permuted(&random_permutation(n, &mut r))
            .unwrap();
        let zero = finite(m_iso(&x, &copy, Exponent::TWO, opts).unwrap().value);
        c.at_most(|| format!("trial {trial}: congruent copy"), zero, 0.0, 1e-6);
    }
}

fn heat_kernel(c: &mut Checker) {
    let edge = Graph::unweighted(2, vec![(0, 1)]).unwrap();
    for t in [0.5f64, 1.0, 2.0] {
        let e = (-2.0 * t).exp();
        let want = dmatrix![1.0 + e, 1.0 - e; 1.0 - e, 1.0 + e] * 0.5;
        let got = heat_kernel_network(&edge, t).unwrap();
        c.close(|| format!("single edge t={t}"), (got.omega() - want).amax(), 0.0, 1e-12);
    }
    let mut r = rng(9);
    for trial in 0..30u64 {
        let n = r.random_range(1..=8);
        let prob = r.random_range(0.1..0.9);
        let g = random_graph(n, prob, &mut r).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let h = heat_kernel_network(&g, t).unwrap();
            let min_eig = SymmetricEigen::new(h.omega().clone()).eigenvalues.min();
            c.holds(|| format!("graph {trial} t={t}: eigenvalue {min_eig}"), min_eig > 0.0);
        }
        let perm = random_permutation(n, &mut r);
        let a = heat_kernel_network(&g, 1.0).unwrap();
        let b = heat_kernel_network(&g.relabeled(&perm).unwrap(), 1.0).unwrap();
        match gw_spd_vertex_ascent(&a, &b, 50, trial) {
            Ok(report) => c.close(|| format!("relabeled graph {trial}"), finite(report.value), 0.0, 1e-9),
            Err(e) => c.fail(format!("relabeled graph {trial}: {e}")),
        }
    }
}

fn structural(c: &mut Checker) {
    let mut r = rng(10);
    for trial in 0..60 {
        let n = r.random_range(1..=6);
        let m = r.random_range(1..=4);
        let x = random_metric_network(n, &mut r).unwrap();
        let y = random_spd_network(m, &mut r).unwrap();
        let gm = gm_exact(&x, &y, Exponent::TWO, DEFAULT_CAP).unwrap();
        let Some(phi) = gm.map() else { continue };
        let init = coupling_from_map(phi, x.weights(), y.weights()).unwrap();
        let gw = gw_frank_wolfe(&x, &y, Some(&init), FrankWolfeOptions::default()).unwrap();
        c.at_most(
            || format!("GW <= GM trial {trial}"),
            finite(gw.value),
            finite(gm.value),
            1e-8,
        );
    }
    for trial in 0..40 {
        let n = r.random_range(1..=6);
        let nets: Vec<_> = (0..3).map(|_| random_metric_network(n, &mut r).unwrap()).collect();
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
            let d = |a: usize, b: usize| finite(gm_exact(&nets[a], &nets[b], p, DEFAULT_CAP).unwrap().value);
            c.at_most(
                || format!("triangle trial {trial} {p}"),
                d(0, 2),
                d(0, 1) + d(1, 2),
                1e-9,
            );
        }
    }
    match cli_determinism() {
        Ok(runs) => c.holds(|| "CLI determinism".into(), runs > 0),
        Err(e) => c.fail(format!("CLI determinism: {e}")),
    }
}

/// Runs each command twice (and once more with several threads) and requires
/// byte-identical output. Returns the number of commands compared.
fn cli_determinism() -> Result<usize, String> {
    let dir = std::env::temp_dir().join(format!("gromon-suite-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let result = determinism_in(&dir);
    let _ = fs::remove_dir_all(&dir);
    result
}

fn determinism_in(dir: &std::path::Path) -> Result<usize, String> {
    let mut r = rng(11);
    let file = |name: &str, body: String| -> Result<String, String> {
        let path: PathBuf = dir.join(name);
        fs::write(&path, body).map_err(|e| e.to_string())?;
        Ok(path.to_string_lossy().into_owned())
    };
    let a = file("a.json", network_json(&random_spd_network(6, &mut r).unwrap()))?;
    let b = file("b.json", network_json(&random_spd_network(6, &mut r).unwrap()))?;
    let m = file("m.json", network_json(&random_metric_network(3, &mut r).unwrap()))?;
    let ca = file("ca.json", cloud_json(&random_cloud(8, 2, &mut r).unwrap()))?;
    let cb = file("cb.json", cloud_json(&random_cloud(8, 2, &mut r).unwrap()))?;
    let g = file("g.json", graph_json(&random_graph(7, 0.4, &mut r).unwrap()))?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["gm", "--p", "1", &a, &m],
        vec!["gw", &a, &b],
        vec!["spd", "--seed", "5", &a, &b],
        vec!["miso", "--seed", "5", &ca, &cb],
        vec!["heat", "--t", "0.5", &g],
        vec!["rand", "metric", "--n", "6", "--seed", "3"],
        vec!["gm", "--format", "csv", &a, &b],
    ];
    for args in &commands {
        let once = invoke(args, 1)?;
        let twice = invoke(args, 1)?;
        let threaded = invoke(args, 3)?;
        if once != twice || once != threaded {
            return Err(format!("output of {args:?} differs between runs"));
        }
    }
    Ok(commands.len())
}

fn invoke(args: &[&str], threads: usize) -> Result<Vec<u8>, String> {
    let threads = threads.to_string();
    let head = ["gromon", "--threads", &threads];
    let argv = head.iter().chain(args).copied();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = crate::run_from_args(argv, &mut out, &mut err);
    if code != crate::EXIT_OK {
        return Err(format!(
            "{args:?} exited with {code}: {}",
            String::from_utf8_lossy(&err)
        ));
    }
    Ok(out)
}
