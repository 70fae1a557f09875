mod common;

use common::{brute_gm, map_table, naive_distortion, rng};
use gromon::random::{random_coupling, random_metric_network, random_permutation, random_spd_network, random_weights};
use gromon::solvers::DEFAULT_CAP;
use gromon::{
    coupling_from_map, distortion_map, distortion_p, enumerate_monge_maps, gm_exact, gw_frank_wolfe, pullback_network,
    size_p, validate_network, Coupling, Distance, Exponent, FrankWolfeOptions, MeasureNetwork, MongeMap,
};
use nalgebra::DMatrix;
use rand::Rng;

fn reweighted(net: MeasureNetwork, w: Vec<f64>) -> MeasureNetwork {
    MeasureNetwork::new(w, net.omega().clone()).unwrap()
}

fn exponents() -> [Exponent; 4] {
    [Exponent::ONE, Exponent::Finite(1.5), Exponent::TWO, Exponent::Infinity]
}

fn as_option(p: Exponent) -> Option<f64> {
    match p {
        Exponent::Finite(p) => Some(p),
        Exponent::Infinity => None,
    }
}

#[test]
fn coupling_distortion_matches_naive_loops() {
    let mut r = rng(1);
    for _ in 0..40 {
        let (n, m) = (r.random_range(1..6), r.random_range(1..6));
        let x = reweighted(random_spd_network(n, &mut r).unwrap(), random_weights(n, &mut r));
        let y = reweighted(random_metric_network(m, &mut r).unwrap(), random_weights(m, &mut r));
        let pi = random_coupling(x.weights(), y.weights(), &mut r).unwrap();
        for p in exponents() {
            let got = distortion_p(&x, &y, &pi, p).unwrap();
            let want = naive_distortion(&x, &y, pi.table(), as_option(p));
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{p}: {got} vs {want}");
        }
    }
}

#[test]
fn map_distortion_equals_induced_coupling_distortion() {
    let mut r = rng(2);
    for _ in 0..30 {
        let n = r.random_range(2..7);
        let m = [1, 2, 3].into_iter().filter(|d| n % d == 0).max().unwrap();
        let x = random_metric_network(n, &mut r).unwrap();
        let y = random_spd_network(m, &mut r).unwrap();
        for phi in enumerate_monge_maps(x.weights(), y.weights()).take(20) {
            let pi = coupling_from_map(&phi, x.weights(), y.weights()).unwrap();
            for p in exponents() {
                let a = distortion_map(&x, &y, &phi, p).unwrap();
                let b = distortion_p(&x, &y, &pi, p).unwrap();
                assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn distortion_is_monotone_in_p() {
    let mut r = rng(3);
    let ps = [1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 8.0];
    for _ in 0..50 {
        let (n, m) = (r.random_range(1..6), r.random_range(1..6));
        let x = reweighted(random_metric_network(n, &mut r).unwrap(), random_weights(n, &mut r));
        let y = reweighted(random_spd_network(m, &mut r).unwrap(), random_weights(m, &mut r));
        let pi = random_coupling(x.weights(), y.weights(), &mut r).unwrap();
        let mut values: Vec<f64> = ps
            .iter()
            .map(|&p| distortion_p(&x, &y, &pi, Exponent::Finite(p)).unwrap())
            .collect();
        values.push(distortion_p(&x, &y, &pi, Exponent::Infinity).unwrap());
        for w in values.windows(2) {
            assert!(w[0] <= w[1] + 1e-12, "{values:?}");
        }
    }
}

#[test]
fn size_is_distance_to_the_point() {
    let mut r = rng(4);
    let point = MeasureNetwork::one_point();
    for _ in 0..30 {
        let n = r.random_range(1..7);
        let x = reweighted(random_metric_network(n, &mut r).unwrap(), random_weights(n, &mut r));
        for p in exponents() {
            let gm = gm_exact(&x, &point, p, DEFAULT_CAP).unwrap().value.finite().unwrap();
            let pi = Coupling::product(x.weights(), &[1.0]).unwrap();
            let gw = distortion_p(&x, &point, &pi, p).unwrap();
            let s = size_p(&x, p);
            assert!((s - gm).abs() <= 1e-12 && (s - gw).abs() <= 1e-12, "{s} {gm} {gw}");
        }
    }
}

#[test]
fn gm_matches_brute_force_over_all_functions() {
    let mut r = rng(5);
    for _ in 0..40 {
        let n = r.random_range(1..7);
        let m = r.random_range(1..4);
        let x = random_metric_network(n, &mut r).unwrap();
        let y = random_spd_network(m, &mut r).unwrap();
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
            let got = gm_exact(&x, &y, p, DEFAULT_CAP).unwrap();
            match brute_gm(&x, &y, as_option(p)) {
                None => assert!(got.value.is_infinite()),
                Some(want) => {
                    let v = got.value.finite().unwrap();
                    assert!((v - want).abs() <= 1e-12, "{v} vs {want}");
                    let phi = got.map().unwrap();
                    let table = map_table(phi.assignment(), x.weights(), m);
                    assert!((naive_distortion(&x, &y, &table, as_option(p)) - v).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn distances_are_relabel_invariant() {
    let mut r = rng(6);
    for _ in 0..25 {
        let n = r.random_range(2..7);
        let m = r.random_range(1..4);
        let x = reweighted(random_metric_network(n, &mut r).unwrap(), random_weights(n, &mut r));
        let y = random_spd_network(m, &mut r).unwrap();
        let px = x.permuted(&random_permutation(n, &mut r)).unwrap();
        let py = y.permuted(&random_permutation(m, &mut r)).unwrap();
        for p in exponents() {
            let a = gm_exact(&x, &y, p, DEFAULT_CAP).unwrap().value;
            let b = gm_exact(&px, &py, p, DEFAULT_CAP).unwrap().value;
            match (a, b) {
                (Distance::Finite(a), Distance::Finite(b)) => assert!((a - b).abs() <= 1e-12),
                (a, b) => assert_eq!(a, b),
            }
        }
        let pi = random_coupling(x.weights(), y.weights(), &mut r).unwrap();
        let perm = random_permutation(n, &mut r);
        let moved = x.permuted(&perm).unwrap();
        let table = DMatrix::from_fn(n, m, |k, j| pi.table()[(perm[k], j)]);
        let moved_pi = Coupling::new(table, moved.weights().to_vec(), y.weights().to_vec()).unwrap();
        for p in exponents() {
            let a = distortion_p(&x, &y, &pi, p).unwrap();
            let b = distortion_p(&moved, &y, &moved_pi, p).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn pullbacks_are_pseudometrics_with_zero_distortion() {
    let mut r = rng(7);
    for _ in 0..30 {
        let m = r.random_range(1..5);
        let k = r.random_range(1..4);
        let y = random_metric_network(m, &mut r).unwrap();
        let n = m * k;
        let source = vec![1.0 / n as f64; n];
        let rho = MongeMap::new((0..n).map(|i| i % m).collect(), &source, y.weights()).unwrap();
        let z = pullback_network(&y, &rho, &source).unwrap();
        let flag = validate_network(&z);
        assert!(flag.is_pseudometric);
        assert_eq!(flag.is_metric, k == 1);
        for p in exponents() {
            assert!(distortion_map(&z, &y, &rho, p).unwrap() <= 1e-15);
        }
    }
}

#[test]
fn frank_wolfe_never_exceeds_monge_value() {
    let mut r = rng(8);
    for _ in 0..40 {
        let n = r.random_range(1..7);
        let m = [1, 2, 3].into_iter().filter(|d| n % d == 0).max().unwrap();
        let x = random_metric_network(n, &mut r).unwrap();
        let y = random_spd_network(m, &mut r).unwrap();
        let gm = gm_exact(&x, &y, Exponent::TWO, DEFAULT_CAP).unwrap();
        let init = coupling_from_map(gm.map().unwrap(), x.weights(), y.weights()).unwrap();
        let gw = gw_frank_wolfe(&x, &y, Some(&init), FrankWolfeOptions::default()).unwrap();
        assert!(gw.value.finite().unwrap() <= gm.value.finite().unwrap() + 1e-8);
        for w in gw.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}

#[test]
fn gm_satisfies_the_triangle_inequality() {
    let mut r = rng(9);
    for _ in 0..60 {
        let n = r.random_range(1..7);
        let nets: Vec<MeasureNetwork> = (0..3)
            .map(|_| {
                if r.random_bool(0.5) {
                    random_metric_network(n, &mut r).unwrap()
                } else {
                    random_spd_network(n, &mut r).unwrap()
                }
            })
            .collect();
        for p in exponents() {
            let d = |a: usize, b: usize| {
                gm_exact(&nets[a], &nets[b], p, DEFAULT_CAP)
                    .unwrap()
                    .value
                    .finite()
                    .unwrap()
            };
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        }
    }
}
