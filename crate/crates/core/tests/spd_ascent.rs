mod common;

use common::{brute_permutation_min, rng};
use gromon::random::{random_coupling, random_permutation, random_spd_network};
use gromon::{distortion_p, gw_spd_vertex_ascent, Exponent, Method};

#[test]
fn ascent_finds_the_best_permutation() {
    for n in 3..=6 {
        for seed in 0..10 {
            let mut r = rng(1000 * n + seed);
            let x = random_spd_network(n as usize, &mut r).unwrap();
            let y = random_spd_network(n as usize, &mut r).unwrap();
            let report = gw_spd_vertex_ascent(&x, &y, 20, seed).unwrap();
            assert_eq!(report.method, Method::VertexAscent);
            let got = report.value.finite().unwrap();
            let want = brute_permutation_min(&x, &y);
            assert!((got - want).abs() <= 1e-8, "n {n} seed {seed}: {got} vs {want}");
        }
    }
}

#[test]
fn best_permutation_beats_random_couplings() {
    let mut r = rng(77);
    for n in 3..=5 {
        let x = random_spd_network(n, &mut r).unwrap();
        let y = random_spd_network(n, &mut r).unwrap();
        let best = brute_permutation_min(&x, &y);
        for _ in 0..200 {
            let pi = random_coupling(x.weights(), y.weights(), &mut r).unwrap();
            assert!(best <= distortion_p(&x, &y, &pi, Exponent::TWO).unwrap() + 1e-9);
        }
    }
}

#[test]
fn relabeled_copy_is_at_distance_zero() {
    let mut r = rng(5);
    for n in 2..=8 {
        let x = random_spd_network(n, &mut r).unwrap();
        let y = x.permuted(&random_permutation(n, &mut r)).unwrap();
        let report = gw_spd_vertex_ascent(&x, &y, 20, 3).unwrap();
        assert!(report.value.finite().unwrap() <= 1e-7, "n {n}: {}", report.value);
    }
}
