//! Backtracking enumeration of measure-preserving maps.
//!
//! Weights that are ratios of small integers are compared exactly on a common
//! denominator; anything else falls back to [`TOL_MASS`] comparisons.

use num_integer::Integer;

use crate::coupling::MongeMap;
use crate::network::is_uniform;
use crate::tol::TOL_MASS;

const MAX_DENOMINATOR: i128 = 1_000_000;
const MAX_COMMON_DENOMINATOR: i128 = 1 << 62;

/// Best rational approximation with denominator at most [`MAX_DENOMINATOR`],
/// accepted only if it reproduces `x` to rounding error.
fn rationalize(x: f64) -> Option<(i128, i128)> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > MAX_DENOMINATOR {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 4.0 * f64::EPSILON * x {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn integer_units(source: &[f64], target: &[f64]) -> Option<(Vec<i128>, Vec<i128>)> {
    let fracs: Vec<(i128, i128)> = source
        .iter()
        .chain(target)
        .map(|&w| rationalize(w))
        .collect::<Option<_>>()?;
    let mut common = 1i128;
    for &(_, den) in &fracs {
        common = common.lcm(&den);
        if common > MAX_COMMON_DENOMINATOR {
            return None;
        }
    }
    let units: Vec<i128> = fracs.iter().map(|&(num, den)| num * (common / den)).collect();
    let (src, tgt) = units.split_at(source.len());
    if src.iter().sum::<i128>() != common || tgt.iter().sum::<i128>() != common {
        return None;
    }
    Some((src.to_vec(), tgt.to_vec()))
}

/// Remaining target capacity during the search.
#[derive(Debug, Clone)]
pub(crate) enum Fibers {
    Exact {
        units: Vec<i128>,
        capacity: Vec<i128>,
        /// `min(units[i..])`
        suffix_min: Vec<i128>,
    },
    Float {
        weights: Vec<f64>,
        capacity: Vec<f64>,
        suffix_min: Vec<f64>,
    },
}

fn suffix_min<T: Copy + PartialOrd>(xs: &[T], top: T) -> Vec<T> {
    let mut out = vec![top; xs.len() + 1];
    for i in (0..xs.len()).rev() {
        out[i] = if xs[i] < out[i + 1] { xs[i] } else { out[i + 1] };
    }
    out
}

impl Fibers {
    pub(crate) fn new(source: &[f64], target: &[f64]) -> Self {
        match integer_units(source, target) {
            Some((units, capacity)) => Fibers::Exact {
                suffix_min: suffix_min(&units, i128::MAX),
                units,
                capacity,
            },
            None => Fibers::Float {
                suffix_min: suffix_min(source, f64::INFINITY),
                weights: source.to_vec(),
                capacity: target.to_vec(),
            },
        }
    }

    pub(crate) fn is_exact(&self) -> bool {
        matches!(self, Fibers::Exact { .. })
    }

    pub(crate) fn fits(&self, i: usize, j: usize) -> bool {
        match self {
            Fibers::Exact { units, capacity, .. } => capacity[j] >= units[i],
            Fibers::Float { weights, capacity, .. } => capacity[j] >= weights[i] - TOL_MASS,
        }
    }

    pub(crate) fn take(&mut self, i: usize, j: usize) {
        match self {
            Fibers::Exact { units, capacity, .. } => capacity[j] -= units[i],
            Fibers::Float { weights, capacity, .. } => capacity[j] -= weights[i],
        }
    }

    pub(crate) fn restore(&mut self, i: usize, j: usize) {
        match self {
            Fibers::Exact { units, capacity, .. } => capacity[j] += units[i],
            Fibers::Float { weights, capacity, .. } => capacity[j] += weights[i],
        }
    }

    /// True when some partly filled target can no longer be completed by
    /// sources `next..`.
    pub(crate) fn dead(&self, next: usize) -> bool {
        match self {
            Fibers::Exact {
                capacity, suffix_min, ..
            } => capacity.iter().any(|&c| c > 0 && c < suffix_min[next]),
            Fibers::Float {
                capacity, suffix_min, ..
            } => capacity
                .iter()
                .any(|&c| c > TOL_MASS && c < suffix_min[next] - TOL_MASS),
        }
    }

    pub(crate) fn complete(&self) -> bool {
        match self {
            Fibers::Exact { capacity, .. } => capacity.iter().all(|&c| c == 0),
            Fibers::Float { capacity, .. } => capacity.iter().all(|c| c.abs() <= TOL_MASS),
        }
    }
}

/// Lazy stream of every measure-preserving map, in lexicographic order of assignments.
#[derive(Debug, Clone)]
pub struct MongeMaps {
    fibers: Fibers,
    n: usize,
    m: usize,
    chosen: Vec<usize>,
    cursor: usize,
    finished: bool,
}

/// Enumerates all maps `φ` with `φ_# source = target`. An empty stream means
/// no such map exists.
pub fn enumerate_monge_maps(source: &[f64], target: &[f64]) -> MongeMaps {
    MongeMaps {
        fibers: Fibers::new(source, target),
        n: source.len(),
        m: target.len(),
        chosen: Vec::with_capacity(source.len()),
        cursor: 0,
        finished: source.is_empty() || target.is_empty(),
    }
}

impl MongeMaps {
    /// Whether weights were matched in exact integer arithmetic.
    pub fn is_exact(&self) -> bool {
        self.fibers.is_exact()
    }

    fn backtrack(&mut self) {
        match self.chosen.pop() {
            Some(j) => {
                self.fibers.restore(self.chosen.len(), j);
                self.cursor = j + 1;
            }
            None => self.finished = true,
        }
    }
}

impl Iterator for MongeMaps {
    type Item = MongeMap;

    fn next(&mut self) -> Option<MongeMap> {
        while !self.finished {
            let depth = self.chosen.len();
            if depth == self.n {
                let found = self.fibers.complete().then(|| self.chosen.clone());
                self.backtrack();
                if let Some(a) = found {
                    return Some(MongeMap::from_parts_unchecked(a, self.m));
                }
                continue;
            }
            let next = (self.cursor..self.m).find(|&j| self.fibers.fits(depth, j));
            match next {
                Some(j) => {
                    self.fibers.take(depth, j);
                    self.chosen.push(j);
                    self.cursor = 0;
                    if self.fibers.dead(depth + 1) {
                        self.backtrack();
                    }
                }
                None => self.backtrack(),
            }
        }
        None
    }
}

/// Number of measure-preserving maps, counting at most `limit`.
pub fn count_monge_maps(source: &[f64], target: &[f64], limit: u64) -> u64 {
    if is_uniform(source) && is_uniform(target) {
        let (n, m) = (source.len() as u64, target.len() as u64);
        if n % m != 0 {
            return 0;
        }
        return multinomial_uniform(n, n / m, limit);
    }
    enumerate_monge_maps(source, target).take(limit as usize).count() as u64
}

/// `n! / (k!)^(n/k)`, saturating at `limit`.
fn multinomial_uniform(n: u64, k: u64, limit: u64) -> u64 {
    // product over blocks of C(remaining, k)
    let mut total: u128 = 1;
    let mut remaining = n;
    while remaining > 0 {
        let mut c: u128 = 1;
        for t in 0..k {
            c = c * (remaining - t) as u128 / (t + 1) as u128;
        }
        total = total.saturating_mul(c);
        if total > limit as u128 {
            return limit;
        }
        remaining -= k;
    }
    total as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::check_measure_preserving;

    #[test]
    fn rationalizes_common_weights() {
        assert_eq!(rationalize(0.25), Some((1, 4)));
        assert_eq!(rationalize(1.0 / 3.0), Some((1, 3)));
        assert_eq!(rationalize(0.1), Some((1, 10)));
        assert_eq!(rationalize(1.0), Some((1, 1)));
        assert_eq!(rationalize(std::f64::consts::PI / 10.0), None);
    }

    #[test]
    fn three_to_two_is_empty() {
        let maps: Vec<_> = enumerate_monge_maps(&[1.0 / 3.0; 3], &[0.5; 2]).collect();
        assert!(maps.is_empty());
        assert_eq!(count_monge_maps(&[1.0 / 3.0; 3], &[0.5; 2], 100), 0);
    }

    #[test]
    fn bijections_of_equal_uniform_sets() {
        for (n, fact) in [(1, 1), (3, 6), (4, 24), (5, 120)] {
            let w = vec![1.0 / n as f64; n];
            let maps: Vec<_> = enumerate_monge_maps(&w, &w).collect();
            assert_eq!(maps.len(), fact);
            assert!(enumerate_monge_maps(&w, &w).is_exact());
            assert_eq!(count_monge_maps(&w, &w, u64::MAX), fact as u64);
        }
    }

    #[test]
    fn two_to_one_counts() {
        // 6! / (2!)^3 = 90
        let maps = enumerate_monge_maps(&[1.0 / 6.0; 6], &[1.0 / 3.0; 3]).count();
        assert_eq!(maps, 90);
        assert_eq!(count_monge_maps(&[1.0 / 6.0; 6], &[1.0 / 3.0; 3], u64::MAX), 90);
        assert_eq!(count_monge_maps(&[1.0 / 6.0; 6], &[1.0 / 3.0; 3], 10), 10);
    }

    #[test]
    fn unequal_weights_have_two_maps() {
        let src = [0.5, 0.25, 0.25];
        let tgt = [0.25, 0.25, 0.5];
        let maps: Vec<Vec<usize>> = enumerate_monge_maps(&src, &tgt)
            .map(|m| m.assignment().to_vec())
            .collect();
        assert_eq!(maps, vec![vec![2, 0, 1], vec![2, 1, 0]]);
        assert_eq!(count_monge_maps(&src, &tgt, 100), 2);
    }

    #[test]
    fn float_fallback_agrees() {
        let a = std::f64::consts::FRAC_1_PI;
        let src = [a, a, 1.0 - 2.0 * a];
        let tgt = [2.0 * a, 1.0 - 2.0 * a];
        let it = enumerate_monge_maps(&src, &tgt);
        assert!(!it.is_exact());
        let maps: Vec<_> = it.collect();
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].assignment(), &[0, 0, 1]);
    }

    #[test]
    fn one_point_targets() {
        let maps: Vec<_> = enumerate_monge_maps(&[0.2, 0.3, 0.5], &[1.0]).collect();
        assert_eq!(maps.len(), 1);
        assert!(enumerate_monge_maps(&[1.0], &[0.5, 0.5]).next().is_none());
    }

    /// Brute force over all `m^n` functions.
    fn all_functions(src: &[f64], tgt: &[f64]) -> Vec<Vec<usize>> {
        let (n, m) = (src.len(), tgt.len());
        let mut out = Vec::new();
        let total = m.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut a = vec![0; n];
            for slot in a.iter_mut().rev() {
                *slot = c % m;
                c /= m;
            }
            if check_measure_preserving(&a, src, tgt).is_ok() {
                out.push(a);
            }
        }
        out
    }

    #[test]
    fn matches_brute_force_on_mixed_weights() {
        let cases: [(&[f64], &[f64]); 4] = [
            (&[0.125, 0.125, 0.25, 0.5], &[0.25, 0.75]),
            (&[0.2, 0.2, 0.2, 0.4], &[0.4, 0.2, 0.4]),
            (&[0.1, 0.2, 0.3, 0.4], &[0.5, 0.5]),
            (&[1.0 / 6.0; 6], &[1.0 / 3.0, 2.0 / 3.0]),
        ];
        for (src, tgt) in cases {
            let ours: Vec<Vec<usize>> = enumerate_monge_maps(src, tgt)
                .map(|m| m.assignment().to_vec())
                .collect();
            assert_eq!(ours, all_functions(src, tgt), "{src:?} -> {tgt:?}");
        }
    }
}
