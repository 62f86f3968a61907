//! Deterministic graph families for tests, benchmarks and the CLI `gen`
//! command.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};
use crate::rng::SplitMix64;

pub const DEFAULT_BALANCE_TOL: f64 = 1e-10;
pub const MAX_BALANCE_SWEEPS: usize = 100_000;
const MAX_RESTARTS: usize = 1_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("pairing model failed to produce a simple graph after {0} restarts")]
    RejectionCap(usize),
    #[error("degree balancing stalled at relative deviation {deviation:e} after {sweeps} sweeps")]
    Balancing { sweeps: usize, deviation: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Cycle,
    Path,
    Complete,
    Petersen,
    RandomRegular,
    WeightedRegular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub weight_range: (f64, f64),
    pub seed: u64,
    pub balance_tol: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            d: 0,
            weight_range: (1.0, 1.0),
            seed: 0,
            balance_tol: DEFAULT_BALANCE_TOL,
        }
    }

    pub fn degree(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn weights(mut self, lo: f64, hi: f64) -> Self {
        self.weight_range = (lo, hi);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<WeightedGraph, GeneratorError> {
    match spec.family {
        Family::Cycle => cycle(spec.n),
        Family::Path => path(spec.n),
        Family::Complete => complete(spec.n),
        Family::Petersen => Ok(petersen()),
        Family::RandomRegular => random_regular(spec.n, spec.d, spec.seed),
        Family::WeightedRegular => weighted_regular(
            spec.n,
            spec.d,
            spec.weight_range,
            spec.seed,
            spec.balance_tol,
        ),
    }
}

fn unit<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> WeightedGraph {
    WeightedGraph::new(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
        .expect("generated edge lists are simple")
}

pub fn cycle(n: usize) -> Result<WeightedGraph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::Parameters(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    Ok(unit(n, (0..n).map(|i| (i, (i + 1) % n))))
}

pub fn path(n: usize) -> Result<WeightedGraph, GeneratorError> {
    if n < 1 {
        return Err(GeneratorError::Parameters("path needs n >= 1".into()));
    }
    Ok(unit(n, (1..n).map(|i| (i - 1, i))))
}

pub fn complete(n: usize) -> Result<WeightedGraph, GeneratorError> {
    if n < 1 {
        return Err(GeneratorError::Parameters(
            "complete graph needs n >= 1".into(),
        ));
    }
    Ok(unit(
        n,
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))),
    ))
}

/// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i — i+5`.
pub fn petersen() -> WeightedGraph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    unit(10, outer.chain(inner).chain(spokes))
}

/// Uniform-ish random `d`-regular simple graph from the pairing model.
///
/// Points (`d` per vertex) are matched one random pair at a time; a pair that
/// would create a loop or a repeated edge is rejected and redrawn. When no
/// admissible pair remains among the unmatched points the attempt restarts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<WeightedGraph, GeneratorError> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(GeneratorError::Parameters(format!(
            "random regular graph needs d < n and n*d even (n = {n}, d = {d})"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    for _ in 0..MAX_RESTARTS {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            return Ok(unit(n, edges));
        }
    }
    Err(GeneratorError::RejectionCap(MAX_RESTARTS))
}

fn try_pairing(n: usize, d: usize, rng: &mut SplitMix64) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
    let mut list = Vec::with_capacity(n * d / 2);
    let mut failures = 0usize;
    while !points.is_empty() {
        let i = rng.below(points.len());
        let j = rng.below(points.len());
        let (u, v) = (points[i], points[j]);
        let key = (u.min(v), u.max(v));
        if i == j || u == v || edges.contains(&key) {
            failures += 1;
            if failures > 50 + 4 * points.len() {
                if !admissible_pair_exists(&points, &edges) {
                    return None;
                }
                failures = 0;
            }
            continue;
        }
        failures = 0;
        edges.insert(key);
        list.push(key);
        let (hi, lo) = (i.max(j), i.min(j));
        points.swap_remove(hi);
        points.swap_remove(lo);
    }
    list.sort_unstable();
    Some(list)
}

fn admissible_pair_exists(points: &[usize], edges: &HashSet<(usize, usize)>) -> bool {
    let mut vertices: Vec<usize> = points.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    vertices.iter().enumerate().any(|(a, &u)| {
        vertices[a + 1..]
            .iter()
            .any(|&v| !edges.contains(&(u.min(v), u.max(v))))
    })
}

/// A random `d`-regular graph with weights drawn uniformly from `range`, then
/// rescaled until every weighted degree equals the initial mean.
///
/// Each sweep multiplies edge `uv` by `√((w̄/w_u)(w̄/w_v))`. Sweeps stop once
/// the maximum relative deviation is at most `balance_tol` and has stopped
/// improving, so the result is usually balanced to rounding level.
pub fn weighted_regular(
    n: usize,
    d: usize,
    range: (f64, f64),
    seed: u64,
    balance_tol: f64,
) -> Result<WeightedGraph, GeneratorError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(GeneratorError::Parameters(format!(
            "weight range must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let skeleton = random_regular(n, d, seed)?;
    let mut rng = SplitMix64::new(seed ^ 0xA5A5_A5A5_5A5A_5A5A);
    let mut weights: Vec<f64> = skeleton
        .edges()
        .iter()
        .map(|_| rng.uniform(lo, hi))
        .collect();
    let ends: Vec<(usize, usize)> = skeleton.edges().iter().map(|e| (e.u, e.v)).collect();
    balance(n, &ends, &mut weights, balance_tol)?;
    Ok(skeleton.reweighted(&weights)?)
}

fn degrees(n: usize, ends: &[(usize, usize)], weights: &[f64]) -> Vec<f64> {
    let mut deg = vec![0.0; n];
    for (&(u, v), &w) in ends.iter().zip(weights) {
        deg[u] += w;
        deg[v] += w;
    }
    deg
}

fn deviation(deg: &[f64], target: f64) -> f64 {
    deg.iter()
        .map(|&x| (x - target).abs() / target)
        .fold(0.0, f64::max)
}

/// Sweeps without a 1% improvement, once within tolerance, before stopping.
const STALE_SWEEPS: usize = 10;

fn balance(
    n: usize,
    ends: &[(usize, usize)],
    weights: &mut [f64],
    tol: f64,
) -> Result<(), GeneratorError> {
    let target = degrees(n, ends, weights).iter().sum::<f64>() / n as f64;
    let mut best = f64::INFINITY;
    let mut stale = 0;
    for sweep in 0..MAX_BALANCE_SWEEPS {
        let deg = degrees(n, ends, weights);
        let dev = deviation(&deg, target);
        if dev <= tol {
            if dev < best * 0.99 {
                stale = 0;
            } else {
                stale += 1;
            }
            if dev == 0.0 || stale >= STALE_SWEEPS {
                return Ok(());
            }
        } else if sweep + 1 == MAX_BALANCE_SWEEPS {
            return Err(GeneratorError::Balancing {
                sweeps: MAX_BALANCE_SWEEPS,
                deviation: dev,
            });
        }
        best = best.min(dev);
        for (w, &(u, v)) in weights.iter_mut().zip(ends) {
            *w *= ((target / deg[u]) * (target / deg[v])).sqrt();
        }
    }
    let dev = deviation(&degrees(n, ends, weights), target);
    if dev <= tol {
        Ok(())
    } else {
        Err(GeneratorError::Balancing {
            sweeps: MAX_BALANCE_SWEEPS,
            deviation: dev,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn classical_families() {
        let c6 = generate(&GeneratorSpec::new(Family::Cycle, 6)).unwrap();
        assert_eq!((c6.vertex_count(), c6.edge_count()), (6, 6));
        assert!(c6.edges().iter().all(|e| e.weight == 1.0));
        let p = petersen();
        assert_eq!(p.edge_count(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
        assert_eq!(complete(5).unwrap().edge_count(), 10);
        assert_eq!(path(4).unwrap().edge_count(), 3);
        assert!(cycle(2).is_err());
    }

    #[test]
    fn random_regular_small() {
        let g = random_regular(10, 3, 1).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!((0..10).all(|v| g.degree(v) == 3));
        assert!(random_regular(5, 3, 1).is_err());
        assert!(random_regular(4, 4, 1).is_err());
    }

    #[test]
    fn random_regular_is_bit_stable() {
        let a = random_regular(60, 5, 99).unwrap();
        let b = random_regular(60, 5, 99).unwrap();
        assert_eq!(a.to_edge_list(), b.to_edge_list());
        let c = random_regular(60, 5, 100).unwrap();
        assert_ne!(a.to_edge_list(), c.to_edge_list());
    }

    #[test]
    fn weighted_regular_balances() {
        let g = weighted_regular(100, 8, (0.5, 2.0), 7, DEFAULT_BALANCE_TOL).unwrap();
        let w = g.regularity(1e-10).expect("balanced");
        let degs = g.weighted_degrees();
        assert!(degs.iter().all(|&x| (x - w).abs() <= 1e-10 * w));
        let ws: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
        let mean = ws.iter().sum::<f64>() / ws.len() as f64;
        let var = ws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / ws.len() as f64;
        assert!(var > 1e-3);
        assert_eq!(parse_graph(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn weighted_regular_rejects_bad_range() {
        assert!(weighted_regular(10, 3, (0.0, 1.0), 1, 1e-10).is_err());
        assert!(weighted_regular(10, 3, (2.0, 1.0), 1, 1e-10).is_err());
    }
}
