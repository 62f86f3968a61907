//! Markov chains on the directed edges `W₁(G)` whose transitions follow the
//! prolongation relation.
//!
//! Transition probabilities are stored sparsely, one slot per prolongation
//! pair, in the order of [`DirectedEdgeSet::prolongations`].

use thiserror::Error;

use crate::graph::{DirectedEdgeSet, DEFAULT_REGULARITY_TOL};
use crate::numeric::ksum;
use crate::rng::SplitMix64;

/// Fixed-point residual (max norm) required of a closed-form stationary law.
pub const CLOSED_FORM_TOL: f64 = 1e-12;
/// `‖πP − π‖₁` target for iteratively computed stationary laws.
pub const ITERATIVE_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 100_000;
/// Laziness applied once the power iteration stops making progress.
pub const FALLBACK_DAMPING: f64 = 0.05;
/// Window over which a non-decreasing residual counts as oscillation.
pub const OSCILLATION_WINDOW: usize = 50;
const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkovError {
    #[error("vertex {vertex} has degree {degree}; assigned chains need minimum degree 2")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("graph is not weight-regular")]
    NotRegular,
    #[error(
        "closed-form stationary distribution fails the fixed-point check (residual {residual:e})"
    )]
    FixedPointFailed { residual: f64 },
    #[error("stationary iteration did not converge in {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("row {row} sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },
    #[error("negative or non-finite transition at row {row}")]
    BadEntry { row: usize },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("chain has no stationary distribution attached")]
    MissingStationary,
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
}

/// Which construction produced a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainKind {
    /// `1/(deg(y) − 1)` on each prolongation.
    Uniform,
    /// `w_{e₂}/(w_y − w_{e₁})` on each prolongation `e₁ → e₂` through `y`.
    Weighted,
    Custom(String),
}

impl ChainKind {
    pub fn id(&self) -> &str {
        match self {
            ChainKind::Uniform => "uniform",
            ChainKind::Weighted => "weighted",
            ChainKind::Custom(name) => name,
        }
    }
}

/// A Markov chain assigned to `G`, with optional stationary distribution.
#[derive(Debug, Clone)]
pub struct ChainSpec<'a> {
    edges: &'a DirectedEdgeSet,
    kind: ChainKind,
    probs: Vec<f64>,
    stationary: Option<Vec<f64>>,
}

impl<'a> ChainSpec<'a> {
    /// A chain from explicit transition probabilities, one per prolongation
    /// pair in flat prolongation order. Support outside the prolongation
    /// relation is impossible by construction; rows are validated.
    pub fn from_prolongation_probs(
        edges: &'a DirectedEdgeSet,
        kind: ChainKind,
        probs: Vec<f64>,
    ) -> Result<Self, MarkovError> {
        if probs.len() != edges.prolongation_count() {
            return Err(MarkovError::LengthMismatch {
                expected: edges.prolongation_count(),
                found: probs.len(),
            });
        }
        let chain = Self {
            edges,
            kind,
            probs,
            stationary: None,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn edges(&self) -> &'a DirectedEdgeSet {
        self.edges
    }

    pub fn kind(&self) -> &ChainKind {
        &self.kind
    }

    pub fn id(&self) -> &str {
        self.kind.id()
    }

    /// Transition probabilities out of `e`, aligned with `prolongations(e)`.
    pub fn row_probs(&self, e: usize) -> &[f64] {
        let start = self.edges.prolongation_offset(e);
        &self.probs[start..start + self.edges.prolongations(e).len()]
    }

    pub fn row(&self, e: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.edges
            .prolongations(e)
            .iter()
            .copied()
            .zip(self.row_probs(e).iter().copied())
    }

    /// `p_{e₁,e₂}`; zero unless `e₂` prolongs `e₁`.
    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.edges
            .prolongation_slot(from, to)
            .map_or(0.0, |slot| self.row_probs(from)[slot])
    }

    pub fn stationary(&self) -> Option<&[f64]> {
        self.stationary.as_deref()
    }

    /// Attaches `pi` after checking it is a distribution fixed by `P`
    /// within `tol` (max norm).
    pub fn with_stationary(mut self, pi: Vec<f64>, tol: f64) -> Result<Self, MarkovError> {
        if pi.len() != self.edges.len() {
            return Err(MarkovError::LengthMismatch {
                expected: self.edges.len(),
                found: pi.len(),
            });
        }
        let residual = self.fixed_point_residual_max(&pi);
        let mass = ksum(pi.iter().copied());
        if residual > tol || (mass - 1.0).abs() > tol || pi.iter().any(|&p| !(p >= 0.0)) {
            return Err(MarkovError::FixedPointFailed { residual });
        }
        self.stationary = Some(pi);
        Ok(self)
    }

    /// Checks non-negativity and row sums.
    pub fn validate(&self) -> Result<(), MarkovError> {
        for e in 0..self.edges.len() {
            let row = self.row_probs(e);
            if row.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                return Err(MarkovError::BadEntry { row: e });
            }
            let sum = ksum(row.iter().copied());
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(MarkovError::NotStochastic { row: e, sum });
            }
        }
        Ok(())
    }

    /// `πP`.
    pub fn apply_left(&self, pi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; pi.len()];
        for (e, &mass) in pi.iter().enumerate() {
            if mass != 0.0 {
                for (f, p) in self.row(e) {
                    out[f] += mass * p;
                }
            }
        }
        out
    }

    pub fn fixed_point_residual_max(&self, pi: &[f64]) -> f64 {
        self.apply_left(pi)
            .iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn fixed_point_residual_l1(&self, pi: &[f64]) -> f64 {
        ksum(
            self.apply_left(pi)
                .iter()
                .zip(pi)
                .map(|(a, b)| (a - b).abs()),
        )
    }
}

fn require_min_degree(edges: &DirectedEdgeSet) -> Result<(), MarkovError> {
    for v in 0..edges.vertex_count() {
        let degree = edges.out_degree(v);
        if degree < 2 {
            return Err(MarkovError::DegreeTooSmall { vertex: v, degree });
        }
    }
    Ok(())
}

/// The chain choosing the next directed edge uniformly among prolongations.
/// Its stationary distribution is uniform on `W₁(G)`.
pub fn uniform_nb_chain(edges: &DirectedEdgeSet) -> Result<ChainSpec<'_>, MarkovError> {
    require_min_degree(edges)?;
    let mut probs = Vec::with_capacity(edges.prolongation_count());
    for e in 0..edges.len() {
        let k = edges.prolongations(e).len();
        probs.extend(std::iter::repeat_n(1.0 / k as f64, k));
    }
    let chain = ChainSpec::from_prolongation_probs(edges, ChainKind::Uniform, probs)?;
    let m = edges.len();
    chain.with_stationary(vec![1.0 / m as f64; m], CLOSED_FORM_TOL)
}

/// The chain moving from `e₁` into `e₂` with probability proportional to
/// `w_{e₂}`. On weight-regular graphs the stationary law is the closed form
/// `π_e ∝ w_e(w − w_e)`; otherwise it is computed iteratively.
pub fn weighted_nb_chain(edges: &DirectedEdgeSet) -> Result<ChainSpec<'_>, MarkovError> {
    let chain = weighted_transitions(edges)?;
    match crate::graph::regularity_of(edges.weighted_degrees(), DEFAULT_REGULARITY_TOL) {
        Some(w) => {
            let pi = closed_form_stationary(edges, w)?;
            chain.with_stationary(pi, CLOSED_FORM_TOL)
        }
        None => {
            let pi = stationary_iterative(&chain, &StationaryOptions::default())?;
            chain.with_stationary(pi, ITERATIVE_TOL)
        }
    }
}

fn weighted_transitions(edges: &DirectedEdgeSet) -> Result<ChainSpec<'_>, MarkovError> {
    require_min_degree(edges)?;
    let mut probs = Vec::with_capacity(edges.prolongation_count());
    for e in edges.edges() {
        let denominator = edges.weighted_degree(e.head) - e.weight;
        probs.extend(
            edges
                .prolongations(e.id)
                .iter()
                .map(|&f| edges.edge(f).weight / denominator),
        );
    }
    ChainSpec::from_prolongation_probs(edges, ChainKind::Weighted, probs)
}

/// `π_e = w_e(w − w_e) / S` for a `w`-regular graph, verified to be fixed by
/// the weighted chain before it is returned.
pub fn closed_form_stationary(edges: &DirectedEdgeSet, w: f64) -> Result<Vec<f64>, MarkovError> {
    if edges
        .weighted_degrees()
        .iter()
        .any(|&d| (d - w).abs() > DEFAULT_REGULARITY_TOL * w)
    {
        return Err(MarkovError::NotRegular);
    }
    let chain = weighted_transitions(edges)?;
    let raw: Vec<f64> = edges
        .edges()
        .iter()
        .map(|e| e.weight * (w - e.weight))
        .collect();
    let total = ksum(raw.iter().copied());
    let pi: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let residual = chain.fixed_point_residual_max(&pi);
    if residual > CLOSED_FORM_TOL {
        return Err(MarkovError::FixedPointFailed { residual });
    }
    Ok(pi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    /// Plain power iteration, switching to the lazy fallback on oscillation.
    Auto,
    /// Plain power iteration only.
    Never,
    /// Always lazy with the given weight on the current iterate.
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct StationaryOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    /// Starting distribution; uniform when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            tol: ITERATIVE_TOL,
            max_iter: MAX_ITER,
            damping: Damping::Auto,
            initial: None,
        }
    }
}

/// Power iteration `π ← (1 − α)πP + απ` until `‖πP − π‖₁ ≤ tol`.
///
/// `α` starts at 0 under [`Damping::Auto`] and becomes [`FALLBACK_DAMPING`]
/// once the residual fails to decrease over [`OSCILLATION_WINDOW`] steps. The
/// lazy step has the same fixed points as `P` and removes periodicity.
pub fn stationary_iterative(
    chain: &ChainSpec<'_>,
    opts: &StationaryOptions,
) -> Result<Vec<f64>, MarkovError> {
    let m = chain.edges().len();
    let mut pi = match &opts.initial {
        Some(p) if p.len() != m => {
            return Err(MarkovError::LengthMismatch {
                expected: m,
                found: p.len(),
            })
        }
        Some(p) => p.clone(),
        None => vec![1.0 / m as f64; m],
    };
    let mut alpha = match opts.damping {
        Damping::Fixed(a) => a,
        _ => 0.0,
    };
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;
    for iter in 0..opts.max_iter {
        let next = chain.apply_left(&pi);
        residual = ksum(next.iter().zip(&pi).map(|(a, b)| (a - b).abs()));
        if residual <= opts.tol {
            return Ok(pi);
        }
        history.push(residual);
        if opts.damping == Damping::Auto
            && alpha == 0.0
            && iter >= OSCILLATION_WINDOW
            && residual >= history[iter - OSCILLATION_WINDOW]
        {
            alpha = FALLBACK_DAMPING;
        }
        for (p, n) in pi.iter_mut().zip(&next) {
            *p = (1.0 - alpha) * n + alpha * *p;
        }
        let mass = ksum(pi.iter().copied());
        pi.iter_mut().for_each(|p| *p /= mass);
    }
    Err(MarkovError::NotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

/// `Pr(Y_k = ω) = π_{(v₀,v₁)} ∏_{j≥2} p_{(v_{j−2},v_{j−1}),(v_{j−1},v_j)}`.
pub fn walk_probability(chain: &ChainSpec<'_>, walk: &[usize]) -> Result<f64, MarkovError> {
    let pi = chain.stationary().ok_or(MarkovError::MissingStationary)?;
    let ids = walk_edges(chain.edges(), walk)?;
    let mut prob = pi[ids[0]];
    for pair in ids.windows(2) {
        prob *= chain.transition(pair[0], pair[1]);
    }
    Ok(prob)
}

/// Directed-edge ids along a non-backtracking walk of length ≥ 1.
pub fn walk_edges(edges: &DirectedEdgeSet, walk: &[usize]) -> Result<Vec<usize>, MarkovError> {
    if walk.len() < 2 {
        return Err(MarkovError::InvalidWalk("length must be at least 1".into()));
    }
    let ids = walk
        .windows(2)
        .map(|p| {
            edges.find(p[0], p[1]).ok_or_else(|| {
                MarkovError::InvalidWalk(format!("{} {} is not an edge", p[0], p[1]))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(i) = walk.windows(3).position(|w| w[0] == w[2]) {
        return Err(MarkovError::InvalidWalk(format!(
            "backtracks at step {}",
            i + 2
        )));
    }
    Ok(ids)
}

fn draw(rng: &mut SplitMix64, weights: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = weights.clone().sum();
    let mut u = rng.next_f64() * total;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

/// One state drawn from `π`.
pub fn sample_initial(chain: &ChainSpec<'_>, rng: &mut SplitMix64) -> Result<usize, MarkovError> {
    let pi = chain.stationary().ok_or(MarkovError::MissingStationary)?;
    Ok(draw(rng, pi.iter().copied()))
}

pub fn sample_next(chain: &ChainSpec<'_>, e: usize, rng: &mut SplitMix64) -> usize {
    let slot = draw(rng, chain.row_probs(e).iter().copied());
    chain.edges().prolongations(e)[slot]
}

/// A stationary trajectory `E₁, …, E_k` as a vertex walk of length `k`.
pub fn sample_walk(
    chain: &ChainSpec<'_>,
    k: usize,
    rng: &mut SplitMix64,
) -> Result<Vec<usize>, MarkovError> {
    let mut e = sample_initial(chain, rng)?;
    let edges = chain.edges();
    let mut walk = vec![edges.edge(e).tail, edges.edge(e).head];
    for _ in 1..k {
        e = sample_next(chain, e, rng);
        walk.push(edges.edge(e).head);
    }
    Ok(walk)
}

/// Visit frequencies over `steps` transitions after `burn_in`, started from
/// `π`. Empty when `steps == 0`.
pub fn sample_edge_frequencies(
    chain: &ChainSpec<'_>,
    steps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Vec<f64>, MarkovError> {
    if steps == 0 {
        return Ok(Vec::new());
    }
    let mut rng = SplitMix64::new(seed);
    let mut e = sample_initial(chain, &mut rng)?;
    for _ in 0..burn_in {
        e = sample_next(chain, e, &mut rng);
    }
    let mut counts = vec![0u64; chain.edges().len()];
    for _ in 0..steps {
        e = sample_next(chain, e, &mut rng);
        counts[e] += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / steps as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{directed_edges, WeightedGraph};

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
    }

    fn cycle_weights(ws: &[f64]) -> WeightedGraph {
        let n = ws.len();
        WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, ws[i]))).unwrap()
    }

    fn complete(n: usize) -> WeightedGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        unit(n, &e)
    }

    #[test]
    fn uniform_chain_examples() {
        let c5 = directed_edges(&cycle_weights(&[1.0; 5]));
        let ch = uniform_nb_chain(&c5).unwrap();
        for e in 0..10 {
            assert_eq!(ch.row_probs(e), [1.0]);
        }
        assert!(ch.stationary().unwrap().iter().all(|&p| p == 0.1));

        let k4 = directed_edges(&complete(4));
        let ch = uniform_nb_chain(&k4).unwrap();
        assert!((0..12).all(|e| ch.row_probs(e) == [0.5, 0.5]));
        assert!(ch.stationary().unwrap().iter().all(|&p| p == 1.0 / 12.0));

        let p3 = directed_edges(&unit(3, &[(0, 1), (1, 2)]));
        assert!(matches!(
            uniform_nb_chain(&p3),
            Err(MarkovError::DegreeTooSmall { degree: 1, .. })
        ));
    }

    #[test]
    fn weighted_chain_examples() {
        let k3 = directed_edges(&cycle_weights(&[1.0; 3]));
        let ch = weighted_nb_chain(&k3).unwrap();
        assert!((0..6).all(|e| ch.row_probs(e) == [1.0]));

        let g = complete(5);
        let d = directed_edges(&g);
        let w = weighted_nb_chain(&d).unwrap();
        let u = uniform_nb_chain(&d).unwrap();
        for e in 0..d.len() {
            for (a, b) in w.row_probs(e).iter().zip(u.row_probs(e)) {
                assert!((a - b).abs() < 1e-15);
            }
        }

        let c4 = directed_edges(&cycle_weights(&[0.7, 1.3, 0.7, 1.3]));
        let ch = weighted_nb_chain(&c4).unwrap();
        for e in 0..8 {
            assert!((ch.row_probs(e)[0] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_examples() {
        let d = directed_edges(&complete(4));
        let pi = closed_form_stationary(&d, 3.0).unwrap();
        assert!(pi.iter().all(|&p| (p - 1.0 / 12.0).abs() < 1e-15));

        let c4 = directed_edges(&cycle_weights(&[0.5, 1.5, 0.5, 1.5]));
        let pi = closed_form_stationary(&c4, 2.0).unwrap();
        assert!(pi.iter().all(|&p| (p - 1.0 / 8.0).abs() < 1e-15));

        let c6 = directed_edges(&cycle_weights(&[1.0; 6]));
        let pi = closed_form_stationary(&c6, 2.0).unwrap();
        assert!(pi.iter().all(|&p| (p - 1.0 / 12.0).abs() < 1e-15));

        let irregular = directed_edges(&cycle_weights(&[0.5, 1.5, 0.5, 1.0]));
        assert_eq!(
            closed_form_stationary(&irregular, 2.0),
            Err(MarkovError::NotRegular)
        );
    }

    #[test]
    fn iterative_matches_known_fixed_points() {
        let d = directed_edges(&complete(5));
        let ch = uniform_nb_chain(&d).unwrap();
        let pi = stationary_iterative(&ch, &StationaryOptions::default()).unwrap();
        assert!(pi.iter().all(|&p| (p - 0.05).abs() < 1e-10));
    }

    #[test]
    fn periodic_chain_needs_damping() {
        let c4 = directed_edges(&cycle_weights(&[1.0; 4]));
        let ch = uniform_nb_chain(&c4).unwrap();
        let mut start = vec![0.0; 8];
        start[0] = 1.0;
        let plain = StationaryOptions {
            damping: Damping::Never,
            initial: Some(start.clone()),
            max_iter: 2_000,
            ..Default::default()
        };
        assert!(matches!(
            stationary_iterative(&ch, &plain),
            Err(MarkovError::NotConverged { .. })
        ));
        let auto = StationaryOptions {
            initial: Some(start),
            ..Default::default()
        };
        let pi = stationary_iterative(&ch, &auto).unwrap();
        assert!(ch.fixed_point_residual_l1(&pi) <= 1e-10);
    }

    #[test]
    fn walk_probability_examples() {
        let c5 = directed_edges(&cycle_weights(&[1.0; 5]));
        let ch = uniform_nb_chain(&c5).unwrap();
        assert_eq!(walk_probability(&ch, &[0, 1]).unwrap(), 0.1);
        assert_eq!(walk_probability(&ch, &[0, 1, 2, 3]).unwrap(), 0.1);
        assert!(matches!(
            walk_probability(&ch, &[0, 1, 0]),
            Err(MarkovError::InvalidWalk(_))
        ));
        assert!(matches!(
            walk_probability(&ch, &[0, 2]),
            Err(MarkovError::InvalidWalk(_))
        ));
        assert!(matches!(
            walk_probability(&ch, &[0]),
            Err(MarkovError::InvalidWalk(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = directed_edges(&complete(4));
        let ch = uniform_nb_chain(&d).unwrap();
        assert!(sample_edge_frequencies(&ch, 0, 10, 1).unwrap().is_empty());
        let a = sample_edge_frequencies(&ch, 10_000, 100, 42).unwrap();
        let b = sample_edge_frequencies(&ch, 10_000, 100, 42).unwrap();
        assert_eq!(a, b);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn custom_chain_validation() {
        let d = directed_edges(&complete(4));
        let bad = vec![0.6; d.prolongation_count()];
        assert!(matches!(
            ChainSpec::from_prolongation_probs(&d, ChainKind::Custom("x".into()), bad),
            Err(MarkovError::NotStochastic { .. })
        ));
        assert!(matches!(
            ChainSpec::from_prolongation_probs(&d, ChainKind::Custom("x".into()), vec![0.5; 3]),
            Err(MarkovError::LengthMismatch { .. })
        ));
    }
}
