//! Right-hand sides of the unraveled-ball and Alon–Boppana inequalities, and
//! the constants that govern when the regular-graph forms apply.
//!
//! Every edge sum uses compensated summation.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{DirectedEdgeSet, WeightedGraph, DEFAULT_REGULARITY_TOL};
use crate::markov::{ChainSpec, MarkovError};
use crate::numeric::KahanSum;
use crate::rng::SplitMix64;
use crate::spectra::path_lambda1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("denominator vanishes: g is zero on the support of π")]
    ZeroDenominator,
    #[error("graph is not weight-regular")]
    NotRegular,
    #[error("vertex {vertex} has combinatorial degree {degree}, need at least 2")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("g requires w_e < w, but an edge of weight {weight} meets w = {w}")]
    ComplementNotPositive { weight: f64, w: f64 },
    #[error("g table has {found} values for {expected} directed edges")]
    TableLength { expected: usize, found: usize },
    #[error("g takes a non-finite value on edge {0}")]
    NonFinite(usize),
    #[error("chain has no stationary distribution")]
    MissingStationary,
    #[error("chain is built on a different edge set")]
    ForeignChain,
    #[error("combinatorial degree must be at least 2, got {0}")]
    DegreeBelowTwo(f64),
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("t = {0} outside (0, 1)")]
    TangentPoint(f64),
    #[error("y = {y} outside [0, {upper}]")]
    OutOfDomain { y: f64, upper: f64 },
    #[error("no sign change in the bracket for t₀")]
    NoBracket,
    #[error(transparent)]
    Markov(#[from] MarkovError),
}

/// `μ = (3 − √3)/4`, the inflection point of `y ↦ y^{3/2}(1 − y)^{1/2}`.
pub fn mu() -> f64 {
    (3.0 - 3f64.sqrt()) / 4.0
}

/// The weight function `g : W₁(G) → ℝ` of the general bound.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeFunction {
    One,
    /// `g(e) = (w − w_e)^{−1/2}`.
    InvSqrtComplement {
        w: f64,
    },
    /// Explicit values indexed by directed-edge id.
    Table {
        name: String,
        values: Vec<f64>,
    },
}

impl EdgeFunction {
    pub fn id(&self) -> String {
        match self {
            EdgeFunction::One => "one".into(),
            EdgeFunction::InvSqrtComplement { .. } => "inv-sqrt-complement".into(),
            EdgeFunction::Table { name, .. } => format!("table:{name}"),
        }
    }

    /// A table of values uniform in `[0.5, 1.5)`.
    pub fn random_table(edges: &DirectedEdgeSet, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        EdgeFunction::Table {
            name: format!("random-{seed}"),
            values: (0..edges.len()).map(|_| rng.uniform(0.5, 1.5)).collect(),
        }
    }

    pub fn values(&self, edges: &DirectedEdgeSet) -> Result<Vec<f64>, BoundsError> {
        let values = match self {
            EdgeFunction::One => vec![1.0; edges.len()],
            EdgeFunction::InvSqrtComplement { w } => edges
                .edges()
                .iter()
                .map(|e| {
                    if e.weight < *w {
                        Ok((w - e.weight).powf(-0.5))
                    } else {
                        Err(BoundsError::ComplementNotPositive {
                            weight: e.weight,
                            w: *w,
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
            EdgeFunction::Table { values, .. } => {
                if values.len() != edges.len() {
                    return Err(BoundsError::TableLength {
                        expected: edges.len(),
                        found: values.len(),
                    });
                }
                values.clone()
            }
        };
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(BoundsError::NonFinite(i));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    General,
    StrongRegular,
    SimpleRegular,
    WeakRegular,
    AlonBoppana,
    UniversalCover,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Precondition {
    pub name: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: f64,
    pub inputs: BoundInputs,
    pub applicability: Vec<Precondition>,
}

impl BoundValue {
    pub fn precondition(&self, name: &str) -> Option<bool> {
        self.applicability
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.satisfied)
    }
}

fn require_regular(g: &WeightedGraph, w: f64) -> Result<(), BoundsError> {
    for v in 0..g.vertex_count() {
        let degree = g.degree(v);
        if degree < 2 {
            return Err(BoundsError::DegreeTooSmall { vertex: v, degree });
        }
    }
    let ok = g
        .weighted_degrees()
        .iter()
        .all(|&d| (d - w).abs() <= DEFAULT_REGULARITY_TOL * w);
    if ok {
        Ok(())
    } else {
        Err(BoundsError::NotRegular)
    }
}

/// Numerator and denominator of the general bound:
/// `Σ_{e₁→e₂} w_{e₂} g(e₁) g(e₂) π_{e₁} √p_{e₁,e₂}` and `Σ_e g(e)² π_e`.
pub fn general_parts(chain: &ChainSpec<'_>, g: &EdgeFunction) -> Result<(f64, f64), BoundsError> {
    let edges = chain.edges();
    let pi = chain.stationary().ok_or(BoundsError::MissingStationary)?;
    let gv = g.values(edges)?;
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for e1 in 0..edges.len() {
        den.add(gv[e1] * gv[e1] * pi[e1]);
        for (e2, p) in chain.row(e1) {
            num.add(edges.edge(e2).weight * gv[e1] * gv[e2] * pi[e1] * p.sqrt());
        }
    }
    Ok((num.value(), den.value()))
}

/// Right-hand side of the general unraveled-ball bound for an assigned chain
/// and weight function `g`.
pub fn general_rhs(chain: &ChainSpec<'_>, g: &EdgeFunction) -> Result<f64, BoundsError> {
    let (num, den) = general_parts(chain, g)?;
    if den == 0.0 {
        return Err(BoundsError::ZeroDenominator);
    }
    Ok(num / den)
}

/// Twice the general bound: the limit `r → ∞`, a lower bound on the spectral
/// radius of the universal cover.
pub fn universal_cover_rhs(chain: &ChainSpec<'_>, g: &EdgeFunction) -> Result<f64, BoundsError> {
    Ok(2.0 * general_rhs(chain, g)?)
}

/// The regular-graph form with the weighted chain substituted in closed form:
/// `Σ_{e₁→e₂} g(e₁)g(e₂) w_{e₁} w_{e₂}^{3/2} (w − w_{e₁})^{1/2}` over
/// `Σ_e g(e)² w_e (w − w_e)`.
pub fn strong_rhs(
    graph: &WeightedGraph,
    edges: &DirectedEdgeSet,
    w: f64,
    g: &EdgeFunction,
) -> Result<f64, BoundsError> {
    require_regular(graph, w)?;
    let gv = g.values(edges)?;
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for e1 in edges.edges() {
        let c = w - e1.weight;
        den.add(gv[e1.id] * gv[e1.id] * e1.weight * c);
        for &e2 in edges.prolongations(e1.id) {
            let w2 = edges.edge(e2).weight;
            num.add(gv[e1.id] * gv[e2] * e1.weight * w2 * w2.sqrt() * c.sqrt());
        }
    }
    let den = den.value();
    if den == 0.0 {
        return Err(BoundsError::ZeroDenominator);
    }
    Ok(num.value() / den)
}

/// `Σ_{e∈W₁} w_e^{3/2}(w − w_e)^{1/2} / (w|V|)`.
pub fn simple_rhs(
    graph: &WeightedGraph,
    edges: &DirectedEdgeSet,
    w: f64,
) -> Result<f64, BoundsError> {
    require_regular(graph, w)?;
    let sum: KahanSum = edges.edges().iter().map(|e| g_curve(e.weight, w)).collect();
    Ok(sum.value() / (w * graph.vertex_count() as f64))
}

/// `g(y) = y^{3/2}(w − y)^{1/2}` on `[0, w]`.
pub fn g_curve(y: f64, w: f64) -> f64 {
    y * y.sqrt() * (w - y).max(0.0).sqrt()
}

/// `g′(y)` for `0 < y < w`.
pub fn g_curve_derivative(y: f64, w: f64) -> f64 {
    let c = w - y;
    1.5 * (y * c).sqrt() - 0.5 * y * y.sqrt() / c.sqrt()
}

/// Least real `d ≥ 2` with `2√(d−1)/d ≤ μ`: the larger root of
/// `μ²d² − 4d + 4 = 0`.
pub fn threshold_degree() -> f64 {
    let m = mu();
    (2.0 + 2.0 * (1.0 - m * m).sqrt()) / (m * m)
}

/// Whether `2√(d−1)/d ≤ μ`.
pub fn weak_applicable(d: f64) -> bool {
    d >= 2.0 && 2.0 * (d - 1.0).sqrt() / d <= mu()
}

/// The tangent line `ℓ_t` of `g` at `tw`, as `(slope, intercept)`.
pub fn tangent_line(t: f64, w: f64) -> Result<(f64, f64), BoundsError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(BoundsError::TangentPoint(t));
    }
    let y = t * w;
    let slope = g_curve_derivative(y, w);
    Ok((slope, g_curve(y, w) - slope * y))
}

/// Solution of the tangency system that lowers the degree threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedConstants {
    pub t0: f64,
    pub x0: f64,
    /// `|ℓ_{t₀}(x₀) − g(x₀)|` at `w = 1`.
    pub residual: f64,
}

impl RefinedConstants {
    /// `1/t₀`, the least combinatorial degree the refined argument covers.
    pub fn degree_threshold(&self) -> f64 {
        1.0 / self.t0
    }
}

fn secant_x(t: f64) -> f64 {
    2.0 * (t * (1.0 - t)).sqrt()
}

fn tangency_gap(t: f64) -> f64 {
    let (slope, intercept) = tangent_line(t, 1.0).unwrap();
    let x = secant_x(t);
    slope * x + intercept - g_curve(x, 1.0)
}

/// Finds `t₀ ∈ (0, μ)` with `ℓ_{t₀}(x(t₀)) = g(x(t₀))`,
/// `x(t) = 2√(1/t − 1)/(1/t) = 2√(t(1 − t))`, by bisection at `w = 1`.
/// `g` is jointly homogeneous in `(y, w)`, so the pair is scale-free.
pub fn refined_constants(tol: f64) -> Result<RefinedConstants, BoundsError> {
    let (mut lo, mut hi) = (1e-6, mu() - 1e-6);
    let (mut f_lo, f_hi) = (tangency_gap(lo), tangency_gap(hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(BoundsError::NoBracket);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = tangency_gap(mid);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let t0 = 0.5 * (lo + hi);
    let residual = tangency_gap(t0).abs();
    let x0 = secant_x(t0);
    if residual > tol.max(1e-15) || !(t0 < mu() && mu() < x0) {
        return Err(BoundsError::NoBracket);
    }
    Ok(RefinedConstants { t0, x0, residual })
}

/// The convex minorant `h` of `g` on `[0, x₀w]`: `g` up to `t₀w`, the tangent
/// `ℓ_{t₀}` beyond.
pub fn h_eval(y: f64, t0: f64, w: f64) -> Result<f64, BoundsError> {
    let upper = secant_x(t0) * w;
    if !(y >= 0.0 && y <= upper * (1.0 + 1e-12)) {
        return Err(BoundsError::OutOfDomain { y, upper });
    }
    if y <= t0 * w {
        Ok(g_curve(y, w))
    } else {
        let (slope, intercept) = tangent_line(t0, w)?;
        Ok(slope * y + intercept)
    }
}

/// `w√(d−1)/d`, with the two ranges of `d` where it bounds the unraveled balls.
pub fn weak_rhs(w: f64, d: f64) -> Result<BoundValue, BoundsError> {
    if !(d >= 2.0) {
        return Err(BoundsError::DegreeBelowTwo(d));
    }
    let refined = refined_constants(1e-12)?;
    Ok(BoundValue {
        kind: BoundKind::WeakRegular,
        value: w * (d - 1.0).sqrt() / d,
        inputs: BoundInputs {
            w: Some(w),
            d: Some(d),
            ..Default::default()
        },
        applicability: vec![
            Precondition {
                name: "standard: 2*sqrt(d-1)/d <= mu".into(),
                satisfied: weak_applicable(d),
            },
            Precondition {
                name: "refined: d >= 1/t0".into(),
                satisfied: d >= refined.degree_threshold(),
            },
        ],
    })
}

/// `λ₁(P_{r+1}) · w√(d−1)/d`.
pub fn alon_boppana_rhs(w: f64, d: f64, r: usize) -> Result<f64, BoundsError> {
    if !(d >= 2.0) {
        return Err(BoundsError::DegreeBelowTwo(d));
    }
    if r == 0 {
        return Err(BoundsError::ZeroRadius);
    }
    Ok(path_lambda1(r + 1).expect("r + 1 >= 1") * w * (d - 1.0).sqrt() / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::directed_edges;
    use crate::markov::{uniform_nb_chain, weighted_nb_chain};

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
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

    fn cycle_weights(ws: &[f64]) -> WeightedGraph {
        let n = ws.len();
        WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, ws[i]))).unwrap()
    }

    #[test]
    fn mu_value() {
        assert!((mu() - 0.316_987_298_107_780_7).abs() < 1e-15);
        assert!(mu() < 0.5);
    }

    #[test]
    fn threshold_degree_solves_defining_equation() {
        let d = threshold_degree();
        assert!((2.0 * (d - 1.0).sqrt() / d - mu()).abs() < 1e-12);
        assert!((d - 38.782).abs() < 1e-3);
        assert!(weak_applicable(40.0));
        assert!(!weak_applicable(38.0));
    }

    #[test]
    fn general_rhs_unit_regular() {
        let k4 = complete(4);
        let d = directed_edges(&k4);
        let ch = uniform_nb_chain(&d).unwrap();
        assert!((general_rhs(&ch, &EdgeFunction::One).unwrap() - 2f64.sqrt()).abs() < 1e-14);

        let c5 = cycle_weights(&[1.0; 5]);
        let d5 = directed_edges(&c5);
        let ch = uniform_nb_chain(&d5).unwrap();
        assert!((general_rhs(&ch, &EdgeFunction::One).unwrap() - 1.0).abs() < 1e-14);

        let zero = EdgeFunction::Table {
            name: "zero".into(),
            values: vec![0.0; d5.len()],
        };
        assert_eq!(general_rhs(&ch, &zero), Err(BoundsError::ZeroDenominator));
    }

    #[test]
    fn strong_and_simple_agree() {
        let g = cycle_weights(&[0.5, 1.5, 0.5, 1.5]);
        let d = directed_edges(&g);
        let inv = EdgeFunction::InvSqrtComplement { w: 2.0 };
        let s = strong_rhs(&g, &d, 2.0, &inv).unwrap();
        let t = simple_rhs(&g, &d, 2.0).unwrap();
        assert!((s - t).abs() < 1e-14);
        let ch = weighted_nb_chain(&d).unwrap();
        assert!((general_rhs(&ch, &inv).unwrap() - s).abs() < 1e-14);
    }

    #[test]
    fn simple_rhs_alternating_c4() {
        // Each vertex sees one edge of each weight; the sum collapses to √0.75.
        let g = cycle_weights(&[0.5, 1.5, 0.5, 1.5]);
        let d = directed_edges(&g);
        let direct =
            (4.0 * 0.5f64.powf(1.5) * 1.5f64.sqrt() + 4.0 * 1.5f64.powf(1.5) * 0.5f64.sqrt()) / 8.0;
        let v = simple_rhs(&g, &d, 2.0).unwrap();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regular_forms_reject_irregular_graphs() {
        let g = cycle_weights(&[0.5, 1.5, 0.5, 1.0]);
        let d = directed_edges(&g);
        assert_eq!(simple_rhs(&g, &d, 1.75), Err(BoundsError::NotRegular));
        assert_eq!(
            strong_rhs(&g, &d, 1.75, &EdgeFunction::One),
            Err(BoundsError::NotRegular)
        );
    }

    #[test]
    fn refined_constants_match_printed_values() {
        let c = refined_constants(1e-12).unwrap();
        assert!((c.t0 - 0.1389).abs() < 5e-4);
        assert!((c.x0 - 0.6917).abs() < 5e-4);
        assert!((c.degree_threshold() - 7.1980).abs() < 1e-3);
        let (slope, intercept) = tangent_line(c.t0, 1.0).unwrap();
        assert!((slope - 0.49087).abs() < 1e-4);
        assert!((intercept + 0.0201444).abs() < 1e-4);
    }

    #[test]
    fn tangent_line_properties() {
        assert!(tangent_line(0.0, 1.0).is_err());
        assert!(tangent_line(1.0, 1.0).is_err());
        for &(t, w) in &[(0.2, 1.0), (0.5, 3.0), (0.8, 0.7)] {
            let (slope, intercept) = tangent_line(t, w).unwrap();
            let y = t * w;
            assert!((slope * y + intercept - g_curve(y, w)).abs() < 1e-15);
            let h = 1e-5;
            let fd = (g_curve(y + h, w) - g_curve(y - h, w)) / (2.0 * h);
            assert!((fd - slope).abs() < 1e-6);
        }
    }

    #[test]
    fn h_seam_and_domain() {
        let c = refined_constants(1e-12).unwrap();
        let w = 2.5;
        let y = c.t0 * w;
        let (slope, intercept) = tangent_line(c.t0, w).unwrap();
        assert!((h_eval(y, c.t0, w).unwrap() - (slope * y + intercept)).abs() < 1e-12);
        assert!(h_eval(-0.1, c.t0, w).is_err());
        assert!(h_eval(c.x0 * w * 1.01, c.t0, w).is_err());
    }

    #[test]
    fn weak_rhs_examples() {
        let b = weak_rhs(40.0, 40.0).unwrap();
        assert!((b.value - 39f64.sqrt()).abs() < 1e-14);
        assert_eq!(b.precondition("standard: 2*sqrt(d-1)/d <= mu"), Some(true));
        let b = weak_rhs(8.0, 8.0).unwrap();
        assert!((b.value - 7f64.sqrt()).abs() < 1e-14);
        assert_eq!(b.precondition("standard: 2*sqrt(d-1)/d <= mu"), Some(false));
        assert_eq!(b.precondition("refined: d >= 1/t0"), Some(true));
        assert!(weak_rhs(1.0, 1.5).is_err());
    }

    #[test]
    fn alon_boppana_examples() {
        assert!((alon_boppana_rhs(40.0, 40.0, 1).unwrap() - 39f64.sqrt()).abs() < 1e-13);
        let big = alon_boppana_rhs(5.0, 5.0, 10_000).unwrap();
        assert!((big - 4.0).abs() < 1e-6);
        let mut prev = 0.0;
        for r in 1..50 {
            let v = alon_boppana_rhs(3.0, 3.0, r).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert_eq!(alon_boppana_rhs(3.0, 3.0, 0), Err(BoundsError::ZeroRadius));
    }

    #[test]
    fn universal_cover_scaling() {
        let g = complete(4);
        let d = directed_edges(&g);
        let ch = uniform_nb_chain(&d).unwrap();
        let base = universal_cover_rhs(&ch, &EdgeFunction::One).unwrap();
        assert!((base - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let g3 = g.scaled(3.0).unwrap();
        let d3 = directed_edges(&g3);
        let ch3 = uniform_nb_chain(&d3).unwrap();
        let scaled = universal_cover_rhs(&ch3, &EdgeFunction::One).unwrap();
        assert!((scaled - 3.0 * base).abs() < 1e-13);
    }
}
