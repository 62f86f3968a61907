//! Explicit test vectors whose Rayleigh quotients prove eigenvalue bounds on
//! concrete graphs, together with the vertex searches that select them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{general_parts, mu, weak_rhs, BoundsError, EdgeFunction};
use crate::cover::{ball, residual_core, unravel, CoverError, UnraveledBall};
use crate::graph::{DirectedEdgeSet, WeightedGraph, DEFAULT_REGULARITY_TOL};
use crate::markov::{sample_walk, walk_probability, ChainSpec, MarkovError};
use crate::numeric::{dot, KahanSum};
use crate::rng::SplitMix64;
use crate::spectra::{
    lambda1, lambda2, path_lambda1, path_top_eigenvector, rayleigh, SpectraError,
};

/// Tolerance for identities that hold in exact arithmetic.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for comparisons between a Rayleigh quotient and one eigensolve.
pub const EIGEN_TOL: f64 = 1e-9;
/// Tolerance for comparisons that compound two eigensolves.
pub const COMPOUND_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("vertex {vertex} has combinatorial degree {degree}, need at least 2")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("test vector vanishes: g is zero on the support of π")]
    ZeroVector,
    #[error("directed edge {0} does not exist")]
    InvalidEdge(usize),
    #[error("vertex {0} out of range")]
    InvalidVertex(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not weight-regular")]
    NotRegular,
    #[error("d = {d}: neither the standard nor the refined degree condition holds")]
    NotApplicable { d: f64 },
    #[error("no vertex has λ₁ of its unraveled ball at least {bound}; best is {best}")]
    NoQualifyingVertex { bound: f64, best: f64 },
    #[error("the peeled core of G ∖ G(v, r+1) at threshold {theta} is empty for every qualifying vertex")]
    EmptyCore { theta: f64 },
    #[error("combined vector is not orthogonal to 1: normalized ⟨f,1⟩ = {0:e}")]
    NotOrthogonal(f64),
    #[error("supports of f₁ and f₂ are adjacent: ⟨f₁,Af₂⟩ = {0:e}")]
    SupportsAdjacent(f64),
    #[error("Rayleigh quotient {rayleigh} below the bound {bound}")]
    BelowBound { rayleigh: f64, bound: f64 },
    #[error("Rayleigh quotient {rayleigh} exceeds λ₂ = {lambda2}")]
    AboveLambda2 { rayleigh: f64, lambda2: f64 },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    TheoremVector,
    Case1Vector,
    Lambda2Witness,
    Lemma42Pair,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CertificateMeta {
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Auxiliary numbers, keyed by name.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<(String, f64)>>,
    pub rayleigh: f64,
    pub bound: f64,
    pub slack: f64,
    pub metadata: CertificateMeta,
}

impl Certificate {
    fn new(kind: CertificateKind, rayleigh: f64, bound: f64, metadata: CertificateMeta) -> Self {
        Self {
            kind,
            vertex: None,
            vector: None,
            rayleigh,
            bound,
            slack: rayleigh - bound,
            metadata,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol
    }
}

fn require_min_degree(g: &WeightedGraph) -> Result<(), CertifyError> {
    for v in 0..g.vertex_count() {
        let degree = g.degree(v);
        if degree < 2 {
            return Err(CertifyError::DegreeTooSmall { vertex: v, degree });
        }
    }
    Ok(())
}

/// Node name `v0>v1>…` in terms of vertex labels.
fn walk_name(g: &WeightedGraph, tree: &UnraveledBall, node: usize) -> String {
    tree.walk(node)
        .iter()
        .map(|&x| g.label(x))
        .collect::<Vec<_>>()
        .join(">")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremVectorOptions {
    pub budget: usize,
    /// Attach the full vector (one entry per walk) to the certificate.
    pub keep_vector: bool,
}

impl Default for TheoremVectorOptions {
    fn default() -> Self {
        Self {
            budget: crate::cover::DEFAULT_NODE_BUDGET,
            keep_vector: false,
        }
    }
}

struct TreeSums {
    ff: KahanSum,
    faf: KahanSum,
    levels: Vec<KahanSum>,
    entries: Vec<(String, f64)>,
}

/// The vector `f(ω) = x_i g(ω′) √Pr(Y_i = ω)` on the forest of unraveled
/// balls `G̃(v, r+1)`, `ω′` the last edge of the walk `ω` of length `i`, and
/// `f = 0` at the roots. Its Rayleigh quotient equals `λ₁(P_{r+1})` times
/// the general bound.
///
/// The forest is processed one tree at a time; only inner products are kept
/// unless `keep_vector` is set. The metadata records the largest relative
/// deviation of a per-level squared norm from `x_i² Σ_e g(e)² π_e`.
pub fn build_theorem_vector(
    graph: &WeightedGraph,
    chain: &ChainSpec<'_>,
    g: &EdgeFunction,
    r: usize,
    opts: TheoremVectorOptions,
) -> Result<Certificate, CertifyError> {
    if r == 0 {
        return Err(CertifyError::ZeroRadius);
    }
    require_min_degree(graph)?;
    let edges = chain.edges();
    let (num, den) = general_parts(chain, g)?;
    if den == 0.0 {
        return Err(CertifyError::ZeroVector);
    }
    let pi = chain.stationary().ok_or(BoundsError::MissingStationary)?;
    let gv = g.values(edges)?;
    let x = path_top_eigenvector(r + 1)?;
    let depth = r + 1;

    let per_tree: Vec<TreeSums> = (0..graph.vertex_count())
        .into_par_iter()
        .map(|v| -> Result<TreeSums, CertifyError> {
            let tree = unravel(edges, v, depth, opts.budget)?;
            let nodes = tree.nodes();
            let mut prob = vec![0.0; nodes.len()];
            let mut f = vec![0.0; nodes.len()];
            let mut sums = TreeSums {
                ff: KahanSum::new(),
                faf: KahanSum::new(),
                levels: vec![KahanSum::new(); depth + 1],
                entries: Vec::new(),
            };
            for (i, node) in nodes.iter().enumerate().skip(1) {
                let e = node.edge.expect("non-root node");
                let parent = node.parent.expect("non-root node");
                prob[i] = match nodes[parent].edge {
                    None => pi[e],
                    Some(pe) => prob[parent] * chain.transition(pe, e),
                };
                f[i] = x[node.depth - 1] * gv[e] * prob[i].sqrt();
                let sq = f[i] * f[i];
                sums.ff.add(sq);
                sums.levels[node.depth].add(sq);
                sums.faf.add(2.0 * node.weight * f[i] * f[parent]);
            }
            if opts.keep_vector {
                sums.entries = (0..nodes.len())
                    .map(|i| (walk_name(graph, &tree, i), f[i]))
                    .collect();
            }
            Ok(sums)
        })
        .collect::<Result<_, _>>()?;

    let mut ff = KahanSum::new();
    let mut faf = KahanSum::new();
    let mut levels = vec![KahanSum::new(); depth + 1];
    let mut entries = Vec::new();
    for t in per_tree {
        ff.add(t.ff.value());
        faf.add(t.faf.value());
        for (acc, l) in levels.iter_mut().zip(&t.levels) {
            acc.add(l.value());
        }
        entries.extend(t.entries);
    }
    let ff = ff.value();
    if ff == 0.0 {
        return Err(CertifyError::ZeroVector);
    }
    let level_error = (1..=depth)
        .map(|i| {
            let expect = x[i - 1] * x[i - 1] * den;
            (levels[i].value() - expect).abs() / expect.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);

    let rq = faf.value() / ff;
    let bound = path_lambda1(depth)? * (num / den);
    let mut meta = CertificateMeta {
        r,
        chain: Some(chain.id().to_string()),
        g: Some(g.id()),
        ..Default::default()
    };
    meta.extra.insert("level_norm_error".into(), level_error);
    meta.extra.insert("general_rhs".into(), num / den);
    let mut cert = Certificate::new(CertificateKind::TheoremVector, rq, bound, meta);
    if opts.keep_vector {
        cert.vector = Some(entries);
    }
    Ok(cert)
}

/// `λ₁(G̃(v, r))` for every vertex, in vertex order.
pub fn unraveled_lambda1_table(
    edges: &DirectedEdgeSet,
    r: usize,
    budget: usize,
    tol: f64,
) -> Result<Vec<f64>, CertifyError> {
    (0..edges.vertex_count())
        .into_par_iter()
        .map(|v| {
            let tree = unravel(edges, v, r, budget)?;
            if tree.len() == 1 {
                return Ok(0.0);
            }
            Ok(lambda1(&tree, tol)?.value)
        })
        .collect()
}

/// Index of the maximum, smallest index among ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceReport {
    pub vertex: usize,
    /// `max_v λ₁(G̃(v, r)) / λ₁(P_{r+1})`.
    pub lhs: f64,
    /// The general bound.
    pub rhs: f64,
    pub holds: bool,
    /// `λ₁(G̃(v, r))` per vertex.
    pub table: Vec<f64>,
}

/// Evaluates every vertex and reports the one maximizing `λ₁(G̃(v, r))`;
/// `holds` is `lhs ≥ rhs − 1e−9`.
pub fn theorem_existence_check(
    graph: &WeightedGraph,
    chain: &ChainSpec<'_>,
    g: &EdgeFunction,
    r: usize,
    budget: usize,
    tol: f64,
) -> Result<ExistenceReport, CertifyError> {
    if r == 0 {
        return Err(CertifyError::ZeroRadius);
    }
    require_min_degree(graph)?;
    let (num, den) = general_parts(chain, g)?;
    if den == 0.0 {
        return Err(CertifyError::ZeroVector);
    }
    let rhs = num / den;
    let table = unraveled_lambda1_table(chain.edges(), r, budget, tol)?;
    let vertex = argmax(&table);
    let lhs = table[vertex] / path_lambda1(r + 1)?;
    Ok(ExistenceReport {
        vertex,
        lhs,
        rhs,
        holds: lhs >= rhs - EIGEN_TOL,
        table,
    })
}

/// The vector equal to 1 on the root of `G̃(v, r)` and on the child reached
/// by `e = (v, u)`, 0 elsewhere. Its Rayleigh quotient is `w_e`.
///
/// On a `w`-regular graph with `w_e ≥ μw` the bound is `μw`; otherwise it is
/// `w_e` itself.
pub fn case1_vector(
    graph: &WeightedGraph,
    edges: &DirectedEdgeSet,
    e: usize,
    r: usize,
) -> Result<Certificate, CertifyError> {
    if r == 0 {
        return Err(CertifyError::ZeroRadius);
    }
    if e >= edges.len() {
        return Err(CertifyError::InvalidEdge(e));
    }
    let de = *edges.edge(e);
    let tree = unravel(edges, de.tail, r, usize::MAX)?;
    let child = tree
        .level(1)
        .find(|&i| tree.nodes()[i].edge == Some(e))
        .expect("every out-edge of the center is a child of the root");
    let mut f = vec![0.0; tree.len()];
    f[tree.root()] = 1.0;
    f[child] = 1.0;
    let rq = rayleigh(&tree, &f)?;

    let w = graph.regularity(DEFAULT_REGULARITY_TOL);
    let bound = match w {
        Some(w) if de.weight >= mu() * w => mu() * w,
        _ => de.weight,
    };
    let meta = CertificateMeta {
        r,
        w,
        extra: BTreeMap::from([("w_e".to_string(), de.weight)]),
        ..Default::default()
    };
    let mut cert = Certificate::new(CertificateKind::Case1Vector, rq, bound, meta);
    cert.vertex = Some(graph.label(de.tail).to_string());
    cert.vector = Some(vec![
        (walk_name(graph, &tree, tree.root()), 1.0),
        (walk_name(graph, &tree, child), 1.0),
    ]);
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma42Report {
    /// `λ₁(G(v, r))`.
    pub lhs: f64,
    /// `λ₁(G̃(v, r))`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares the spectral radius of the ball `G(v, r)` with that of the
/// unraveled ball; `holds` is `lhs ≥ rhs − 1e−9`.
pub fn verify_lemma42(
    graph: &WeightedGraph,
    edges: &DirectedEdgeSet,
    v: usize,
    r: usize,
    budget: usize,
    tol: f64,
) -> Result<Lemma42Report, CertifyError> {
    let b = ball(graph, v, r)?;
    let tree = unravel(edges, v, r, budget)?;
    let lhs = if b.len() == 1 {
        0.0
    } else {
        lambda1(&b, tol)?.value
    };
    let rhs = if tree.len() == 1 {
        0.0
    } else {
        lambda1(&tree, tol)?.value
    };
    Ok(Lemma42Report {
        lhs,
        rhs,
        holds: lhs >= rhs - EIGEN_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda2Options {
    pub budget: usize,
    pub tol: f64,
    pub keep_vector: bool,
    /// Also test the core hypothesis at every vertex, not only the selected one.
    pub check_all_vertices: bool,
}

impl Default for Lambda2Options {
    fn default() -> Self {
        Self {
            budget: crate::cover::DEFAULT_NODE_BUDGET,
            tol: 1e-10,
            keep_vector: false,
            check_all_vertices: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda2Report {
    pub certificate: Certificate,
    pub vertex: usize,
    pub lambda2: f64,
    pub core_size: usize,
    pub ball_size: usize,
    /// `λ₁(G̃(v, r))` per vertex.
    pub table: Vec<f64>,
    /// Vertices where both hypotheses hold, when checked for all vertices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifying_vertices: Option<usize>,
}

/// A vector orthogonal to `1` with Rayleigh quotient at least
/// `λ₁(P_{r+1}) · w√(d−1)/d`, witnessing that bound for `λ₂`.
///
/// `f₁` is the Perron vector of `G(v, r)` padded with zeros and `f₂` the
/// indicator of the core `G′` of `G ∖ G(v, r+1)` peeled at `2w√(d−1)/d`;
/// `f = ⟨f₂,1⟩ f₁ − ⟨f₁,1⟩ f₂`.
pub fn lambda2_certificate(
    graph: &WeightedGraph,
    r: usize,
    opts: Lambda2Options,
) -> Result<Lambda2Report, CertifyError> {
    if r == 0 {
        return Err(CertifyError::ZeroRadius);
    }
    if !graph.is_connected() {
        return Err(CertifyError::Disconnected);
    }
    require_min_degree(graph)?;
    let w = graph
        .regularity(DEFAULT_REGULARITY_TOL)
        .ok_or(CertifyError::NotRegular)?;
    let d = graph
        .average_combinatorial_degree()
        .map_err(|_| CertifyError::Disconnected)?;
    let weak = weak_rhs(w, d)?;
    if !weak.applicability.iter().any(|p| p.satisfied) {
        return Err(CertifyError::NotApplicable { d });
    }
    let bound = path_lambda1(r + 1)? * weak.value;
    let theta = 2.0 * weak.value;
    let edges = DirectedEdgeSet::new(graph);
    let table = unraveled_lambda1_table(&edges, r, opts.budget, opts.tol)?;

    let mut order: Vec<usize> = (0..graph.vertex_count())
        .filter(|&v| table[v] >= bound - EIGEN_TOL)
        .collect();
    if order.is_empty() {
        return Err(CertifyError::NoQualifyingVertex {
            bound,
            best: table[argmax(&table)],
        });
    }
    order.sort_by(|&a, &b| table[b].total_cmp(&table[a]).then(a.cmp(&b)));

    let qualifying_vertices = if opts.check_all_vertices {
        let count = order
            .par_iter()
            .map(|&v| -> Result<usize, CertifyError> {
                Ok(usize::from(!residual_core(graph, v, r, theta)?.is_empty()))
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .sum();
        Some(count)
    } else {
        None
    };

    let mut selected = None;
    for &v in &order {
        let core = residual_core(graph, v, r, theta)?;
        if !core.is_empty() {
            selected = Some((v, core));
            break;
        }
    }
    let (v, core) = selected.ok_or(CertifyError::EmptyCore { theta })?;

    let n = graph.vertex_count();
    let b = ball(graph, v, r)?;
    let perron = lambda1(&b, opts.tol)?;
    let sign = if perron.vector.iter().sum::<f64>() < 0.0 {
        -1.0
    } else {
        1.0
    };
    let mut f1 = vec![0.0; n];
    for (i, &x) in b.vertices.iter().enumerate() {
        f1[x] = sign * perron.vector[i];
    }
    let mut f2 = vec![0.0; n];
    for &x in &core {
        f2[x] = 1.0;
    }
    let ones = vec![1.0; n];
    let s1 = dot(&f1, &ones);
    let s2 = dot(&f2, &ones);
    let f: Vec<f64> = if s1 == 0.0 {
        f1.clone()
    } else {
        f1.iter().zip(&f2).map(|(a, c)| s2 * a - s1 * c).collect()
    };

    let mut cross = KahanSum::new();
    for e in graph.edges() {
        cross.add(e.weight * (f1[e.u] * f2[e.v] + f1[e.v] * f2[e.u]));
    }
    let cross = cross.value();
    if cross != 0.0 {
        return Err(CertifyError::SupportsAdjacent(cross));
    }
    let orth = dot(&f, &ones).abs() / (crate::numeric::norm2(&f) * (n as f64).sqrt());
    if orth > 1e-10 {
        return Err(CertifyError::NotOrthogonal(orth));
    }
    let rq = rayleigh(graph, &f)?;
    if rq < bound - COMPOUND_TOL {
        return Err(CertifyError::BelowBound {
            rayleigh: rq,
            bound,
        });
    }
    let l2 = lambda2(graph, opts.tol)?.value;
    if l2 < rq - COMPOUND_TOL {
        return Err(CertifyError::AboveLambda2 {
            rayleigh: rq,
            lambda2: l2,
        });
    }

    let mut meta = CertificateMeta {
        r,
        w: Some(w),
        d: Some(d),
        ..Default::default()
    };
    meta.extra.insert("lambda1_unraveled".into(), table[v]);
    meta.extra.insert("lambda1_ball".into(), perron.value);
    meta.extra.insert("lambda2".into(), l2);
    meta.extra.insert("theta".into(), theta);
    meta.extra.insert("c1".into(), s2);
    meta.extra.insert("c2".into(), -s1);
    meta.extra.insert("orthogonality".into(), orth);
    let mut cert = Certificate::new(CertificateKind::Lambda2Witness, rq, bound, meta);
    cert.vertex = Some(graph.label(v).to_string());
    if opts.keep_vector {
        cert.vector = Some(
            f.iter()
                .enumerate()
                .filter(|&(_, &x)| x != 0.0)
                .map(|(i, &x)| (graph.label(i).to_string(), x))
                .collect(),
        );
    }
    Ok(Lambda2Report {
        certificate: cert,
        vertex: v,
        lambda2: l2,
        core_size: core.len(),
        ball_size: b.len(),
        table,
        qualifying_vertices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioFailure {
    pub walk: Vec<usize>,
    pub ratio: f64,
    pub expected: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub checked: usize,
    pub max_rel_error: f64,
    pub failures: Vec<RatioFailure>,
}

/// Samples stationary walks of length 2..=5 and checks
/// `Pr(Y_i = ω) / Pr(Y_{i−1} = ω⁻) = p_{ω″,ω′}` to `1e−12` relative.
pub fn verify_ratio_identity(
    chain: &ChainSpec<'_>,
    sample_walks: usize,
    seed: u64,
) -> Result<RatioReport, CertifyError> {
    let edges = chain.edges();
    let mut rng = SplitMix64::new(seed);
    let mut report = RatioReport {
        checked: 0,
        max_rel_error: 0.0,
        failures: Vec::new(),
    };
    for _ in 0..sample_walks {
        let k = 2 + rng.below(4);
        let walk = sample_walk(chain, k, &mut rng)?;
        let full = walk_probability(chain, &walk)?;
        let prefix = walk_probability(chain, &walk[..walk.len() - 1])?;
        let n = walk.len();
        let last = edges.find(walk[n - 2], walk[n - 1]).expect("sampled edge");
        let prev = edges.find(walk[n - 3], walk[n - 2]).expect("sampled edge");
        let expected = chain.transition(prev, last);
        let ratio = full / prefix;
        let rel_error = (ratio - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        report.checked += 1;
        report.max_rel_error = report.max_rel_error.max(rel_error);
        if rel_error > IDENTITY_TOL {
            report.failures.push(RatioFailure {
                walk,
                ratio,
                expected,
                rel_error,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{general_rhs, simple_rhs};
    use crate::generators::{complete, cycle, petersen};
    use crate::graph::directed_edges;
    use crate::markov::{uniform_nb_chain, weighted_nb_chain};

    const TOL: f64 = 1e-10;

    #[test]
    fn theorem_vector_k4() {
        let g = complete(4).unwrap();
        let e = directed_edges(&g);
        let chain = uniform_nb_chain(&e).unwrap();
        let c =
            build_theorem_vector(&g, &chain, &EdgeFunction::One, 2, Default::default()).unwrap();
        assert!((c.rayleigh - 2.0).abs() < 1e-9);
        assert!((c.rayleigh - c.bound).abs() < 1e-9);
        assert!(c.metadata.extra["level_norm_error"] < 1e-12);
    }

    #[test]
    fn theorem_vector_c5() {
        let g = cycle(5).unwrap();
        let e = directed_edges(&g);
        let chain = uniform_nb_chain(&e).unwrap();
        let c =
            build_theorem_vector(&g, &chain, &EdgeFunction::One, 3, Default::default()).unwrap();
        let expect = 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((c.rayleigh - expect).abs() < 1e-9);
    }

    #[test]
    fn theorem_vector_with_entries() {
        let g = complete(4).unwrap();
        let e = directed_edges(&g);
        let chain = uniform_nb_chain(&e).unwrap();
        let opts = TheoremVectorOptions {
            keep_vector: true,
            ..Default::default()
        };
        let c = build_theorem_vector(&g, &chain, &EdgeFunction::One, 1, opts).unwrap();
        let v = c.vector.unwrap();
        assert_eq!(v.len(), 4 * (1 + 3 + 6));
        assert_eq!(v[0], ("0".to_string(), 0.0));
        assert_eq!(v[1].0, "0>1");
    }

    #[test]
    fn existence_petersen_and_k4() {
        let g = petersen();
        let e = directed_edges(&g);
        let chain = uniform_nb_chain(&e).unwrap();
        let rep = theorem_existence_check(&g, &chain, &EdgeFunction::One, 2, 1 << 20, TOL).unwrap();
        assert!(rep.holds);
        assert!(rep.lhs >= 2f64.sqrt() - 1e-9);
        assert_eq!(rep.vertex, 0);
        assert!(rep.table.iter().all(|&x| (x - rep.table[0]).abs() < 1e-10));

        let k4 = complete(4).unwrap();
        let e = directed_edges(&k4);
        let chain = weighted_nb_chain(&e).unwrap();
        let g = EdgeFunction::InvSqrtComplement { w: 3.0 };
        let rep = theorem_existence_check(&k4, &chain, &g, 3, 1 << 20, TOL).unwrap();
        assert!(rep.lhs >= 2f64.sqrt() - 1e-9);
        assert!((simple_rhs(&k4, &e, 3.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((general_rhs(&chain, &g).unwrap() - rep.rhs).abs() < 1e-15);
    }

    #[test]
    fn case1_examples() {
        let g =
            WeightedGraph::new(4, [(0, 1, 1.5), (1, 2, 0.5), (2, 3, 1.5), (3, 0, 0.5)]).unwrap();
        let e = directed_edges(&g);
        let id = e.find(0, 1).unwrap();
        let c = case1_vector(&g, &e, id, 2).unwrap();
        assert!((c.rayleigh - 1.5).abs() < 1e-12);
        assert!((c.bound - mu() * 2.0).abs() < 1e-15);
        assert!(c.holds(0.0));
        let light = e.find(1, 2).unwrap();
        let c = case1_vector(&g, &e, light, 1).unwrap();
        assert!((c.rayleigh - 0.5).abs() < 1e-12);
        assert!(case1_vector(&g, &e, 99, 1).is_err());
    }

    #[test]
    fn lemma42_examples() {
        let p = petersen();
        let e = directed_edges(&p);
        let rep = verify_lemma42(&p, &e, 0, 1, 1 << 20, TOL).unwrap();
        assert!((rep.lhs - rep.rhs).abs() < 1e-10);
        // Girth 5 = 2r + 1: the induced ball is all of G, the tree is not.
        let rep = verify_lemma42(&p, &e, 0, 2, 1 << 20, TOL).unwrap();
        assert!((rep.lhs - 3.0).abs() < 1e-9);
        assert!((rep.rhs - 5f64.sqrt()).abs() < 1e-9);
        let k4 = complete(4).unwrap();
        let e = directed_edges(&k4);
        let rep = verify_lemma42(&k4, &e, 0, 2, 1 << 20, TOL).unwrap();
        assert!((rep.lhs - 3.0).abs() < 1e-9);
        assert!(rep.lhs > rep.rhs + 1e-3);
        let path = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)]).unwrap();
        let e = directed_edges(&path);
        let rep = verify_lemma42(&path, &e, 1, 3, 1 << 20, TOL).unwrap();
        assert!((rep.lhs - rep.rhs).abs() < 1e-10);
    }

    #[test]
    fn lambda2_on_complete_graph_has_no_core() {
        let g = complete(41).unwrap();
        let err = lambda2_certificate(&g, 1, Default::default()).unwrap_err();
        assert!(matches!(err, CertifyError::EmptyCore { .. }), "{err}");
    }

    #[test]
    fn lambda2_rejects_inapplicable_degree() {
        let g = petersen();
        let err = lambda2_certificate(&g, 1, Default::default()).unwrap_err();
        assert!(matches!(err, CertifyError::NotApplicable { .. }), "{err}");
    }

    #[test]
    fn ratio_identity_k4_and_c5() {
        let g = complete(4).unwrap();
        let e = directed_edges(&g);
        let chain = uniform_nb_chain(&e).unwrap();
        let a = verify_ratio_identity(&chain, 100, 3).unwrap();
        assert_eq!(a.checked, 100);
        assert!(a.failures.is_empty());
        assert_eq!(a, verify_ratio_identity(&chain, 100, 3).unwrap());

        let c5 = cycle(5).unwrap();
        let e = directed_edges(&c5);
        let chain = uniform_nb_chain(&e).unwrap();
        let mut rng = SplitMix64::new(5);
        for k in 1..=5 {
            let walk = sample_walk(&chain, k, &mut rng).unwrap();
            assert!((walk_probability(&chain, &walk).unwrap() - 0.1).abs() < 1e-15);
        }
    }
}
