use std::fmt::Display;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use coverbound::bounds::{
    alon_boppana_rhs, g_curve, general_rhs, mu, refined_constants, simple_rhs, strong_rhs,
    tangent_line, threshold_degree, universal_cover_rhs, weak_rhs, EdgeFunction,
};
use coverbound::certify::{
    build_theorem_vector, case1_vector, lambda2_certificate, theorem_existence_check,
    unraveled_lambda1_table, verify_lemma42, verify_ratio_identity, CertifyError, Lambda2Options,
    TheoremVectorOptions, COMPOUND_TOL, EIGEN_TOL, IDENTITY_TOL,
};
use coverbound::cover::{unravel, walk_level_sizes};
use coverbound::generators::{generate, Family, GeneratorSpec};
use coverbound::graph::DEFAULT_REGULARITY_TOL;
use coverbound::markov::{
    closed_form_stationary, sample_edge_frequencies, stationary_iterative, uniform_nb_chain,
    weighted_nb_chain, ChainSpec, StationaryOptions,
};
use coverbound::oracle::{
    dense_adjacency, dense_eigs, enumerate_nb_walks, DEFAULT_JACOBI_TOL, MAX_DENSE_DIM,
};
use coverbound::spectra::{lambda1, lambda2, path_lambda1};
use coverbound::{parse_graph, DirectedEdgeSet, WeightedGraph};

use crate::args::*;
use crate::report::Report;

/// Usage or input problems; exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub type Outcome = Result<Output, InputError>;

pub enum Output {
    Report(Report),
    Text(String),
}

pub struct Context {
    pub argv: Vec<String>,
    pub tol: f64,
    pub budget: usize,
    pub oracle: bool,
}

impl Context {
    fn report(&self) -> Report {
        Report::new(self.argv.clone())
    }
}

struct Loaded {
    graph: WeightedGraph,
    hash: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn load(path: &Path) -> Result<Loaded, InputError> {
    let bytes = fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| InputError(format!("{}: not valid UTF-8", path.display())))?;
    let graph = parse_graph(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok(Loaded {
        graph,
        hash: sha256_hex(&bytes),
    })
}

fn vertex(g: &WeightedGraph, label: &str) -> Result<usize, InputError> {
    g.vertex_by_label(label)
        .ok_or_else(|| InputError(format!("unknown vertex {label}")))
}

fn build_chain<'a>(
    edges: &'a DirectedEdgeSet,
    kind: ChainArg,
) -> Result<ChainSpec<'a>, InputError> {
    Ok(match kind {
        ChainArg::Uniform => uniform_nb_chain(edges)?,
        ChainArg::Weighted => weighted_nb_chain(edges)?,
    })
}

fn chain_name(kind: ChainArg) -> &'static str {
    match kind {
        ChainArg::Uniform => "uniform",
        ChainArg::Weighted => "weighted",
    }
}

fn regular_w(g: &WeightedGraph) -> Result<f64, InputError> {
    g.regularity(DEFAULT_REGULARITY_TOL)
        .ok_or_else(|| InputError("graph is not weight-regular".into()))
}

/// Reads `u v value` lines keyed by vertex labels into a table over
/// directed-edge ids; every directed edge must be given exactly once.
fn load_g_table(
    path: &Path,
    g: &WeightedGraph,
    edges: &DirectedEdgeSet,
) -> Result<(Vec<f64>, String), InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let mut values = vec![f64::NAN; edges.len()];
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || {
            InputError(format!(
                "{}:{}: expected `u v value`",
                path.display(),
                i + 1
            ))
        };
        if parts.len() != 3 {
            return Err(bad());
        }
        let u = vertex(g, parts[0])?;
        let v = vertex(g, parts[1])?;
        let x: f64 = parts[2].parse().map_err(|_| bad())?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(InputError(format!(
                "{}:{}: value must be positive and finite, got {x}",
                path.display(),
                i + 1
            )));
        }
        let e = edges.find(u, v).ok_or_else(|| {
            InputError(format!(
                "{}:{}: {} {} is not an edge",
                path.display(),
                i + 1,
                parts[0],
                parts[1]
            ))
        })?;
        if !values[e].is_nan() {
            return Err(InputError(format!(
                "{}:{}: duplicate entry",
                path.display(),
                i + 1
            )));
        }
        values[e] = x;
    }
    if let Some(e) = values.iter().position(|x| x.is_nan()) {
        let de = edges.edge(e);
        return Err(InputError(format!(
            "{}: no value for directed edge {} {}",
            path.display(),
            g.label(de.tail),
            g.label(de.head)
        )));
    }
    let hash = sha256_hex(text.as_bytes());
    Ok((values, hash))
}

fn edge_function(
    spec: &str,
    g: &WeightedGraph,
    edges: &DirectedEdgeSet,
) -> Result<EdgeFunction, InputError> {
    match spec {
        "one" => Ok(EdgeFunction::One),
        "inv-sqrt-complement" => Ok(EdgeFunction::InvSqrtComplement { w: regular_w(g)? }),
        _ => match spec.strip_prefix("table:") {
            Some(file) => {
                let (values, hash) = load_g_table(Path::new(file), g, edges)?;
                Ok(EdgeFunction::Table {
                    name: hash[..16].to_string(),
                    values,
                })
            }
            None => Err(InputError(format!(
                "--g must be one, inv-sqrt-complement or table:<file>, got {spec}"
            ))),
        },
    }
}

#[derive(Serialize)]
struct VertexValue<'a> {
    vertex: &'a str,
    lambda1: f64,
}

fn labelled_table<'a>(g: &'a WeightedGraph, table: &[f64]) -> Vec<VertexValue<'a>> {
    table
        .iter()
        .enumerate()
        .map(|(v, &lambda1)| VertexValue {
            vertex: g.label(v),
            lambda1,
        })
        .collect()
}

fn dense_lambda1(g: &WeightedGraph) -> Result<f64, InputError> {
    Ok(dense_eigs(&dense_adjacency(g), DEFAULT_JACOBI_TOL, false)?.values[0])
}

fn tree_as_graph(tree: &coverbound::cover::UnraveledBall) -> Result<WeightedGraph, InputError> {
    Ok(WeightedGraph::new(tree.len(), tree.tree_edges())?)
}

pub fn validate(ctx: &Context, a: &GraphArg) -> Outcome {
    let Loaded { graph: g, hash } = load(&a.graph)?;
    let mut rep = ctx.report();
    rep.input_sha256 = Some(hash);
    let degrees = g.weighted_degrees();
    rep.set("vertices", g.vertex_count());
    rep.set("edges", g.edge_count());
    rep.set("connected", g.is_connected());
    rep.set("min_degree", g.min_combinatorial_degree());
    rep.set("average_degree", g.average_combinatorial_degree().ok());
    rep.set("regular_w", g.regularity(DEFAULT_REGULARITY_TOL));
    rep.set(
        "weighted_degree_range",
        [
            degrees.iter().copied().fold(f64::INFINITY, f64::min),
            degrees.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ],
    );
    let round_trip = parse_graph(&g.to_edge_list())
        .map(|h| h == g)
        .unwrap_or(false);
    rep.check("round-trip", round_trip, None);
    Ok(Output::Report(rep))
}

pub fn gen(a: &GenArgs) -> Outcome {
    let family = match a.family {
        FamilyArg::Cycle => Family::Cycle,
        FamilyArg::Path => Family::Path,
        FamilyArg::Complete => Family::Complete,
        FamilyArg::Petersen => Family::Petersen,
        FamilyArg::RandomRegular => Family::RandomRegular,
        FamilyArg::WeightedRegular => Family::WeightedRegular,
    };
    let (lo, hi) = a
        .weights
        .split_once(',')
        .and_then(|(l, h)| Some((l.trim().parse().ok()?, h.trim().parse().ok()?)))
        .ok_or_else(|| InputError(format!("--weights must be lo,hi, got {}", a.weights)))?;
    let mut spec = GeneratorSpec::new(family, a.n)
        .degree(a.d)
        .weights(lo, hi)
        .seed(a.seed);
    spec.balance_tol = a.balance_tol;
    let text = generate(&spec)?.to_edge_list();
    match &a.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            Ok(Output::Text(String::new()))
        }
        None => Ok(Output::Text(text)),
    }
}

pub fn unravel_cmd(ctx: &Context, a: &UnravelArgs) -> Outcome {
    let Loaded { graph: g, hash } = load(&a.graph)?;
    let v = vertex(&g, &a.vertex)?;
    let edges = DirectedEdgeSet::new(&g);
    let tree = unravel(&edges, v, a.r, ctx.budget)?;
    let mut rep = ctx.report();
    rep.input_sha256 = Some(hash);
    rep.set("vertex", &a.vertex);
    rep.set("r", a.r);
    rep.set("level_sizes", tree.level_sizes());
    rep.set("nodes", tree.len());
    let l1 = if tree.len() > 1 {
        lambda1(&tree, ctx.tol)?.value
    } else {
        0.0
    };
    rep.set("lambda1", l1);
    rep.set("path_lambda1", path_lambda1(a.r + 1)?);
    rep.set("ratio", l1 / path_lambda1(a.r + 1)?);
    let dp: Vec<f64> = walk_level_sizes(&edges, v, a.r);
    let sizes: Vec<f64> = tree.level_sizes().iter().map(|&s| s as f64).collect();
    rep.check("level sizes match walk counts", dp == sizes, None);
    if ctx.oracle {
        match enumerate_nb_walks(&g, v, a.r, ctx.budget) {
            Ok(walks) => {
                let counts: Vec<usize> = walks.iter().map(Vec::len).collect();
                rep.check(
                    "oracle: walk enumeration",
                    counts == tree.level_sizes(),
                    format!("{counts:?}"),
                );
            }
            Err(e) => rep.set("oracle_walks", e.to_string()),
        }
        if tree.len() <= MAX_DENSE_DIM && tree.len() > 1 {
            let dense = dense_lambda1(&tree_as_graph(&tree)?)?;
            rep.check(
                "oracle: dense lambda1",
                (dense - l1).abs() <= 1e-8,
                format!("{dense}"),
            );
        }
    }
    Ok(Output::Report(rep))
}

#[derive(Serialize)]
struct EdgeProb<'a> {
    tail: &'a str,
    head: &'a str,
    pi: f64,
}

pub fn chain_cmd(ctx: &Context, a: &ChainArgs) -> Outcome {
    let Loaded { graph: g, hash } = load(&a.graph)?;
    let edges = DirectedEdgeSet::new(&g);
    let chain = build_chain(&edges, a.chain)?;
    let pi = chain.stationary().expect("builders attach π").to_vec();
    let mut rep = ctx.report();
    rep.input_sha256 = Some(hash);
    rep.set("chain", chain.id());
    rep.set("states", edges.len());
    rep.set(
        "fixed_point_residual_l1",
        chain.fixed_point_residual_l1(&pi),
    );
    rep.set(
        "fixed_point_residual_max",
        chain.fixed_point_residual_max(&pi),
    );
    rep.set(
        "stationary",
        edges
            .edges()
            .iter()
            .map(|e| EdgeProb {
                tail: g.label(e.tail),
                head: g.label(e.head),
                pi: pi[e.id],
            })
            .collect::<Vec<_>>(),
    );
    rep.check("stochastic", chain.validate().is_ok(), None);
    let regular = g.regularity(DEFAULT_REGULARITY_TOL);
    if let (ChainArg::Weighted, Some(w)) = (a.chain, regular) {
        let closed = closed_form_stationary(&edges, w)?;
        let iter = stationary_iterative(&chain, &StationaryOptions::default())?;
        let gap = closed
            .iter()
            .zip(&iter)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        rep.check(
            "closed form matches iteration",
            gap <= 1e-10,
            format!("max gap {gap:e}"),
        );
    }
    if ctx.oracle {
        let freq = sample_edge_frequencies(&chain, a.steps, 1000, a.seed)?;
        if !freq.is_empty() {
            let dev = freq
                .iter()
                .zip(&pi)
                .map(|(f, p)| (f - p).abs())
                .fold(0.0, f64::max);
            let allowed = 5.0 / (a.steps as f64).sqrt();
            rep.set("monte_carlo_steps", a.steps);
            rep.check(
                "oracle: Monte-Carlo frequencies",
                dev <= allowed,
                format!("max deviation {dev:e}, allowed {allowed:e}"),
            );
        }
    }
    Ok(Output::Report(rep))
}

fn existence_checks(
    ctx: &Context,
    rep: &mut Report,
    g: &WeightedGraph,
    edges: &DirectedEdgeSet,
    r: usize,
    rhs: f64,
) -> Result<(), InputError> {
    let table = unraveled_lambda1_table(edges, r, ctx.budget, ctx.tol)?;
    let best = table
        .iter()
        .enumerate()
        .fold(0, |b, (i, &x)| if x > table[b] { i } else { b });
    let lhs = table[best] / path_lambda1(r + 1)?;
    rep.set("argmax_vertex", g.label(best));
    rep.set("lhs", lhs);
    rep.set("lambda1_table", labelled_table(g, &table));
    rep.check(
        "max lambda1 ratio >= rhs",
        lhs >= rhs - EIGEN_TOL,
        format!("{lhs} vs {rhs}"),
    );
    if ctx.oracle {
        let mut worst: f64 = 0.0;
        let mut compared = 0usize;
        for (v, &l1) in table.iter().enumerate() {
            let tree = unravel(edges, v, r, ctx.budget)?;
            if tree.len() > 1 && tree.len() <= MAX_DENSE_DIM {
                worst = worst.max((dense_lambda1(&tree_as_graph(&tree)?)? - l1).abs());
                compared += 1;
            }
        }
        rep.check(
            "oracle: dense lambda1 per vertex",
            worst <= 1e-8,
            format!("{compared} balls, max gap {worst:e}"),
        );
    }
    Ok(())
}

pub fn bound_cmd(ctx: &Context, a: &BoundArgs) -> Outcome {
    let Loaded { graph: g, hash } = load(&a.graph)?;
    if a.r == 0 {
        return Err(InputError("--r must be at least 1".into()));
    }
    let edges = DirectedEdgeSet::new(&g);
    let mut rep = ctx.report();
    rep.input_sha256 = Some(hash);
    rep.set("r", a.r);
    match a.kind {
        BoundKindArg::General | BoundKindArg::UniversalCover => {
            let chain = build_chain(&edges, a.chain)?;
            let gf = edge_function(&a.g, &g, &edges)?;
            rep.set("chain", chain_name(a.chain));
            rep.set("g", gf.id());
            let rhs = general_rhs(&chain, &gf)?;
            if a.kind == BoundKindArg::UniversalCover {
                rep.set("kind", "universal-cover");
                rep.set("universal_cover_rhs", universal_cover_rhs(&chain, &gf)?);
            } else {
                rep.set("kind", "general");
            }
            rep.set("rhs", rhs);
            existence_checks(ctx, &mut rep, &g, &edges, a.r, rhs)?;
        }
        BoundKindArg::Strong => {
            let w = regular_w(&g)?;
            let gf = edge_function(&a.g, &g, &edges)?;
            let rhs = strong_rhs(&g, &edges, w, &gf)?;
            rep.set("kind", "strong-regular");
            rep.set("g", gf.id());
            rep.set("w", w);
            rep.set("rhs", rhs);
            let chain = weighted_nb_chain(&edges)?;
            let general = general_rhs(&chain, &gf)?;
            rep.check(
                "agrees with general bound under the weighted chain",
                (general - rhs).abs() <= IDENTITY_TOL * rhs.abs().max(1.0),
                format!("{general}"),
            );
            existence_checks(ctx, &mut rep, &g, &edges, a.r, rhs)?;
        }
        BoundKindArg::Simple => {
            let w = regular_w(&g)?;
            let rhs = simple_rhs(&g, &edges, w)?;
            rep.set("kind", "simple-regular");
            rep.set("w", w);
            rep.set("rhs", rhs);
            existence_checks(ctx, &mut rep, &g, &edges, a.r, rhs)?;
        }
        BoundKindArg::Weak => {
            let w = regular_w(&g)?;
            let d = g.average_combinatorial_degree()?;
            let bv = weak_rhs(w, d)?;
            rep.set("kind", "weak-regular");
            rep.set("w", w);
            rep.set("d", d);
            rep.set("rhs", bv.value);
            rep.set("applicability", &bv.applicability);
            if bv.applicability.iter().any(|p| p.satisfied) {
                existence_checks(ctx, &mut rep, &g, &edges, a.r, bv.value)?;
            }
        }
        BoundKindArg::AlonBoppana => {
            let w = regular_w(&g)?;
            let d = g.average_combinatorial_degree()?;
            let rhs = alon_boppana_rhs(w, d, a.r)?;
            let bv = weak_rhs(w, d)?;
            rep.set("kind", "alon-boppana");
            rep.set("w", w);
            rep.set("d", d);
            rep.set("rhs", rhs);
            rep.set("applicability", &bv.applicability);
            let l2 = lambda2(&g, ctx.tol)?.value;
            rep.set("lambda2", l2);
            if bv.applicability.iter().any(|p| p.satisfied) {
                rep.check(
                    "lambda2 >= rhs",
                    l2 >= rhs - COMPOUND_TOL,
                    format!("{l2} vs {rhs}"),
                );
            }
            if ctx.oracle && g.vertex_count() <= MAX_DENSE_DIM {
                let dense = dense_eigs(&dense_adjacency(&g), DEFAULT_JACOBI_TOL, false)?;
                rep.check(
                    "oracle: dense lambda2",
                    (dense.values[1] - l2).abs() <= 1e-8,
                    format!("{}", dense.values[1]),
                );
            }
        }
    }
    Ok(Output::Report(rep))
}

fn certify_failure(mut rep: Report, e: CertifyError) -> Outcome {
    let input = matches!(
        e,
        CertifyError::ZeroRadius
            | CertifyError::NotRegular
            | CertifyError::Disconnected
            | CertifyError::DegreeTooSmall { .. }
            | CertifyError::InvalidEdge(_)
            | CertifyError::InvalidVertex(_)
    );
    if input {
        return Err(InputError(e.to_string()));
    }
    rep.set("error", e.to_string());
    rep.check("certificate", false, e.to_string());
    Ok(Output::Report(rep))
}

pub fn certify_cmd(ctx: &Context, a: &CertifyArgs) -> Outcome {
    let Loaded { graph: g, hash } = load(&a.graph)?;
    let edges = DirectedEdgeSet::new(&g);
    let mut rep = ctx.report();
    rep.input_sha256 = Some(hash);
    match a.kind {
        CertKindArg::Theorem => {
            let chain = build_chain(&edges, a.chain)?;
            let gf = edge_function(&a.g, &g, &edges)?;
            let opts = TheoremVectorOptions {
                budget: ctx.budget,
                keep_vector: a.full_vector,
            };
            let cert = match build_theorem_vector(&g, &chain, &gf, a.r, opts) {
                Ok(c) => c,
                Err(e) => return certify_failure(rep, e),
            };
            let tol = EIGEN_TOL * cert.bound.abs().max(1.0);
            rep.check(
                "rayleigh equals bound",
                (cert.rayleigh - cert.bound).abs() <= tol,
                format!("{:e}", cert.rayleigh - cert.bound),
            );
            let level = cert.metadata.extra["level_norm_error"];
            rep.check(
                "per-level norms",
                level <= IDENTITY_TOL,
                format!("{level:e}"),
            );
            let existence = theorem_existence_check(&g, &chain, &gf, a.r, ctx.budget, ctx.tol)?;
            rep.check(
                "some unraveled ball attains the bound",
                existence.holds,
                format!(
                    "vertex {} ratio {}",
                    g.label(existence.vertex),
                    existence.lhs
                ),
            );
            rep.set("certificate", cert);
        }
        CertKindArg::Case1 => {
            let e = match &a.edge {
                Some(spec) => {
                    let (u, v) = spec
                        .split_once(',')
                        .ok_or_else(|| InputError(format!("--edge must be u,v, got {spec}")))?;
                    let (u, v) = (vertex(&g, u.trim())?, vertex(&g, v.trim())?);
                    edges
                        .find(u, v)
                        .ok_or_else(|| InputError(format!("{spec} is not an edge")))?
                }
                None => edges.edges().iter().fold(0, |b, e| {
                    if e.weight > edges.edge(b).weight {
                        e.id
                    } else {
                        b
                    }
                }),
            };
            if edges.is_empty() {
                return Err(InputError("graph has no edges".into()));
            }
            let cert = match case1_vector(&g, &edges, e, a.r) {
                Ok(c) => c,
                Err(e) => return certify_failure(rep, e),
            };
            let we = edges.edge(e).weight;
            rep.check(
                "rayleigh equals w_e",
                (cert.rayleigh - we).abs() <= IDENTITY_TOL * we.max(1.0),
                None,
            );
            rep.check(
                "slack >= 0",
                cert.holds(IDENTITY_TOL),
                format!("{}", cert.slack),
            );
            rep.set("certificate", cert);
        }
        CertKindArg::Lemma42 => {
            let vertices: Vec<usize> = match &a.vertex {
                Some(l) => vec![vertex(&g, l)?],
                None => (0..g.vertex_count()).collect(),
            };
            #[derive(Serialize)]
            struct Row<'a> {
                vertex: &'a str,
                ball: f64,
                unraveled: f64,
            }
            let mut rows = Vec::new();
            let mut ok = true;
            let mut min_gap = f64::INFINITY;
            for v in vertices {
                let r = match verify_lemma42(&g, &edges, v, a.r, ctx.budget, ctx.tol) {
                    Ok(r) => r,
                    Err(e) => return certify_failure(rep, e),
                };
                ok &= r.holds;
                min_gap = min_gap.min(r.lhs - r.rhs);
                rows.push(Row {
                    vertex: g.label(v),
                    ball: r.lhs,
                    unraveled: r.rhs,
                });
            }
            rep.set("kind", "lemma42-pair");
            rep.set("r", a.r);
            rep.set("min_gap", min_gap);
            rep.set("pairs", rows);
            rep.check(
                "ball dominates unraveled ball",
                ok,
                format!("min gap {min_gap:e}"),
            );
        }
        CertKindArg::Lambda2 => {
            let opts = Lambda2Options {
                budget: ctx.budget,
                tol: ctx.tol,
                keep_vector: a.full_vector,
                check_all_vertices: true,
            };
            let report = match lambda2_certificate(&g, a.r, opts) {
                Ok(r) => r,
                Err(e) => return certify_failure(rep, e),
            };
            rep.check(
                "rayleigh >= bound",
                report.certificate.holds(COMPOUND_TOL),
                format!("slack {}", report.certificate.slack),
            );
            rep.check(
                "lambda2 >= rayleigh",
                report.lambda2 >= report.certificate.rayleigh - COMPOUND_TOL,
                format!("{} vs {}", report.lambda2, report.certificate.rayleigh),
            );
            if ctx.oracle && g.vertex_count() <= MAX_DENSE_DIM {
                let dense = dense_eigs(&dense_adjacency(&g), DEFAULT_JACOBI_TOL, false)?;
                rep.check(
                    "oracle: dense lambda2",
                    (dense.values[1] - report.lambda2).abs() <= 1e-8,
                    format!("{}", dense.values[1]),
                );
            }
            rep.set(
                "hypothesis_at_all_vertices",
                report.qualifying_vertices == Some(g.vertex_count()),
            );
            rep.set("lambda1_table", labelled_table(&g, &report.table));
            rep.set("core_size", report.core_size);
            rep.set("ball_size", report.ball_size);
            rep.set("lambda2", report.lambda2);
            rep.set("qualifying_vertices", report.qualifying_vertices);
            rep.set("certificate", report.certificate);
        }
        CertKindArg::Ratio => {
            let chain = build_chain(&edges, a.chain)?;
            let r = verify_ratio_identity(&chain, a.samples, a.seed)?;
            rep.set("chain", chain_name(a.chain));
            rep.check(
                "ratio identity",
                r.failures.is_empty(),
                format!(
                    "{} walks, max relative error {:e}",
                    r.checked, r.max_rel_error
                ),
            );
            rep.set("ratio", r);
        }
    }
    Ok(Output::Report(rep))
}

pub fn constants(ctx: &Context) -> Outcome {
    let mut rep = ctx.report();
    let m = mu();
    let rc = refined_constants(1e-12)?;
    let (slope, intercept) = tangent_line(rc.t0, 1.0)?;
    let d = threshold_degree();
    let gap = 2.0 * (d - 1.0).sqrt() / d - m;
    rep.set("mu", m);
    rep.set("t0", rc.t0);
    rep.set("x0", rc.x0);
    rep.set("inv_t0", rc.degree_threshold());
    rep.set("tangent_slope", slope);
    rep.set("tangent_intercept", intercept);
    rep.set("tangency_residual", rc.residual);
    rep.set("threshold_degree", d);
    rep.set("threshold_residual", gap);
    rep.check("mu = (3 - sqrt 3)/4", (m - 0.3169873).abs() <= 1e-6, None);
    rep.check("t0", (rc.t0 - 0.1389).abs() <= 5e-4, None);
    rep.check("x0", (rc.x0 - 0.6917).abs() <= 5e-4, None);
    rep.check("1/t0", (rc.degree_threshold() - 7.1980).abs() <= 1e-3, None);
    rep.check("tangent slope", (slope - 0.49087).abs() <= 1e-4, None);
    rep.check(
        "tangent intercept",
        (intercept + 0.0201444).abs() <= 1e-4,
        None,
    );
    rep.check(
        "threshold degree solves 2 sqrt(d-1)/d = mu",
        gap.abs() <= 1e-12,
        format!("{gap:e}"),
    );
    Ok(Output::Report(rep))
}

pub fn plot_g(a: &PlotArgs) -> Outcome {
    if !(a.w > 0.0 && a.w.is_finite()) {
        return Err(InputError(format!("--w must be positive, got {}", a.w)));
    }
    let rc = refined_constants(1e-12)?;
    let (slope, intercept) = tangent_line(rc.t0, a.w)?;
    let mut out = String::from("y,g,ell_t0\n");
    for k in 0..=512 {
        let y = a.w * k as f64 / 512.0;
        out.push_str(&format!(
            "{},{},{}\n",
            y,
            g_curve(y, a.w),
            slope * y + intercept
        ));
    }
    Ok(Output::Text(out))
}
