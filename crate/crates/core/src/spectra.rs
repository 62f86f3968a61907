//! Symmetric eigenvalue machinery: closed-form path spectra, a restarted
//! Lanczos solver for the top eigenpair, `λ₂` by deflation, and Rayleigh
//! quotients.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::graph::{regularity_of, WeightedGraph, DEFAULT_REGULARITY_TOL};
use crate::numeric::{dot, norm2};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_MATVECS: usize = 50_000;
pub const DEFAULT_BASIS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("path must have at least one vertex")]
    EmptyPath,
    #[error("operator has dimension zero")]
    EmptyOperator,
    #[error("Rayleigh quotient of the zero vector")]
    ZeroVector,
    #[error("vector has length {found}, operator has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("eigensolver did not converge after {matvecs} products (residual {residual:e})")]
    NotConverged { matvecs: usize, residual: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("deflation leaves no room: dimension {dim}, {deflated} deflated vectors")]
    NothingLeft { dim: usize, deflated: usize },
}

/// A real symmetric linear map given by its action on vectors.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `y ← A x`. `y` arrives zeroed.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Upper bound on the spectral norm; the maximum absolute row sum.
    fn norm_bound(&self) -> f64;
}

impl SymmetricOperator for WeightedGraph {
    fn dim(&self) -> usize {
        self.vertex_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, out) in y.iter_mut().enumerate() {
            *out = self.neighbors(v).iter().map(|&(u, w)| w * x[u]).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        self.weighted_degrees().into_iter().fold(0.0, f64::max)
    }
}

fn apply_vec<A: SymmetricOperator + ?Sized>(a: &A, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    a.apply(x, &mut y);
    y
}

/// Eigenpair with unit vector and explicit residual `‖Av − λv‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Convergence when the residual is at most `tol · norm_bound`.
    pub tol: f64,
    pub max_matvecs: usize,
    /// Krylov basis size before an explicit restart.
    pub basis: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_matvecs: DEFAULT_MAX_MATVECS,
            basis: DEFAULT_BASIS,
        }
    }
}

impl LanczosOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// `λ₁(P_n) = 2cos(π/(n+1))`.
pub fn path_lambda1(n: usize) -> Result<f64, SpectraError> {
    if n == 0 {
        return Err(SpectraError::EmptyPath);
    }
    Ok(2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos())
}

/// Unit Perron vector of `P_n`: `x_i ∝ sin(iπ/(n+1))`, `i = 1..n`.
pub fn path_top_eigenvector(n: usize) -> Result<Vec<f64>, SpectraError> {
    if n == 0 {
        return Err(SpectraError::EmptyPath);
    }
    let step = std::f64::consts::PI / (n as f64 + 1.0);
    let mut x: Vec<f64> = (1..=n).map(|i| (i as f64 * step).sin()).collect();
    let norm = norm2(&x);
    x.iter_mut().for_each(|v| *v /= norm);
    Ok(x)
}

/// `⟨f, Af⟩ / ⟨f, f⟩`.
pub fn rayleigh<A: SymmetricOperator + ?Sized>(a: &A, f: &[f64]) -> Result<f64, SpectraError> {
    if f.len() != a.dim() {
        return Err(SpectraError::DimensionMismatch {
            expected: a.dim(),
            found: f.len(),
        });
    }
    let ff = dot(f, f);
    if ff == 0.0 {
        return Err(SpectraError::ZeroVector);
    }
    Ok(dot(f, &apply_vec(a, f)) / ff)
}

/// Deterministic start vector `1 + frac(i · 2654435761 / 2³²)`.
fn start_vector(n: usize, salt: u64) -> Vec<f64> {
    (0..n as u64)
        .map(|i| {
            let h = (i.wrapping_add(salt.wrapping_mul(0x9E37_79B9))).wrapping_mul(2_654_435_761)
                % (1u64 << 32);
            1.0 + h as f64 / (1u64 << 32) as f64
        })
        .collect()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of Gram–Schmidt against every vector of every set in `sets`.
///
/// Both passes cover all sets: projecting out one set can reintroduce a
/// component along another, and a component along a deflated eigenvector
/// grows geometrically under repeated application of the shifted operator.
fn orthogonalize(w: &mut [f64], sets: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        for q in sets.iter().flat_map(|s| s.iter()) {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Largest eigenvalue of `A` (algebraically) with its eigenvector.
pub fn lambda1<A: SymmetricOperator + ?Sized>(
    a: &A,
    tol: f64,
) -> Result<EigenResult, SpectraError> {
    top_eigenpair(a, &[], LanczosOptions::with_tol(tol))
}

/// Largest eigenvalue of `A` restricted to the orthogonal complement of the
/// orthonormal vectors in `deflate`, which must span an invariant subspace.
///
/// Runs Lanczos with full reorthogonalization on `A + cI`, `c` the norm
/// bound, restarting from the current Ritz vector when the basis fills.
pub fn top_eigenpair<A: SymmetricOperator + ?Sized>(
    a: &A,
    deflate: &[Vec<f64>],
    opts: LanczosOptions,
) -> Result<EigenResult, SpectraError> {
    let n = a.dim();
    if n == 0 {
        return Err(SpectraError::EmptyOperator);
    }
    if deflate.len() >= n {
        return Err(SpectraError::NothingLeft {
            dim: n,
            deflated: deflate.len(),
        });
    }
    let shift = a.norm_bound();
    let scale = if shift > 0.0 { shift } else { 1.0 };
    let target = opts.tol * scale;
    let breakdown = 1e-13 * scale;
    let mut matvecs = 0usize;
    let mut last_residual = f64::INFINITY;
    let mut salt = 0u64;

    let mut start = start_vector(n, salt);
    orthogonalize(&mut start, &[deflate]);

    loop {
        let norm = norm2(&start);
        if norm <= 1e-8 * (n as f64).sqrt() {
            salt += 1;
            start = start_vector(n, salt);
            orthogonalize(&mut start, &[deflate]);
            continue;
        }
        start.iter_mut().for_each(|v| *v /= norm);

        let max_basis = opts.basis.min(n - deflate.len()).max(1);
        let mut basis: Vec<Vec<f64>> = vec![start];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut ritz: Option<(f64, Vec<f64>)> = None;

        loop {
            let j = basis.len() - 1;
            let mut w = apply_vec(a, &basis[j]);
            axpy(shift, &basis[j], &mut w);
            matvecs += 1;
            let alpha = dot(&basis[j], &w);
            alphas.push(alpha);
            orthogonalize(&mut w, &[deflate, &basis]);
            let beta = norm2(&w);

            let k = alphas.len();
            let full = k >= max_basis || beta <= breakdown;
            let check = full || k.is_multiple_of(8) || matvecs >= opts.max_matvecs;
            if check {
                let (theta, s) = top_ritz(&alphas, &betas);
                let estimate = beta * s[k - 1].abs();
                if full || estimate <= 0.1 * target || matvecs >= opts.max_matvecs {
                    ritz = Some((theta, s));
                }
            }
            if ritz.is_some() {
                break;
            }
            betas.push(beta);
            w.iter_mut().for_each(|v| *v /= beta);
            basis.push(w);
        }

        let (_, s) = ritz.unwrap();
        let mut y = vec![0.0; n];
        for (q, &c) in basis.iter().zip(&s) {
            axpy(c, q, &mut y);
        }
        orthogonalize(&mut y, &[deflate]);
        let ny = norm2(&y);
        y.iter_mut().for_each(|v| *v /= ny);
        let ay = apply_vec(a, &y);
        matvecs += 1;
        let value = dot(&y, &ay);
        let residual = norm2(
            &ay.iter()
                .zip(&y)
                .map(|(p, q)| p - value * q)
                .collect::<Vec<_>>(),
        );
        last_residual = residual.min(last_residual);
        if residual <= target {
            return Ok(EigenResult {
                value,
                vector: y,
                residual,
            });
        }
        if matvecs >= opts.max_matvecs {
            return Err(SpectraError::NotConverged {
                matvecs,
                residual: last_residual,
            });
        }
        start = y;
    }
}

/// Top eigenpair of the symmetric tridiagonal matrix (alphas, betas).
fn top_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    (
        theta,
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}

/// Second-largest adjacency eigenvalue of a connected graph.
///
/// For weight-regular graphs the all-ones vector is the top eigenvector and is
/// deflated directly; otherwise the computed top eigenvector is deflated.
pub fn lambda2(g: &WeightedGraph, tol: f64) -> Result<EigenResult, SpectraError> {
    if !g.is_connected() {
        return Err(SpectraError::Disconnected);
    }
    let n = g.vertex_count();
    if n < 2 {
        return Err(SpectraError::NothingLeft {
            dim: n,
            deflated: 1,
        });
    }
    let top = if regularity_of(&g.weighted_degrees(), DEFAULT_REGULARITY_TOL).is_some() {
        vec![1.0 / (n as f64).sqrt(); n]
    } else {
        lambda1(g, tol)?.vector
    };
    top_eigenpair(g, &[top], LanczosOptions::with_tol(tol))
}
