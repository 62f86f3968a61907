//! Brute-force references used to cross-check the fast paths at small scale.
//!
//! Nothing here shares code with the cover, markov or spectra modules: walks
//! are enumerated by plain recursion over the adjacency lists and spectra are
//! computed by cyclic Jacobi rotations on a dense matrix.

use thiserror::Error;

use crate::graph::WeightedGraph;

pub const MAX_DENSE_DIM: usize = 2000;
pub const DEFAULT_JACOBI_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("walk enumeration exceeds the budget of {0} walks")]
    BudgetExceeded(usize),
    #[error("vertex {0} out of range")]
    InvalidVertex(usize),
    #[error("dense eigensolver limited to dimension {MAX_DENSE_DIM}, got {0}")]
    TooLarge(usize),
    #[error("matrix is not square or not symmetric")]
    NotSymmetric,
    #[error("value {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    #[error("no values")]
    Empty,
    #[error("Jensen inequality violated: sum {lhs} < n·f(mean) {rhs}")]
    JensenViolated { lhs: f64, rhs: f64 },
}

/// All non-backtracking walks of length `0..=r` from `v`, grouped by length.
pub fn enumerate_nb_walks(
    g: &WeightedGraph,
    v: usize,
    r: usize,
    budget: usize,
) -> Result<Vec<Vec<Vec<usize>>>, OracleError> {
    if v >= g.vertex_count() {
        return Err(OracleError::InvalidVertex(v));
    }
    fn extend(
        g: &WeightedGraph,
        walk: &mut Vec<usize>,
        r: usize,
        out: &mut [Vec<Vec<usize>>],
        count: &mut usize,
        budget: usize,
    ) -> Result<(), OracleError> {
        *count += 1;
        if *count > budget {
            return Err(OracleError::BudgetExceeded(budget));
        }
        let len = walk.len() - 1;
        out[len].push(walk.clone());
        if len == r {
            return Ok(());
        }
        let last = *walk.last().unwrap();
        let before = if len >= 1 { Some(walk[len - 1]) } else { None };
        for &(next, _) in g.neighbors(last) {
            if Some(next) == before {
                continue;
            }
            walk.push(next);
            extend(g, walk, r, out, count, budget)?;
            walk.pop();
        }
        Ok(())
    }
    let mut out = vec![Vec::new(); r + 1];
    let mut count = 0;
    extend(g, &mut vec![v], r, &mut out, &mut count, budget)?;
    Ok(out)
}

/// Dense weighted adjacency matrix.
pub fn dense_adjacency(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.u][e.v] = e.weight;
        a[e.v][e.u] = e.weight;
    }
    a
}

/// Eigenvalues sorted descending, with matching orthonormal eigenvectors
/// (as columns, `vectors[k]` is the k-th eigenvector) when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSpectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Cyclic Jacobi eigenvalue algorithm, sweeping until the off-diagonal
/// Frobenius norm drops below `tol · ‖A‖_F`.
#[allow(clippy::needless_range_loop)]
pub fn dense_eigs(
    matrix: &[Vec<f64>],
    tol: f64,
    keep_vectors: bool,
) -> Result<DenseSpectrum, OracleError> {
    let n = matrix.len();
    if n > MAX_DENSE_DIM {
        return Err(OracleError::TooLarge(n));
    }
    if matrix.iter().any(|row| row.len() != n) {
        return Err(OracleError::NotSymmetric);
    }
    for i in 0..n {
        for j in 0..i {
            if matrix[i][j] != matrix[j][i] {
                return Err(OracleError::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off(&a) <= tol * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                if keep_vectors {
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = keep_vectors.then(|| {
        order
            .iter()
            .map(|&k| (0..n).map(|i| v[i][k]).collect())
            .collect()
    });
    Ok(DenseSpectrum { values, vectors })
}

/// `(Σ f(vᵢ), n · f(mean))` for values in `[lo, hi]`, failing when the sum
/// falls below `n · f(mean)` by more than rounding.
pub fn jensen_gap<F: Fn(f64) -> f64>(
    values: &[f64],
    f: F,
    domain: (f64, f64),
) -> Result<(f64, f64), OracleError> {
    if values.is_empty() {
        return Err(OracleError::Empty);
    }
    let (lo, hi) = domain;
    for &value in values {
        if !(value >= lo && value <= hi) {
            return Err(OracleError::OutOfDomain { value, lo, hi });
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let lhs: f64 = values.iter().map(|&x| f(x)).sum();
    let rhs = n * f(mean);
    if lhs < rhs - 1e-12 * rhs.abs().max(1.0) {
        return Err(OracleError::JensenViolated { lhs, rhs });
    }
    Ok((lhs, rhs))
}
