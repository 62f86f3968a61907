//! Lower bounds on the spectral radius of unraveled balls of weighted graphs,
//! checked numerically and witnessed by explicit Rayleigh vectors.
//!
//! - [`graph`]: weighted graphs, the edge-list format, directed edges and
//!   the prolongation relation.
//! - [`cover`]: unraveled balls, ordinary balls, residuals and peeled cores.
//! - [`markov`]: stationary chains on directed edges.
//! - [`spectra`]: Lanczos eigensolver and path spectra.
//! - [`bounds`]: right-hand sides of the bounds and the curve constants.
//! - [`certify`]: test vectors and vertex searches.
//! - [`oracle`]: brute-force references.
//! - [`generators`]: deterministic graph families.

pub mod bounds;
pub mod certify;
pub mod cover;
pub mod generators;
pub mod graph;
pub mod markov;
pub mod numeric;
pub mod oracle;
pub mod rng;
pub mod spectra;

pub use graph::{directed_edges, parse_graph, DirectedEdge, DirectedEdgeSet, WeightedGraph};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Cover(#[from] cover::CoverError),
    #[error(transparent)]
    Markov(#[from] markov::MarkovError),
    #[error(transparent)]
    Spectra(#[from] spectra::SpectraError),
    #[error(transparent)]
    Bounds(#[from] bounds::BoundsError),
    #[error(transparent)]
    Certify(#[from] certify::CertifyError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Generator(#[from] generators::GeneratorError),
}
