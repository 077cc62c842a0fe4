//! Induced filletings of a pattern graph in massed graphs, with certificates.
//!
//! Given a massed graph `(G, μ)`, a pattern `(H, P)` and a threshold `ε`, the
//! search returns either an induced subgraph of `G` that is a `P`-filleting of
//! `H`, or a concrete witness that `(G, μ)` is not `ε`-coherent. Every output
//! can be re-checked with [`oracle::verify_certificate`].

pub mod cli;
pub mod coherence;
pub mod engine;
pub mod error;
pub mod graph;
pub mod mass;
pub mod oracle;
pub mod pattern;
pub mod reduction;
pub mod scalar;
pub mod vertex_set;

pub use error::{Error, Result};
pub use graph::Graph;
pub use mass::{Mass, MassedGraph};
pub use scalar::Scalar;
pub use vertex_set::VertexSet;

/// Exact rational scalar used for certificates.
pub type Rational = num_rational::BigRational;
/// Massed graph with exact masses.
pub type MassedGraphQ = MassedGraph<Rational>;
/// Massed graph with `f64` masses, for quick sweeps.
pub type MassedGraphF = MassedGraph<f64>;
