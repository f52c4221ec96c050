//! Exact geometry on the dyadic compactification of a rooted locally finite
//! tree.
//!
//! The tree's edges shrink geometrically (the edge into a depth-k vertex has
//! length 2^-k), which keeps every vertex within distance 1 of the root and
//! places the boundary rays at distance exactly 1. Everything is computed in
//! exact dyadic arithmetic: distances, Gromov products, boundary metrics,
//! projections onto truncation balls, and the retraction certificates that
//! witness the homotopy control bound.
//!
//! Modules:
//! - [`dyadic`]: the closed number system, arbitrary-precision m / 2^k.
//! - [`tree`]: explicit and automaton-described rooted trees.
//! - [`geometry`]: points, the metric, geodesics, the Gromov product.
//! - [`boundary`]: eventually periodic rays, the extended product, and the
//!   unified metric on tree plus boundary.
//! - [`transfer`]: truncation complexes, projections, the retraction
//!   homotopy, and machine-checkable certificates.
//! - [`verify`]: deterministic seeded samplers and exact invariant suites.
//! - [`render`]: radial SVG embedding of the compactified tree.

pub mod boundary;
pub mod dyadic;
pub mod error;
pub mod geometry;
pub mod render;
pub mod transfer;
pub mod tree;
pub mod verify;

pub use boundary::{ExtPoint, LcpDepth, Ray};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use geometry::Point;
pub use transfer::{Complex1D, Delta, TransferCertificate};
pub use tree::{TreeSpec, ValidationReport, VertexAddress};
pub use verify::{SampleConfig, SuiteReport, Verdict};
