//! Discrete curvature flows on closed curves and surfaces, with spectral
//! tracking of the first nonzero eigenvalue of a weighted Laplacian.
//!
//! The crate evolves polygonal curves in the plane and triangulated closed
//! surfaces in space under a family of curvature-driven speed laws
//! (mean-curvature flow, its volume-preserving variant, powers of the mean
//! curvature, and a squared-curvature volume-preserving flow). Along each
//! flow it assembles the weighted stiffness/mass pair for a measure
//! `e^{-phi} dA`, solves for the first nonzero eigenvalue, and checks the
//! monotonicity statements that the eigenvalue satisfies under curvature
//! pinching hypotheses.
//!
//! Module map:
//! - [`mesh`]: curve/surface containers, generators, pointwise geometry
//!   (normals, curvatures, shape operators, dual areas) and file I/O.
//! - [`flow`]: speed laws, explicit stepping, adaptive time steps, and the
//!   trace recorder produced by [`flow::evolve`].
//! - [`spectral`]: weighted stiffness/mass assembly and the deflated inverse
//!   iteration eigensolver.
//! - [`monotonicity`]: the eigenvalue variation formula, finite-difference
//!   cross checks, and theorem verdicts.
//! - [`oracle`]: closed-form shrinking-sphere reference solution.
//! - [`cli`]: experiment configs, command entry points, and SVG plotting.

// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
// alongside out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flow;
pub mod mesh;
pub mod monotonicity;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
