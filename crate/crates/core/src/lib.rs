//! Almost hypercomplex Hermitian-Norden structures on tangent bundles.
//!
//! The base is an almost Norden manifold `(M, J, g)` given either by a chart
//! ([`base::ChartManifold`]) or by numeric tensors at a point
//! ([`base::PointwiseModel`]). [`lift`] evaluates the closed-form structure
//! `(J₁, J₂, J₃, ĝ)` on `TM`, and [`oracle`] recomputes the same quantities by
//! brute force in induced coordinates `(x, y)` on `TM`.

pub mod base;
pub mod error;
pub mod expr;
pub mod hsphere;
pub mod jet;
pub mod lift;
pub mod linalg;
pub mod oracle;
pub mod suite;

pub use error::{Error, Result};
