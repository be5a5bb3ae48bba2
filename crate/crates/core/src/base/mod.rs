//! The base almost Norden manifold: charts, pointwise models and their tensors.

pub mod chart;
pub mod geometry;
pub mod pointwise;
pub mod validate;

pub use chart::ChartManifold;
pub use geometry::{point_geometry, point_geometry_with_order, Connection, PointGeometry};
pub use pointwise::{HSphereParams, PointwiseModel, Provenance};
pub use validate::{validate_structure, StructureReport};
