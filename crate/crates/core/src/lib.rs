//! Hybrid CAD representation toolkit.
//!
//! A solid is modeled as a set of faces, each either a tensor-product NURBS
//! surface or a planar region bounded by analytic primitive curves (lines,
//! circle/ellipse arcs, Bezier and B-spline curves). The crate covers the
//! full processing chain around that representation:
//!
//! * [`nurbs`]: knot vectors, Cox-de Boor basis evaluation, rational curve
//!   and surface evaluation, periodic-to-clamped conversion.
//! * [`primitives`]: analytic curves, conversion to exact rational NURBS,
//!   planar-face triangulation.
//! * [`document`]: the JSON interchange format (parse, validate, canonical
//!   serialization with run-length weight compression).
//! * [`mesh`]: adaptive tessellation, vertex welding, normalization, seeded
//!   area-weighted surface sampling, OBJ/STL/XYZ/PLY export.
//! * [`topo`]: bounding boxes, surface area, signed volume, Euler
//!   characteristic and genus, per-part metadata.
//! * [`metrics`]: Chamfer/Hausdorff distances, Jensen-Shannon divergence,
//!   minimum matching distance, invalidity ratio.
//! * [`curation`]: representation selection, token counting, complexity
//!   scoring and tiered corpus sampling.

pub mod curation;
pub mod document;
pub mod mesh;
pub mod metrics;
pub mod nurbs;
pub mod primitives;
pub mod shapes;
pub mod topo;

pub use document::{FaceRecord, SolidDocument};
pub use mesh::{PointCloud, TriMesh};
pub use metrics::MetricReport;
pub use nurbs::{KnotVector, NurbsCurve, NurbsSurface};
pub use primitives::PrimitiveFace;
pub use topo::MetadataRecord;

/// 3D point with f64 coordinates.
pub type Point3 = nalgebra::Point3<f64>;
/// 3D vector with f64 coordinates.
pub type Vec3 = nalgebra::Vector3<f64>;
