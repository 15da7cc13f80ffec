//! Rational B-spline (NURBS) curves and surfaces.
//!
//! Knot vectors are kept in distinct-knot + multiplicity form. Basis values
//! follow the Cox-de Boor recursion with the `0/0 := 0` convention; the
//! parametric domain of a curve with expanded knots `U`, degree `p` and `n+1`
//! poles is `[U[p], U[n+1]]`, closed on both ends (the right endpoint is
//! evaluated over the final positive-width span, so clamped curves
//! interpolate their last pole).
//!
//! Periodic curves and surfaces are evaluated through a single path: they are
//! first converted to an equivalent clamped non-periodic form by
//! [`NurbsCurve::unperiodize`] / [`NurbsSurface::unperiodize`] (knot unrolling
//! plus wrap-duplication of poles, followed by end-knot insertion).

mod basis;
mod convert;
mod curve;
mod knots;
mod surface;

pub use basis::basis_functions;
pub use curve::NurbsCurve;
pub use knots::KnotVector;
pub use surface::NurbsSurface;

use thiserror::Error;

/// Errors raised by NURBS construction and evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NurbsError {
    /// Ill-formed structure: pole/knot/weight counts, multiplicities, degrees.
    #[error("invalid NURBS structure: {0}")]
    Structure(String),
    /// Parameter outside the evaluable range.
    #[error("parameter {param} outside domain [{min}, {max}]")]
    Domain { param: f64, min: f64, max: f64 },
    /// The knot vector leaves no positive-width span to evaluate on.
    #[error("degenerate parametric domain of zero width")]
    DegenerateDomain,
    /// Internal invariant violation (should not occur on validated input).
    #[error("internal evaluation error: {0}")]
    Internal(String),
}
