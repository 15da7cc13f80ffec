//! Analytic primitive curves and planar primitive faces.
//!
//! Degenerate BRep faces are carried as analytic boundary curves instead of
//! NURBS patches. Every curve kind converts to an exact rational NURBS form
//! via [`PrimitiveCurve::to_nurbs`]; conic arcs become piecewise rational
//! quadratics with at most 90 degrees of sweep per segment and knot values in
//! angle units. Within a segment the rational parameter is not the arc angle
//! (no rational curve is angle-parameterized), so agreement with the analytic
//! arc is geometric: converted samples lie on the conic to within 1e-9 and
//! hit the segment boundaries at the exact angles.

mod face;

pub use face::triangulate_planar_face;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nurbs::{KnotVector, NurbsCurve, NurbsError};
use crate::{Point3, Vec3};

/// Maximum in-plane deviation allowed when fitting the face plane.
pub const PLANARITY_TOLERANCE: f64 = 1e-6;
/// Gap tolerance for boundary-loop closure.
pub const LOOP_CLOSURE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Error)]
pub enum PrimitiveError {
    #[error("invalid primitive: {0}")]
    Structure(String),
    #[error("parameter {param} outside range [{min}, {max}]")]
    Domain { param: f64, min: f64, max: f64 },
    #[error("open boundary loop: {0}")]
    OpenLoop(String),
    #[error("unsupported face: {0}")]
    UnsupportedFace(String),
    #[error(transparent)]
    Nurbs(#[from] NurbsError),
}

/// Deterministic in-plane frame for a plane with the given normal: the x axis
/// is the normalized projection onto the plane of the global axis least
/// aligned with the normal (ties prefer x, then y, then z); the y axis is
/// `normal x x_axis`.
pub fn plane_frame(normal: &Vec3) -> Result<(Vec3, Vec3), PrimitiveError> {
    let norm = normal.norm();
    if norm <= 1e-12 {
        return Err(PrimitiveError::Structure(
            "plane normal must be non-zero".into(),
        ));
    }
    let n = normal / norm;
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let dots = [n.x.abs(), n.y.abs(), n.z.abs()];
    let mut least = 0;
    for i in 1..3 {
        if dots[i] < dots[least] {
            least = i;
        }
    }
    let e = axes[least];
    let x = (e - n * e.dot(&n)).normalize();
    let y = n.cross(&x);
    Ok((x, y))
}

fn check_unit_normal(normal: &Vec3) -> Result<Vec3, PrimitiveError> {
    let norm = normal.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(PrimitiveError::Structure(format!(
            "normal must be a unit vector, |n| = {norm}"
        )));
    }
    Ok(normal / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    pub start: Point3,
    pub end: Point3,
}

impl LineSegment {
    pub fn new(start: Point3, end: Point3) -> Result<Self, PrimitiveError> {
        if (end - start).norm() <= 1e-12 {
            return Err(PrimitiveError::Structure(
                "degenerate line segment of zero length".into(),
            ));
        }
        Ok(Self { start, end })
    }

    /// Point at `t` in `[0, 1]`.
    pub fn point(&self, t: f64) -> Result<Point3, PrimitiveError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(PrimitiveError::Domain {
                param: t,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(self.start + (self.end - self.start) * t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub center: Point3,
    pub normal: Vec3,
    pub radius: f64,
    pub first: f64,
    pub last: f64,
}

impl CircleArc {
    pub fn new(
        center: Point3,
        normal: Vec3,
        radius: f64,
        first: f64,
        last: f64,
    ) -> Result<Self, PrimitiveError> {
        let normal = check_unit_normal(&normal)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(PrimitiveError::Structure(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        if !(first < last) || last > first + std::f64::consts::TAU + 1e-12 {
            return Err(PrimitiveError::Structure(format!(
                "arc range must satisfy first < last <= first + 2 pi, got [{first}, {last}]"
            )));
        }
        Ok(Self {
            center,
            normal,
            radius,
            first,
            last,
        })
    }

    pub fn is_full(&self) -> bool {
        (self.last - self.first - std::f64::consts::TAU).abs() <= 1e-9
    }

    /// Point at angle `t` (radians) in `[first, last]`.
    pub fn point(&self, t: f64) -> Result<Point3, PrimitiveError> {
        if t < self.first || t > self.last {
            return Err(PrimitiveError::Domain {
                param: t,
                min: self.first,
                max: self.last,
            });
        }
        let (x, y) = plane_frame(&self.normal)?;
        Ok(self.center + (x * t.cos() + y * t.sin()) * self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseArc {
    pub center: Point3,
    pub normal: Vec3,
    pub major_radius: f64,
    pub minor_radius: f64,
    pub first: f64,
    pub last: f64,
}

impl EllipseArc {
    pub fn new(
        center: Point3,
        normal: Vec3,
        major_radius: f64,
        minor_radius: f64,
        first: f64,
        last: f64,
    ) -> Result<Self, PrimitiveError> {
        let normal = check_unit_normal(&normal)?;
        if !(minor_radius > 0.0) || !(major_radius >= minor_radius) || !major_radius.is_finite() {
            return Err(PrimitiveError::Structure(format!(
                "ellipse radii must satisfy major >= minor > 0, got {major_radius}, {minor_radius}"
            )));
        }
        if !(first < last) || last > first + std::f64::consts::TAU + 1e-12 {
            return Err(PrimitiveError::Structure(format!(
                "arc range must satisfy first < last <= first + 2 pi, got [{first}, {last}]"
            )));
        }
        Ok(Self {
            center,
            normal,
            major_radius,
            minor_radius,
            first,
            last,
        })
    }

    /// Point at parametric angle `t` in `[first, last]`.
    pub fn point(&self, t: f64) -> Result<Point3, PrimitiveError> {
        if t < self.first || t > self.last {
            return Err(PrimitiveError::Domain {
                param: t,
                min: self.first,
                max: self.last,
            });
        }
        let (x, y) = plane_frame(&self.normal)?;
        Ok(self.center + x * (self.major_radius * t.cos()) + y * (self.minor_radius * t.sin()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezierCurve {
    poles: Vec<Point3>,
    degree: usize,
    first: f64,
    last: f64,
}

impl BezierCurve {
    pub fn new(
        poles: Vec<Point3>,
        degree: usize,
        first: f64,
        last: f64,
    ) -> Result<Self, PrimitiveError> {
        if degree == 0 {
            return Err(PrimitiveError::Structure(
                "Bezier degree must be >= 1".into(),
            ));
        }
        if poles.len() != degree + 1 {
            return Err(PrimitiveError::Structure(format!(
                "Bezier of degree {degree} needs {} poles, got {}",
                degree + 1,
                poles.len()
            )));
        }
        if !(0.0..=1.0).contains(&first) || !(0.0..=1.0).contains(&last) || first >= last {
            return Err(PrimitiveError::Structure(format!(
                "Bezier range must satisfy 0 <= first < last <= 1, got [{first}, {last}]"
            )));
        }
        Ok(Self {
            poles,
            degree,
            first,
            last,
        })
    }

    pub fn poles(&self) -> &[Point3] {
        &self.poles
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn first(&self) -> f64 {
        self.first
    }

    pub fn last(&self) -> f64 {
        self.last
    }

    /// Point at `t` in `[first, last]` by de Casteljau reduction.
    pub fn point(&self, t: f64) -> Result<Point3, PrimitiveError> {
        if t < self.first || t > self.last {
            return Err(PrimitiveError::Domain {
                param: t,
                min: self.first,
                max: self.last,
            });
        }
        let mut pts: Vec<Vec3> = self.poles.iter().map(|p| p.coords).collect();
        for level in (1..pts.len()).rev() {
            for i in 0..level {
                pts[i] = pts[i] * (1.0 - t) + pts[i + 1] * t;
            }
        }
        Ok(Point3::from(pts[0]))
    }
}

/// Any analytic primitive curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PrimitiveCurve {
    Line(LineSegment),
    Circle(CircleArc),
    Ellipse(EllipseArc),
    Bezier(BezierCurve),
    Bspline(NurbsCurve),
}

impl PrimitiveCurve {
    /// Parameter range evaluable for this curve.
    pub fn param_range(&self) -> (f64, f64) {
        match self {
            PrimitiveCurve::Line(_) => (0.0, 1.0),
            PrimitiveCurve::Circle(c) => (c.first, c.last),
            PrimitiveCurve::Ellipse(e) => (e.first, e.last),
            PrimitiveCurve::Bezier(b) => (b.first, b.last),
            PrimitiveCurve::Bspline(c) => (c.first(), c.last()),
        }
    }

    /// Point on the curve at parameter `t`.
    pub fn point(&self, t: f64) -> Result<Point3, PrimitiveError> {
        match self {
            PrimitiveCurve::Line(l) => l.point(t),
            PrimitiveCurve::Circle(c) => c.point(t),
            PrimitiveCurve::Ellipse(e) => e.point(t),
            PrimitiveCurve::Bezier(b) => b.point(t),
            PrimitiveCurve::Bspline(c) => Ok(c.point(t)?),
        }
    }

    pub fn start_point(&self) -> Result<Point3, PrimitiveError> {
        self.point(self.param_range().0)
    }

    pub fn end_point(&self) -> Result<Point3, PrimitiveError> {
        self.point(self.param_range().1)
    }

    /// Convert to an exact rational NURBS curve.
    ///
    /// Lines become degree-1 curves on `[0, 1]`; Bezier curves become clamped
    /// curves with knots `[0, 1]` and end multiplicity `degree + 1`; B-splines
    /// pass through unchanged. Conic arcs become piecewise rational quadratics
    /// (one segment per 90 degrees of sweep, mid-pole weight `cos(half sweep)`)
    /// with knots at the segment angles; a full circle yields the 9-pole form.
    pub fn to_nurbs(&self) -> Result<NurbsCurve, PrimitiveError> {
        match self {
            PrimitiveCurve::Line(l) => Ok(NurbsCurve::polynomial(
                vec![l.start, l.end],
                1,
                KnotVector::new(vec![0.0, 1.0], vec![2, 2])?,
                0.0,
                1.0,
            )?),
            PrimitiveCurve::Bezier(b) => {
                let p = b.degree as u32;
                Ok(NurbsCurve::polynomial(
                    b.poles.clone(),
                    b.degree,
                    KnotVector::new(vec![0.0, 1.0], vec![p + 1, p + 1])?,
                    b.first,
                    b.last,
                )?)
            }
            PrimitiveCurve::Bspline(c) => Ok(c.clone()),
            PrimitiveCurve::Circle(c) => {
                let (x, y) = plane_frame(&c.normal)?;
                conic_to_nurbs(c.first, c.last, |angle, scale| {
                    c.center + (x * angle.cos() + y * angle.sin()) * (c.radius * scale)
                })
            }
            PrimitiveCurve::Ellipse(e) => {
                let (x, y) = plane_frame(&e.normal)?;
                conic_to_nurbs(e.first, e.last, |angle, scale| {
                    e.center
                        + x * (e.major_radius * angle.cos() * scale)
                        + y * (e.minor_radius * angle.sin() * scale)
                })
            }
        }
    }
}

/// Build the piecewise rational quadratic for a conic arc. `eval(angle, s)`
/// must return the affine image of `s * (cos angle, sin angle)`; corner poles
/// use `s = 1`, mid poles use `s = 1 / cos(half segment sweep)`.
fn conic_to_nurbs<F>(first: f64, last: f64, eval: F) -> Result<NurbsCurve, PrimitiveError>
where
    F: Fn(f64, f64) -> Point3,
{
    let sweep = last - first;
    let segments = ((sweep / std::f64::consts::FRAC_PI_2) - 1e-9).ceil().max(1.0) as usize;
    let step = sweep / segments as f64;
    let w = (step / 2.0).cos();

    let mut poles = Vec::with_capacity(2 * segments + 1);
    let mut weights = Vec::with_capacity(2 * segments + 1);
    let mut knots = Vec::with_capacity(segments + 1);
    let mut mults = Vec::with_capacity(segments + 1);
    poles.push(eval(first, 1.0));
    weights.push(1.0);
    knots.push(first);
    mults.push(3);
    for s in 0..segments {
        let a0 = first + step * s as f64;
        let a1 = if s + 1 == segments {
            last
        } else {
            first + step * (s + 1) as f64
        };
        let mid = 0.5 * (a0 + a1);
        poles.push(eval(mid, 1.0 / w));
        weights.push(w);
        poles.push(eval(a1, 1.0));
        weights.push(1.0);
        knots.push(a1);
        mults.push(if s + 1 == segments { 3 } else { 2 });
    }
    Ok(NurbsCurve::new(
        poles,
        weights,
        2,
        KnotVector::new(knots, mults)?,
        false,
        first,
        last,
    )?)
}

/// A planar face bounded by one or more closed loops of primitive curves.
///
/// Curves are chained in order: each curve must start where the previous one
/// ended (within [`LOOP_CLOSURE_TOLERANCE`]); when the chain returns to the
/// loop's starting point the loop closes and the next curve begins a new loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveFace {
    curves: Vec<PrimitiveCurve>,
    loop_sizes: Vec<usize>,
}

impl PrimitiveFace {
    pub fn new(curves: Vec<PrimitiveCurve>) -> Result<Self, PrimitiveError> {
        if curves.is_empty() {
            return Err(PrimitiveError::OpenLoop(
                "face has no boundary curves".into(),
            ));
        }
        let mut loop_sizes = Vec::new();
        let mut loop_start: Option<Point3> = None;
        let mut chain_end = Point3::origin();
        let mut size = 0usize;
        for (k, curve) in curves.iter().enumerate() {
            let s = curve.start_point()?;
            let e = curve.end_point()?;
            match loop_start {
                None => {
                    loop_start = Some(s);
                }
                Some(_) => {
                    if (s - chain_end).norm() > LOOP_CLOSURE_TOLERANCE {
                        return Err(PrimitiveError::OpenLoop(format!(
                            "curve {k} starts away from the previous curve's end \
                             (gap {:.3e})",
                            (s - chain_end).norm()
                        )));
                    }
                }
            }
            chain_end = e;
            size += 1;
            if (chain_end - loop_start.unwrap()).norm() <= LOOP_CLOSURE_TOLERANCE {
                loop_sizes.push(size);
                size = 0;
                loop_start = None;
            }
        }
        if loop_start.is_some() {
            return Err(PrimitiveError::OpenLoop(format!(
                "final loop never returns to its starting point (gap {:.3e})",
                (chain_end - loop_start.unwrap()).norm()
            )));
        }
        Ok(Self { curves, loop_sizes })
    }

    pub fn curves(&self) -> &[PrimitiveCurve] {
        &self.curves
    }

    /// Boundary loops as slices of the curve list.
    pub fn loops(&self) -> Vec<&[PrimitiveCurve]> {
        let mut out = Vec::with_capacity(self.loop_sizes.len());
        let mut offset = 0;
        for &n in &self.loop_sizes {
            out.push(&self.curves[offset..offset + n]);
            offset += n;
        }
        out
    }
}
