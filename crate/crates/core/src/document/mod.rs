//! The hybrid CAD JSON document: a solid described as an ordered sequence of
//! face records, each either a full NURBS surface or one analytic primitive
//! boundary curve of a planar face. Runs of consecutive coplanar primitive
//! records form one planar face; its loops are recovered by chaining curve
//! endpoints. The normative schema lives in docs/FORMAT.md.

use crate::nurbs::NurbsSurface;
use crate::primitives::{PrimitiveCurve, PLANARITY_TOLERANCE};
use crate::Point3;

mod canon;
mod parse;
mod validate;

pub(crate) use canon::fmt_real;
pub use canon::serialize_document;
pub use parse::{parse_document, parse_document_with_warnings};
pub use validate::{validate_document, validate_text, Violation};

#[derive(Debug, Clone, thiserror::Error)]
pub enum DocumentError {
    #[error("JSON syntax error: {0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl DocumentError {
    pub(crate) fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocumentError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// One entry of the document's face list.
#[derive(Debug, Clone, PartialEq)]
pub enum FaceRecord {
    Surface(NurbsSurface),
    Curve(PrimitiveCurve),
}

impl FaceRecord {
    /// The value of the record's `type` discriminator.
    pub fn kind(&self) -> &'static str {
        match self {
            FaceRecord::Surface(_) => "nurbs",
            FaceRecord::Curve(PrimitiveCurve::Line(_)) => "line",
            FaceRecord::Curve(PrimitiveCurve::Circle(_)) => "circle",
            FaceRecord::Curve(PrimitiveCurve::Ellipse(_)) => "ellipse",
            FaceRecord::Curve(PrimitiveCurve::Bezier(_)) => "bezier",
            FaceRecord::Curve(PrimitiveCurve::Bspline(_)) => "bspline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolidDocument {
    name: Option<String>,
    faces: Vec<FaceRecord>,
}

/// A tessellation unit: one NURBS face record, or a maximal run of
/// consecutive coplanar primitive records forming one planar face.
#[derive(Debug)]
pub struct FaceGroup<'a> {
    pub first_index: usize,
    pub count: usize,
    pub kind: FaceGroupKind<'a>,
}

#[derive(Debug)]
pub enum FaceGroupKind<'a> {
    Surface(&'a NurbsSurface),
    Planar(Vec<&'a PrimitiveCurve>),
}

/// Points that determine the curve's plane exactly: endpoints for lines,
/// center plus on-arc points for conics, poles for bezier/bspline (a rational
/// curve with positive weights is planar iff its poles are).
fn plane_samples(curve: &PrimitiveCurve) -> Vec<Point3> {
    match curve {
        PrimitiveCurve::Line(l) => vec![l.start, l.end],
        PrimitiveCurve::Circle(c) => {
            let mut pts = vec![c.center];
            let sweep = c.last - c.first;
            for k in 0..4 {
                let t = c.first + sweep * k as f64 / 3.0;
                pts.push(c.point(t.min(c.last)).expect("arc point within range"));
            }
            pts
        }
        PrimitiveCurve::Ellipse(e) => {
            let mut pts = vec![e.center];
            let sweep = e.last - e.first;
            for k in 0..4 {
                let t = e.first + sweep * k as f64 / 3.0;
                pts.push(e.point(t.min(e.last)).expect("arc point within range"));
            }
            pts
        }
        PrimitiveCurve::Bezier(b) => b.poles().to_vec(),
        PrimitiveCurve::Bspline(c) => c.poles().to_vec(),
    }
}

/// Whether the point set fits one plane within [`PLANARITY_TOLERANCE`].
/// Sets with no definite plane (coincident or collinear) trivially do.
fn coplanar(points: &[Point3]) -> bool {
    let Some(&p0) = points.first() else {
        return true;
    };
    let Some(p1) = points
        .iter()
        .max_by(|a, b| (*a - p0).norm().partial_cmp(&(*b - p0).norm()).unwrap())
    else {
        return true;
    };
    let dir = p1 - p0;
    if dir.norm() <= PLANARITY_TOLERANCE {
        return true;
    }
    let cross_with = |q: &Point3| dir.cross(&(q - p0));
    let Some(p2) = points
        .iter()
        .max_by(|a, b| {
            cross_with(a)
                .norm()
                .partial_cmp(&cross_with(b).norm())
                .unwrap()
        })
    else {
        return true;
    };
    let cross = cross_with(p2);
    if cross.norm() / dir.norm() <= PLANARITY_TOLERANCE {
        return true; // collinear set
    }
    let n = cross.normalize();
    points
        .iter()
        .all(|q| (q - p0).dot(&n).abs() <= PLANARITY_TOLERANCE)
}

impl SolidDocument {
    pub fn new(name: Option<String>, faces: Vec<FaceRecord>) -> Result<Self, DocumentError> {
        if faces.is_empty() {
            return Err(DocumentError::at("faces", "document needs at least one face"));
        }
        Ok(SolidDocument { name, faces })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn faces(&self) -> &[FaceRecord] {
        &self.faces
    }

    /// Partition the face list into tessellation units. Consecutive primitive
    /// records stay in one group while their defining points remain coplanar.
    pub fn face_groups(&self) -> Vec<FaceGroup<'_>> {
        fn flush<'a>(
            groups: &mut Vec<FaceGroup<'a>>,
            start: usize,
            curves: &mut Vec<&'a PrimitiveCurve>,
        ) {
            if !curves.is_empty() {
                groups.push(FaceGroup {
                    first_index: start,
                    count: curves.len(),
                    kind: FaceGroupKind::Planar(std::mem::take(curves)),
                });
            }
        }

        let mut groups = Vec::new();
        let mut start = 0usize;
        let mut curves: Vec<&PrimitiveCurve> = Vec::new();
        let mut samples: Vec<Point3> = Vec::new();

        for (i, face) in self.faces.iter().enumerate() {
            match face {
                FaceRecord::Surface(s) => {
                    flush(&mut groups, start, &mut curves);
                    samples.clear();
                    groups.push(FaceGroup {
                        first_index: i,
                        count: 1,
                        kind: FaceGroupKind::Surface(s),
                    });
                }
                FaceRecord::Curve(c) => {
                    let cs = plane_samples(c);
                    if curves.is_empty() {
                        start = i;
                        samples = cs;
                        curves.push(c);
                    } else {
                        let mut combined = samples.clone();
                        combined.extend_from_slice(&cs);
                        if coplanar(&combined) {
                            samples = combined;
                            curves.push(c);
                        } else {
                            flush(&mut groups, start, &mut curves);
                            start = i;
                            samples = cs;
                            curves.push(c);
                        }
                    }
                }
            }
        }
        flush(&mut groups, start, &mut curves);
        groups
    }
}
