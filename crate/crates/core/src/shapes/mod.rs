//! Canonical solids used across tests, benchmarks, and examples: exact
//! rational NURBS documents for the cube, cylinder, sphere, and washer, a
//! primitive-record plate, and direct triangle meshes of higher-genus
//! surfaces.
//!
//! Adjacent faces share their boundary curves pole-for-pole, so their
//! tessellations sample identical rim points and welding closes the solid.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::document::{DocumentError, FaceRecord, SolidDocument};
use crate::mesh::TriMesh;
use crate::nurbs::{KnotVector, NurbsSurface};
use crate::primitives::{CircleArc, LineSegment, PrimitiveCurve};
use crate::{Point3, Vec3};

/// Unit-circle pole directions in the xy-plane: a clamped rational
/// quadratic of four quarter arcs.
const CIRCLE_XY: [[f64; 2]; 9] = [
    [1.0, 0.0],
    [1.0, 1.0],
    [0.0, 1.0],
    [-1.0, 1.0],
    [-1.0, 0.0],
    [-1.0, -1.0],
    [0.0, -1.0],
    [1.0, -1.0],
    [1.0, 0.0],
];

fn circle_weights() -> Vec<f64> {
    (0..9)
        .map(|i| if i % 2 == 0 { 1.0 } else { FRAC_1_SQRT_2 })
        .collect()
}

fn circle_knots() -> KnotVector {
    KnotVector::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![3, 2, 2, 2, 3])
        .expect("full-circle knot vector")
}

fn line_knots() -> KnotVector {
    KnotVector::new(vec![0.0, 1.0], vec![2, 2]).expect("line knot vector")
}

fn circle_poles(radius: f64, z: f64) -> Vec<Point3> {
    CIRCLE_XY
        .iter()
        .map(|[x, y]| Point3::new(radius * x, radius * y, z))
        .collect()
}

fn surface_record(
    poles: Vec<Vec<Point3>>,
    weights: Vec<Vec<f64>>,
    u_degree: usize,
    v_degree: usize,
    u_knots: KnotVector,
    v_knots: KnotVector,
) -> FaceRecord {
    FaceRecord::Surface(
        NurbsSurface::new(poles, weights, u_degree, v_degree, u_knots, v_knots, false, false)
            .expect("fixture surface"),
    )
}

/// Ruled surface between two 9-pole circles sharing the circle weights:
/// a cylinder lateral for stacked rims, an annulus for concentric ones,
/// a disk when one rim degenerates to the center point.
fn ruled_between_circles(bottom: Vec<Point3>, top: Vec<Point3>) -> FaceRecord {
    let w = circle_weights();
    let poles: Vec<Vec<Point3>> = bottom.into_iter().zip(top).map(|(b, t)| vec![b, t]).collect();
    let weights: Vec<Vec<f64>> = w.iter().map(|&wi| vec![wi, wi]).collect();
    surface_record(poles, weights, 2, 1, circle_knots(), line_knots())
}

fn bilinear_face(corners: [Point3; 4]) -> FaceRecord {
    let [p00, p10, p01, p11] = corners;
    let poles = vec![vec![p00, p01], vec![p10, p11]];
    let weights = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
    surface_record(poles, weights, 1, 1, line_knots(), line_knots())
}

/// Axis-aligned cube `[0, side]^3` as six bilinear NURBS faces.
pub fn cube(side: f64) -> Result<SolidDocument, DocumentError> {
    let s = side;
    let p = |x, y, z| Point3::new(x, y, z);
    let faces = vec![
        bilinear_face([p(0.0, 0.0, 0.0), p(s, 0.0, 0.0), p(0.0, s, 0.0), p(s, s, 0.0)]),
        bilinear_face([p(0.0, 0.0, s), p(s, 0.0, s), p(0.0, s, s), p(s, s, s)]),
        bilinear_face([p(0.0, 0.0, 0.0), p(s, 0.0, 0.0), p(0.0, 0.0, s), p(s, 0.0, s)]),
        bilinear_face([p(0.0, s, 0.0), p(s, s, 0.0), p(0.0, s, s), p(s, s, s)]),
        bilinear_face([p(0.0, 0.0, 0.0), p(0.0, s, 0.0), p(0.0, 0.0, s), p(0.0, s, s)]),
        bilinear_face([p(s, 0.0, 0.0), p(s, s, 0.0), p(s, 0.0, s), p(s, s, s)]),
    ];
    SolidDocument::new(Some("cube".into()), faces)
}

/// Right circular cylinder of the given radius and height, axis +z from the
/// origin: one lateral surface and two cap disks.
pub fn cylinder(radius: f64, height: f64) -> Result<SolidDocument, DocumentError> {
    let center = |z| vec![Point3::new(0.0, 0.0, z); 9];
    let faces = vec![
        ruled_between_circles(circle_poles(radius, 0.0), circle_poles(radius, height)),
        ruled_between_circles(center(0.0), circle_poles(radius, 0.0)),
        ruled_between_circles(center(height), circle_poles(radius, height)),
    ];
    SolidDocument::new(Some("cylinder".into()), faces)
}

/// Sphere of the given radius centered at the origin: a single biquadratic
/// rational surface of revolution (9-pole equator x 5-pole meridian).
pub fn sphere(radius: f64) -> Result<SolidDocument, DocumentError> {
    // Meridian half circle from the south to the north pole in (rho, z).
    let profile: [[f64; 2]; 5] = [
        [0.0, -1.0],
        [1.0, -1.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [0.0, 1.0],
    ];
    let profile_weights = [1.0, FRAC_1_SQRT_2, 1.0, FRAC_1_SQRT_2, 1.0];
    let circle_w = circle_weights();
    let poles: Vec<Vec<Point3>> = CIRCLE_XY
        .iter()
        .map(|[cx, cy]| {
            profile
                .iter()
                .map(|[rho, z]| Point3::new(radius * rho * cx, radius * rho * cy, radius * z))
                .collect()
        })
        .collect();
    let weights: Vec<Vec<f64>> = circle_w
        .iter()
        .map(|wu| profile_weights.iter().map(|wv| wu * wv).collect())
        .collect();
    let v_knots = KnotVector::new(vec![0.0, 0.5, 1.0], vec![3, 2, 3]).expect("meridian knots");
    let faces = vec![surface_record(poles, weights, 2, 2, circle_knots(), v_knots)];
    SolidDocument::new(Some("sphere".into()), faces)
}

/// Annular cylinder (a washer): outer and inner lateral surfaces plus two
/// flat annular caps. Watertight with genus one.
///
/// Keep `inner_radius / outer_radius` above ~0.84 so both rims refine to the
/// same chord-error bucket at the default tolerance and the caps stitch.
pub fn washer(
    inner_radius: f64,
    outer_radius: f64,
    height: f64,
) -> Result<SolidDocument, DocumentError> {
    assert!(
        0.0 < inner_radius && inner_radius < outer_radius,
        "washer radii must satisfy 0 < inner < outer"
    );
    let faces = vec![
        ruled_between_circles(circle_poles(outer_radius, 0.0), circle_poles(outer_radius, height)),
        ruled_between_circles(circle_poles(inner_radius, 0.0), circle_poles(inner_radius, height)),
        ruled_between_circles(circle_poles(inner_radius, 0.0), circle_poles(outer_radius, 0.0)),
        ruled_between_circles(
            circle_poles(inner_radius, height),
            circle_poles(outer_radius, height),
        ),
    ];
    SolidDocument::new(Some("washer".into()), faces)
}

/// Single open bilinear patch over `[0, 1]^2` at z = 0.
pub fn bilinear_patch() -> Result<SolidDocument, DocumentError> {
    let p = |x, y| Point3::new(x, y, 0.0);
    SolidDocument::new(
        Some("patch".into()),
        vec![bilinear_face([p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)])],
    )
}

/// Square plate with a centered round hole, written as primitive records:
/// four boundary lines followed by a full circle, all one planar face.
pub fn plate_with_hole(side: f64, hole_radius: f64) -> Result<SolidDocument, DocumentError> {
    assert!(
        hole_radius > 0.0 && hole_radius < side / 2.0,
        "hole must fit inside the plate"
    );
    let s = side;
    let corner = [
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(s, 0.0, 0.0),
        Point3::new(s, s, 0.0),
        Point3::new(0.0, s, 0.0),
    ];
    let mut faces: Vec<FaceRecord> = (0..4)
        .map(|i| {
            let line = LineSegment::new(corner[i], corner[(i + 1) % 4]).expect("plate edge");
            FaceRecord::Curve(PrimitiveCurve::Line(line))
        })
        .collect();
    let hole = CircleArc::new(
        Point3::new(s / 2.0, s / 2.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        hole_radius,
        0.0,
        TAU,
    )
    .expect("plate hole");
    faces.push(FaceRecord::Curve(PrimitiveCurve::Circle(hole)));
    SolidDocument::new(Some("plate".into()), faces)
}

/// Grid-sampled torus mesh: `nu` segments around the major circle, `nv`
/// around the minor one. Closed, oriented, genus one.
pub fn torus_mesh(major: f64, minor: f64, nu: usize, nv: usize) -> TriMesh {
    let (vertices, triangles) = torus_grid(major, minor, nu, nv, Vec3::zeros(), None);
    TriMesh::new(vertices, triangles)
}

/// Closed genus-two mesh: two tori, one grid cell cut from each, joined by
/// an eight-triangle tube between the cut boundaries.
pub fn genus2_mesh() -> TriMesh {
    let (nu, nv) = (12, 12);
    let (mut vertices, mut triangles) =
        torus_grid(2.0, 0.5, nu, nv, Vec3::zeros(), Some((0, 0)));
    let offset = vertices.len();
    let (v2, t2) = torus_grid(2.0, 0.5, nu, nv, Vec3::new(6.0, 0.0, 0.0), Some((0, 0)));
    vertices.extend(v2);
    // The second torus is wound the other way so the tube glues the two cut
    // boundaries with globally consistent orientation.
    triangles.extend(t2.into_iter().map(|t| [t[0] + offset, t[2] + offset, t[1] + offset]));

    // Corners of the removed cell (0, 0) on each torus.
    let v = |i: usize, j: usize| i * nv + j;
    let (a1, b1, c1, d1) = (v(0, 0), v(1, 0), v(0, 1), v(1, 1));
    let (a2, b2, c2, d2) = (a1 + offset, b1 + offset, c1 + offset, d1 + offset);
    triangles.extend([
        [a1, b1, b2],
        [a1, b2, a2],
        [b1, d1, d2],
        [b1, d2, b2],
        [d1, c1, c2],
        [d1, c2, d2],
        [c1, a1, a2],
        [c1, a2, c2],
    ]);
    TriMesh::new(vertices, triangles)
}

fn torus_grid(
    major: f64,
    minor: f64,
    nu: usize,
    nv: usize,
    shift: Vec3,
    skip_cell: Option<(usize, usize)>,
) -> (Vec<Point3>, Vec<[usize; 3]>) {
    assert!(nu >= 3 && nv >= 3, "torus grid needs at least 3x3 cells");
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let phi = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let theta = TAU * j as f64 / nv as f64;
            let ring = major + minor * theta.cos();
            vertices.push(
                Point3::new(ring * phi.cos(), ring * phi.sin(), minor * theta.sin()) + shift,
            );
        }
    }
    let v = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            if skip_cell == Some((i, j)) {
                continue;
            }
            let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1));
            triangles.push([a, b, d]);
            triangles.push([a, d, c]);
        }
    }
    (vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::tessellate_document;
    use crate::topo::{euler_genus, is_watertight, repair_orientation, signed_volume};

    fn closed_mesh(doc: &SolidDocument) -> TriMesh {
        let mesh = tessellate_document(doc, 1e-3).expect("tessellation");
        repair_orientation(&mesh).expect("orientable")
    }

    #[test]
    fn cube_is_watertight_with_unit_volume() {
        let mesh = closed_mesh(&cube(1.0).unwrap());
        assert!(is_watertight(&mesh));
        assert!((signed_volume(&mesh).unwrap().abs() - 1.0).abs() < 1e-9);
        assert_eq!(euler_genus(&mesh).unwrap(), (2, 0));
    }

    #[test]
    fn cylinder_volume_and_area_near_exact() {
        let (r, h) = (1.0, 2.0);
        let mesh = closed_mesh(&cylinder(r, h).unwrap());
        assert!(is_watertight(&mesh));
        let volume = signed_volume(&mesh).unwrap().abs();
        let exact = std::f64::consts::PI * r * r * h;
        assert!((volume - exact).abs() / exact < 0.01, "volume {volume} vs {exact}");
        assert_eq!(euler_genus(&mesh).unwrap(), (2, 0));
    }

    #[test]
    fn sphere_is_exact_on_the_surface() {
        let doc = sphere(2.0).unwrap();
        let crate::document::FaceRecord::Surface(s) = &doc.faces()[0] else {
            panic!("sphere is one surface");
        };
        for (u, v) in [(0.1, 0.2), (0.35, 0.9), (0.5, 0.5), (0.77, 0.13), (1.0, 1.0)] {
            let p = s.point(u, v).unwrap();
            assert!((p.coords.norm() - 2.0).abs() < 1e-12, "off sphere at ({u}, {v})");
        }
    }

    #[test]
    fn sphere_closes_to_genus_zero() {
        let mesh = closed_mesh(&sphere(1.0).unwrap());
        assert!(is_watertight(&mesh));
        assert_eq!(euler_genus(&mesh).unwrap(), (2, 0));
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        let volume = signed_volume(&mesh).unwrap().abs();
        assert!((volume - exact).abs() / exact < 0.01);
    }

    #[test]
    fn washer_has_genus_one() {
        let mesh = closed_mesh(&washer(0.97, 1.0, 0.3).unwrap());
        assert!(is_watertight(&mesh));
        assert_eq!(euler_genus(&mesh).unwrap(), (0, 1));
    }

    #[test]
    fn torus_mesh_has_genus_one() {
        let mesh = torus_mesh(2.0, 0.5, 24, 16);
        assert!(is_watertight(&mesh));
        assert_eq!(euler_genus(&mesh).unwrap(), (0, 1));
        assert_eq!(mesh.triangles.len(), 2 * 24 * 16);
    }

    #[test]
    fn genus2_mesh_has_genus_two() {
        let mesh = genus2_mesh();
        assert!(is_watertight(&mesh));
        assert_eq!(euler_genus(&mesh).unwrap(), (-2, 2));
    }

    #[test]
    fn plate_with_hole_groups_into_one_face() {
        let doc = plate_with_hole(2.0, 0.5).unwrap();
        assert_eq!(doc.faces().len(), 5);
        assert_eq!(doc.face_groups().len(), 1);
    }
}
