//! Planar-face triangulation: boundary discretization, plane fitting,
//! hole bridging and ear clipping on the 2D projection.

use crate::mesh::TriMesh;
use crate::{Point3, Vec3};

use super::{plane_frame, PrimitiveCurve, PrimitiveError, PrimitiveFace, PLANARITY_TOLERANCE};

const MAX_SUBDIVISION_DEPTH: usize = 12;

/// Discretize one curve into a polyline with chord error <= `tol`,
/// including both endpoints.
fn discretize_curve(curve: &PrimitiveCurve, tol: f64) -> Result<Vec<Point3>, PrimitiveError> {
    fn recurse(
        curve: &PrimitiveCurve,
        t0: f64,
        p0: Point3,
        t1: f64,
        p1: Point3,
        tol: f64,
        depth: usize,
        out: &mut Vec<Point3>,
    ) -> Result<(), PrimitiveError> {
        // Probe chord deviation at the quarter points as well as the midpoint
        // so symmetric S-shapes do not slip through.
        let mut dev: f64 = 0.0;
        let mut mid = (t0 + t1) * 0.5;
        let mut pm = p0;
        for (k, frac) in [0.25, 0.5, 0.75].iter().enumerate() {
            let t = t0 + (t1 - t0) * frac;
            let p = curve.point(t)?;
            let chord = p0 + (p1 - p0) * *frac;
            dev = dev.max((p - chord).norm());
            if k == 1 {
                mid = t;
                pm = p;
            }
        }
        if dev <= tol || depth >= MAX_SUBDIVISION_DEPTH {
            out.push(p1);
            return Ok(());
        }
        recurse(curve, t0, p0, mid, pm, tol, depth + 1, out)?;
        recurse(curve, mid, pm, t1, p1, tol, depth + 1, out)
    }

    let (t0, t1) = curve.param_range();
    let p0 = curve.point(t0)?;
    let p1 = curve.point(t1)?;
    let mut pts = vec![p0];
    recurse(curve, t0, p0, t1, p1, tol, 0, &mut pts)?;
    Ok(pts)
}

/// Chain the curves of a loop into a closed polygon ring (no repeated
/// closing point, consecutive duplicates removed).
fn loop_polyline(curves: &[PrimitiveCurve], tol: f64) -> Result<Vec<Point3>, PrimitiveError> {
    let mut ring: Vec<Point3> = Vec::new();
    for curve in curves {
        let pts = discretize_curve(curve, tol)?;
        let skip = usize::from(!ring.is_empty());
        ring.extend_from_slice(&pts[skip..]);
    }
    while ring.len() > 1 && (ring[ring.len() - 1] - ring[0]).norm() <= 1e-9 {
        ring.pop();
    }
    ring.dedup_by(|a, b| (*a - *b).norm() <= 1e-12);
    Ok(ring)
}

fn newell_normal(ring: &[Point3]) -> Vec3 {
    let mut n = Vec3::zeros();
    for i in 0..ring.len() {
        let a = &ring[i];
        let b = &ring[(i + 1) % ring.len()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

fn signed_area(ring: &[[f64; 2]]) -> f64 {
    let mut a = 0.0;
    for i in 0..ring.len() {
        let p = ring[i];
        let q = ring[(i + 1) % ring.len()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    a * 0.5
}

fn point_in_polygon(p: [f64; 2], ring: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a[1] > p[1]) != (b[1] > p[1])
            && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn strictly_inside_triangle(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2], eps: f64) -> bool {
    cross2(a, b, p) > eps && cross2(b, c, p) > eps && cross2(c, a, p) > eps
}

/// Merge one hole ring into the outer ring through a mutually visible vertex
/// pair (rightmost-hole-vertex method). Both rings hold indices into `pts`;
/// the outer ring must be counter-clockwise and the hole clockwise.
fn bridge_hole(
    outer: &mut Vec<usize>,
    hole: &[usize],
    pts: &[[f64; 2]],
) -> Result<(), PrimitiveError> {
    let m_pos = (0..hole.len())
        .max_by(|&a, &b| {
            pts[hole[a]][0]
                .partial_cmp(&pts[hole[b]][0])
                .unwrap()
                .then(pts[hole[a]][1].partial_cmp(&pts[hole[b]][1]).unwrap())
        })
        .unwrap();
    let m = pts[hole[m_pos]];

    // Closest intersection of the ray from M toward +x with the outer edges.
    let mut best: Option<(f64, usize)> = None; // (x of intersection, edge start position)
    for i in 0..outer.len() {
        let a = pts[outer[i]];
        let b = pts[outer[(i + 1) % outer.len()]];
        if (a[1] > m[1]) == (b[1] > m[1]) {
            continue;
        }
        let x = a[0] + (m[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
        if x >= m[0] - 1e-12 && best.map_or(true, |(bx, _)| x < bx) {
            best = Some((x, i));
        }
    }
    let Some((ix, edge_start)) = best else {
        return Err(PrimitiveError::UnsupportedFace(
            "hole lies outside its outer boundary".into(),
        ));
    };
    let i_pt = [ix, m[1]];

    // Candidate visible vertex: the endpoint of the intersected edge with the
    // larger x-coordinate, unless a reflex vertex intrudes into the triangle
    // (M, I, P); then take the intruder minimizing the angle to the ray.
    let e0 = edge_start;
    let e1 = (edge_start + 1) % outer.len();
    let mut p_pos = if pts[outer[e0]][0] >= pts[outer[e1]][0] {
        e0
    } else {
        e1
    };
    let scale = pts.iter().flat_map(|p| p.iter().map(|v| v.abs())).fold(1.0f64, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut best_metric: Option<(f64, f64)> = None;
    for pos in 0..outer.len() {
        if pos == p_pos {
            continue;
        }
        let prev = pts[outer[(pos + outer.len() - 1) % outer.len()]];
        let cur = pts[outer[pos]];
        let next = pts[outer[(pos + 1) % outer.len()]];
        if cross2(prev, cur, next) >= 0.0 {
            continue; // only reflex vertices can block visibility
        }
        if strictly_inside_triangle(cur, m, i_pt, pts[outer[p_pos]], eps)
            || strictly_inside_triangle(cur, m, pts[outer[p_pos]], i_pt, eps)
        {
            let dx = cur[0] - m[0];
            let dy = cur[1] - m[1];
            let dist = (dx * dx + dy * dy).sqrt();
            let angle = (dy.abs()).atan2(dx.max(1e-300));
            if best_metric.map_or(true, |bm| (angle, dist) < bm) {
                best_metric = Some((angle, dist));
                p_pos = pos;
            }
        }
    }

    // Splice: ... P, M, hole cycle, M, P, ...
    let mut merged = Vec::with_capacity(outer.len() + hole.len() + 2);
    merged.extend_from_slice(&outer[..=p_pos]);
    for k in 0..hole.len() {
        merged.push(hole[(m_pos + k) % hole.len()]);
    }
    merged.push(hole[m_pos]);
    merged.extend_from_slice(&outer[p_pos..]);
    *outer = merged;
    Ok(())
}

/// Ear-clip a counter-clockwise simple ring (indices into `pts`).
fn ear_clip(mut ring: Vec<usize>, pts: &[[f64; 2]]) -> Result<Vec<[usize; 3]>, PrimitiveError> {
    let scale = ring
        .iter()
        .flat_map(|&i| pts[i].iter().map(|v| v.abs()))
        .fold(1.0f64, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut triangles = Vec::with_capacity(ring.len().saturating_sub(2));
    while ring.len() > 3 {
        let n = ring.len();
        let mut clipped = false;
        for i in 0..n {
            let ia = ring[(i + n - 1) % n];
            let ib = ring[i];
            let ic = ring[(i + 1) % n];
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            if cross2(a, b, c) < -eps {
                continue; // reflex corner
            }
            let blocked = ring.iter().enumerate().any(|(k, &iv)| {
                if k == (i + n - 1) % n || k == i || k == (i + 1) % n {
                    return false;
                }
                strictly_inside_triangle(pts[iv], a, b, c, eps)
            });
            if blocked {
                continue;
            }
            triangles.push([ia, ib, ic]);
            ring.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            // Numeric lockup: clip the flattest convex corner to make progress.
            let fallback = (0..ring.len()).min_by(|&i, &j| {
                let tri = |k: usize| {
                    let n = ring.len();
                    cross2(
                        pts[ring[(k + n - 1) % n]],
                        pts[ring[k]],
                        pts[ring[(k + 1) % n]],
                    )
                    .abs()
                };
                tri(i).partial_cmp(&tri(j)).unwrap()
            });
            match fallback {
                Some(i) => {
                    let n = ring.len();
                    triangles.push([ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]]);
                    ring.remove(i);
                }
                None => {
                    return Err(PrimitiveError::UnsupportedFace(
                        "ear clipping failed to make progress".into(),
                    ))
                }
            }
        }
    }
    if ring.len() == 3 {
        triangles.push([ring[0], ring[1], ring[2]]);
    }
    Ok(triangles)
}

/// Triangulate a planar primitive face.
///
/// The boundary is discretized to the chord tolerance, the common plane is
/// fitted (max deviation 1e-6, otherwise an unsupported-face error), loops
/// are classified into outer boundaries and holes by containment, holes are
/// bridged into their outer loop, and the result is ear-clipped. All output
/// triangles share the face normal's orientation.
pub fn triangulate_planar_face(
    face: &PrimitiveFace,
    chord_tolerance: f64,
) -> Result<TriMesh, PrimitiveError> {
    if !(chord_tolerance > 0.0) {
        return Err(PrimitiveError::Structure(
            "chord tolerance must be positive".into(),
        ));
    }
    let mut rings3d: Vec<Vec<Point3>> = Vec::new();
    for curves in face.loops() {
        let ring = loop_polyline(curves, chord_tolerance)?;
        if ring.len() >= 3 {
            rings3d.push(ring);
        }
    }
    if rings3d.is_empty() {
        return Err(PrimitiveError::UnsupportedFace(
            "boundary collapses to fewer than three points".into(),
        ));
    }

    // Plane from the loop with the strongest Newell normal.
    let normal = rings3d
        .iter()
        .map(|r| newell_normal(r))
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    if normal.norm() <= 1e-12 {
        return Err(PrimitiveError::UnsupportedFace(
            "boundary loops have no definite plane".into(),
        ));
    }
    let n = normal.normalize();
    let count: usize = rings3d.iter().map(Vec::len).sum();
    let centroid = Point3::from(
        rings3d
            .iter()
            .flatten()
            .map(|p| p.coords)
            .sum::<Vec3>()
            / count as f64,
    );
    let mut max_dev: f64 = 0.0;
    for p in rings3d.iter().flatten() {
        max_dev = max_dev.max((p - centroid).dot(&n).abs());
    }
    if max_dev > PLANARITY_TOLERANCE {
        return Err(PrimitiveError::UnsupportedFace(format!(
            "non-planar boundary, deviation {max_dev:.3e} exceeds {PLANARITY_TOLERANCE:.0e}"
        )));
    }

    let (x_axis, y_axis) = plane_frame(&n)?;
    let mut pts3d: Vec<Point3> = Vec::with_capacity(count);
    let mut pts2d: Vec<[f64; 2]> = Vec::with_capacity(count);
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(rings3d.len());
    for ring3d in &rings3d {
        let mut ring = Vec::with_capacity(ring3d.len());
        for p in ring3d {
            let d = p - centroid;
            ring.push(pts2d.len());
            pts2d.push([d.dot(&x_axis), d.dot(&y_axis)]);
            pts3d.push(*p);
        }
        rings.push(ring);
    }

    // Classify loops by containment depth of a representative extreme vertex.
    let rep: Vec<[f64; 2]> = rings
        .iter()
        .map(|ring| {
            let &i = ring
                .iter()
                .max_by(|&&a, &&b| pts2d[a][0].partial_cmp(&pts2d[b][0]).unwrap())
                .unwrap();
            pts2d[i]
        })
        .collect();
    let ring2d =
        |ring: &[usize]| -> Vec<[f64; 2]> { ring.iter().map(|&i| pts2d[i]).collect() };
    let mut depth = vec![0usize; rings.len()];
    let mut container = vec![usize::MAX; rings.len()];
    for i in 0..rings.len() {
        for j in 0..rings.len() {
            if i != j && point_in_polygon(rep[i], &ring2d(&rings[j])) {
                depth[i] += 1;
                container[i] = j;
            }
        }
    }
    if depth.iter().any(|&d| d > 1) {
        return Err(PrimitiveError::UnsupportedFace(
            "nested boundary loops deeper than one hole level".into(),
        ));
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for (oi, ring) in rings.iter().enumerate() {
        if depth[oi] != 0 {
            continue;
        }
        let mut outer = ring.clone();
        if signed_area(&ring2d(&outer)) < 0.0 {
            outer.reverse();
        }
        // Holes merge rightmost-first so earlier bridges cannot occlude later ones.
        let mut holes: Vec<Vec<usize>> = (0..rings.len())
            .filter(|&h| depth[h] == 1 && container[h] == oi)
            .map(|h| {
                let mut hole = rings[h].clone();
                if signed_area(&ring2d(&hole)) > 0.0 {
                    hole.reverse();
                }
                hole
            })
            .collect();
        holes.sort_by(|a, b| {
            let max_x = |r: &Vec<usize>| {
                r.iter()
                    .map(|&i| pts2d[i][0])
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            max_x(b).partial_cmp(&max_x(a)).unwrap()
        });
        for hole in &holes {
            bridge_hole(&mut outer, hole, &pts2d)?;
        }
        triangles.extend(ear_clip(outer, &pts2d)?);
    }

    let mesh = TriMesh::new(pts3d, triangles);
    Ok(mesh.without_degenerate_triangles())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{CircleArc, LineSegment};
    use approx::assert_relative_eq;

    fn square_loop(half: f64, z: f64) -> Vec<PrimitiveCurve> {
        let pts = [
            Point3::new(-half, -half, z),
            Point3::new(half, -half, z),
            Point3::new(half, half, z),
            Point3::new(-half, half, z),
        ];
        (0..4)
            .map(|i| PrimitiveCurve::Line(LineSegment::new(pts[i], pts[(i + 1) % 4]).unwrap()))
            .collect()
    }

    #[test]
    fn unit_square_gives_two_triangles() {
        let face = PrimitiveFace::new(square_loop(0.5, 0.0)).unwrap();
        let mesh = triangulate_planar_face(&face, 1e-3).unwrap();
        assert_eq!(mesh.triangles.len(), 2);
        assert_relative_eq!(mesh.total_area(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn disk_area_close_to_pi() {
        let circle = PrimitiveCurve::Circle(
            CircleArc::new(Point3::origin(), Vec3::z(), 1.0, 0.0, std::f64::consts::TAU).unwrap(),
        );
        let face = PrimitiveFace::new(vec![circle]).unwrap();
        let mesh = triangulate_planar_face(&face, 1e-3).unwrap();
        assert!((mesh.total_area() - std::f64::consts::PI).abs() < 1e-2);
    }

    #[test]
    fn square_with_round_hole() {
        let r = 0.25;
        let mut curves = square_loop(0.5, 0.0);
        curves.push(PrimitiveCurve::Circle(
            CircleArc::new(Point3::origin(), Vec3::z(), r, 0.0, std::f64::consts::TAU).unwrap(),
        ));
        let face = PrimitiveFace::new(curves).unwrap();
        let mesh = triangulate_planar_face(&face, 1e-3).unwrap();
        let expected = 1.0 - std::f64::consts::PI * r * r;
        assert!((mesh.total_area() - expected).abs() < 1e-2);
    }

    #[test]
    fn triangle_orientation_is_uniform() {
        let mut curves = square_loop(0.5, 0.0);
        curves.push(PrimitiveCurve::Circle(
            CircleArc::new(Point3::origin(), Vec3::z(), 0.2, 0.0, std::f64::consts::TAU).unwrap(),
        ));
        let face = PrimitiveFace::new(curves).unwrap();
        let mesh = triangulate_planar_face(&face, 1e-3).unwrap();
        let mut reference: Option<Vec3> = None;
        for t in &mesh.triangles {
            let n = mesh.triangle_normal(*t);
            let n = n.normalize();
            match &reference {
                None => reference = Some(n),
                Some(r) => assert_relative_eq!(r.dot(&n), 1.0, epsilon = 1e-9),
            }
        }
    }

    #[test]
    fn non_planar_boundary_is_unsupported() {
        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.5),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let curves: Vec<PrimitiveCurve> = (0..4)
            .map(|i| PrimitiveCurve::Line(LineSegment::new(pts[i], pts[(i + 1) % 4]).unwrap()))
            .collect();
        let face = PrimitiveFace::new(curves).unwrap();
        assert!(matches!(
            triangulate_planar_face(&face, 1e-3),
            Err(PrimitiveError::UnsupportedFace(_))
        ));
    }

    #[test]
    fn two_disjoint_disks_triangulate_together() {
        let disk = |cx: f64| {
            PrimitiveCurve::Circle(
                CircleArc::new(
                    Point3::new(cx, 0.0, 0.0),
                    Vec3::z(),
                    0.5,
                    0.0,
                    std::f64::consts::TAU,
                )
                .unwrap(),
            )
        };
        let face = PrimitiveFace::new(vec![disk(-1.0), disk(1.0)]).unwrap();
        let mesh = triangulate_planar_face(&face, 1e-3).unwrap();
        let expected = 2.0 * std::f64::consts::PI * 0.25;
        assert!((mesh.total_area() - expected).abs() < 2e-2);
    }
}
