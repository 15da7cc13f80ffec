//! Shared helpers for the integration suites: an independent recursive
//! Cox-de Boor evaluator, brute-force point-cloud metrics, and a seeded
//! generator of randomized documents whose serialized form is stable under
//! parse -> serialize (all numeric fields sit on exact decimal grids, and
//! conic normals are exact-decimal unit vectors so renormalization on parse
//! cannot move any 6-decimal digit).

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hybrep::mesh::PointCloud;
use hybrep::primitives::{BezierCurve, CircleArc, EllipseArc, LineSegment, PrimitiveCurve};
use hybrep::{FaceRecord, KnotVector, NurbsCurve, NurbsSurface, Point3, SolidDocument, Vec3};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Recursive Cox-de Boor reference
// ---------------------------------------------------------------------------

/// Degree-0 basis with half-open spans, except that the span ending exactly
/// at the domain's right end also owns that endpoint (so evaluation at the
/// right end is the limit from below).
fn basis_zero(expanded: &[f64], i: usize, u: f64, right: f64) -> f64 {
    if u == right {
        if expanded[i] < right && expanded[i + 1] == right {
            1.0
        } else {
            0.0
        }
    } else if expanded[i] <= u && u < expanded[i + 1] {
        1.0
    } else {
        0.0
    }
}

/// `N_{i,p}(u)` by the textbook recursion with the 0/0 := 0 convention.
/// `right` is the right end of the evaluable domain.
pub fn basis_recursive(expanded: &[f64], i: usize, p: usize, u: f64, right: f64) -> f64 {
    if p == 0 {
        return basis_zero(expanded, i, u, right);
    }
    let mut value = 0.0;
    let d1 = expanded[i + p] - expanded[i];
    if d1 > 0.0 {
        value += (u - expanded[i]) / d1 * basis_recursive(expanded, i, p - 1, u, right);
    }
    let d2 = expanded[i + p + 1] - expanded[i + 1];
    if d2 > 0.0 {
        value += (expanded[i + p + 1] - u) / d2 * basis_recursive(expanded, i + 1, p - 1, u, right);
    }
    value
}

/// All `expanded.len() - degree - 1` basis values at `u`, by recursion.
pub fn all_basis_recursive(expanded: &[f64], degree: usize, u: f64) -> Vec<f64> {
    let count = expanded.len() - degree - 1;
    let right = expanded[count];
    (0..count)
        .map(|i| basis_recursive(expanded, i, degree, u, right))
        .collect()
}

/// Full-basis rational curve evaluation; independent of the library's local
/// triangular algorithm. Non-periodic curves only.
pub fn curve_point_reference(curve: &NurbsCurve, u: f64) -> Point3 {
    assert!(
        !curve.is_periodic(),
        "reference evaluator expects a non-periodic curve"
    );
    let expanded = curve.knots().expanded();
    let n = curve.poles().len();
    let right = expanded[n];
    let mut acc = [0.0f64; 4];
    for i in 0..n {
        let b = basis_recursive(&expanded, i, curve.degree(), u, right);
        if b == 0.0 {
            continue;
        }
        let w = curve.weights()[i] * b;
        let p = curve.poles()[i];
        acc[0] += w * p.x;
        acc[1] += w * p.y;
        acc[2] += w * p.z;
        acc[3] += w;
    }
    Point3::new(acc[0] / acc[3], acc[1] / acc[3], acc[2] / acc[3])
}

/// Tensor-product rational surface evaluation over the full basis.
pub fn surface_point_reference(surface: &NurbsSurface, u: f64, v: f64) -> Point3 {
    assert!(
        !surface.u_periodic() && !surface.v_periodic(),
        "reference evaluator expects a non-periodic surface"
    );
    let ue = surface.u_knots().expanded();
    let ve = surface.v_knots().expanded();
    let nu = surface.poles().len();
    let nv = surface.poles()[0].len();
    let u_right = ue[nu];
    let v_right = ve[nv];
    let bu: Vec<f64> = (0..nu)
        .map(|i| basis_recursive(&ue, i, surface.u_degree(), u, u_right))
        .collect();
    let bv: Vec<f64> = (0..nv)
        .map(|j| basis_recursive(&ve, j, surface.v_degree(), v, v_right))
        .collect();
    let mut acc = [0.0f64; 4];
    for (i, &bui) in bu.iter().enumerate() {
        if bui == 0.0 {
            continue;
        }
        for (j, &bvj) in bv.iter().enumerate() {
            let w = surface.weights()[i][j] * bui * bvj;
            let p = surface.poles()[i][j];
            acc[0] += w * p.x;
            acc[1] += w * p.y;
            acc[2] += w * p.z;
            acc[3] += w;
        }
    }
    Point3::new(acc[0] / acc[3], acc[1] / acc[3], acc[2] / acc[3])
}

/// Symmetric finite-difference derivative of the curve at `u`.
pub fn central_difference(curve: &NurbsCurve, u: f64, h: f64) -> Vec3 {
    let a = curve.point(u - h).unwrap();
    let b = curve.point(u + h).unwrap();
    (b - a) / (2.0 * h)
}

// ---------------------------------------------------------------------------
// Brute-force point metrics
// ---------------------------------------------------------------------------

pub fn brute_nearest_sq(points: &[Point3], q: &Point3) -> f64 {
    points
        .iter()
        .map(|p| (p - q).norm_squared())
        .fold(f64::INFINITY, f64::min)
}

fn directed_mean_sq(from: &PointCloud, to: &PointCloud) -> f64 {
    let sum: f64 = from
        .points
        .iter()
        .map(|q| brute_nearest_sq(&to.points, q))
        .sum();
    sum / from.points.len() as f64
}

pub fn brute_chamfer(a: &PointCloud, b: &PointCloud) -> f64 {
    directed_mean_sq(a, b) + directed_mean_sq(b, a)
}

pub fn brute_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    let directed = |from: &PointCloud, to: &PointCloud| {
        from.points
            .iter()
            .map(|q| brute_nearest_sq(&to.points, q))
            .fold(0.0f64, f64::max)
    };
    directed(a, b).max(directed(b, a)).sqrt()
}

pub fn brute_mmd(reference: &[PointCloud], generated: &[PointCloud]) -> f64 {
    let sum: f64 = reference
        .iter()
        .map(|r| {
            generated
                .iter()
                .map(|g| brute_chamfer(r, g))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    sum / reference.len() as f64
}

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-scale..scale),
                    rng.gen_range(-scale..scale),
                    rng.gen_range(-scale..scale),
                )
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Randomized curves and surfaces (continuous parameters, for property tests)
// ---------------------------------------------------------------------------

/// Random clamped non-periodic knot vector for the given degree, with 0 to 3
/// interior knots of multiplicity <= degree.
pub fn random_clamped_knots(rng: &mut ChaCha8Rng, degree: usize) -> KnotVector {
    let interior = rng.gen_range(0..=3);
    let mut knots = vec![rng.gen_range(-2.0..0.0)];
    let mut mults = vec![degree as u32 + 1];
    for _ in 0..interior {
        knots.push(knots.last().unwrap() + rng.gen_range(0.05..1.0));
        mults.push(rng.gen_range(1..=degree as u32));
    }
    knots.push(knots.last().unwrap() + rng.gen_range(0.05..1.0));
    mults.push(degree as u32 + 1);
    KnotVector::new(knots, mults).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Point3 {
    Point3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Random clamped rational curve of degree 1 to 4.
pub fn random_clamped_curve(rng: &mut ChaCha8Rng) -> NurbsCurve {
    let degree = rng.gen_range(1..=4);
    let knots = random_clamped_knots(rng, degree);
    let count = knots.expanded_len() - degree - 1;
    let poles = (0..count).map(|_| random_point(rng, 5.0)).collect();
    let weights = (0..count).map(|_| rng.gen_range(0.1..5.0)).collect();
    let (first, last) = (knots.first(), knots.last());
    NurbsCurve::new(poles, weights, degree, knots, false, first, last).unwrap()
}

/// Random clamped rational surface with degrees 1 to 3 per direction.
pub fn random_clamped_surface(rng: &mut ChaCha8Rng) -> NurbsSurface {
    let u_degree = rng.gen_range(1..=3);
    let v_degree = rng.gen_range(1..=3);
    let u_knots = random_clamped_knots(rng, u_degree);
    let v_knots = random_clamped_knots(rng, v_degree);
    let nu = u_knots.expanded_len() - u_degree - 1;
    let nv = v_knots.expanded_len() - v_degree - 1;
    let poles = (0..nu)
        .map(|_| (0..nv).map(|_| random_point(rng, 5.0)).collect())
        .collect();
    let weights = (0..nu)
        .map(|_| (0..nv).map(|_| rng.gen_range(0.1..5.0)).collect())
        .collect();
    NurbsSurface::new(
        poles, weights, u_degree, v_degree, u_knots, v_knots, false, false,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Round-trip-safe random documents (all reals on exact decimal grids)
// ---------------------------------------------------------------------------

/// Unit vectors whose components are exact 6-decimal values: the global axes
/// plus scaled Pythagorean triples (3,4,5)/5 and quadruples (12,16,15)/25 in
/// every axis arrangement and sign pattern. Renormalizing these after parse
/// perturbs each component by well under one unit in the sixth decimal.
pub fn exact_unit_normals() -> Vec<Vec3> {
    let mut pool = Vec::new();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut v = [0.0; 3];
            v[axis] = sign;
            pool.push(Vec3::from(v));
        }
    }
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        for (a, b) in [(0.6, 0.8), (0.8, 0.6)] {
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = [0.0; 3];
                v[i] = sa * a;
                v[j] = sb * b;
                pool.push(Vec3::from(v));
            }
        }
    }
    let t = [0.48, 0.64, 0.6];
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        for s in 0..8u32 {
            let sign = |k: u32| if s >> k & 1 == 1 { -1.0 } else { 1.0 };
            pool.push(Vec3::new(
                sign(0) * t[perm[0]],
                sign(1) * t[perm[1]],
                sign(2) * t[perm[2]],
            ));
        }
    }
    pool
}

/// A uniform draw from `{lo + k * step}` staying within `[lo, hi]`.
fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).floor() as i64;
    lo + step * rng.gen_range(0..=n) as f64
}

fn grid_point(rng: &mut ChaCha8Rng) -> Point3 {
    Point3::new(
        grid(rng, -5.0, 5.0, 0.001),
        grid(rng, -5.0, 5.0, 0.001),
        grid(rng, -5.0, 5.0, 0.001),
    )
}

fn random_line(rng: &mut ChaCha8Rng) -> FaceRecord {
    loop {
        let start = grid_point(rng);
        let end = grid_point(rng);
        if (end - start).norm() > 1e-3 {
            return FaceRecord::Curve(PrimitiveCurve::Line(
                LineSegment::new(start, end).unwrap(),
            ));
        }
    }
}

/// Arc angles on a millirad grid, sweep in [0.1, 6.283] so the rounded range
/// never exceeds a full turn.
fn arc_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let first = grid(rng, 0.0, 3.0, 0.001);
    let sweep = grid(rng, 0.1, 6.283, 0.001);
    (first, first + sweep)
}

fn random_circle(rng: &mut ChaCha8Rng, normals: &[Vec3]) -> FaceRecord {
    let normal = normals[rng.gen_range(0..normals.len())];
    let (first, last) = arc_angles(rng);
    let radius = grid(rng, 0.05, 3.0, 0.001);
    FaceRecord::Curve(PrimitiveCurve::Circle(
        CircleArc::new(grid_point(rng), normal, radius, first, last).unwrap(),
    ))
}

fn random_ellipse(rng: &mut ChaCha8Rng, normals: &[Vec3]) -> FaceRecord {
    let normal = normals[rng.gen_range(0..normals.len())];
    let (first, last) = arc_angles(rng);
    let minor = grid(rng, 0.05, 2.0, 0.001);
    let major = minor + grid(rng, 0.01, 2.0, 0.001);
    FaceRecord::Curve(PrimitiveCurve::Ellipse(
        EllipseArc::new(grid_point(rng), normal, major, minor, first, last).unwrap(),
    ))
}

fn random_bezier(rng: &mut ChaCha8Rng) -> FaceRecord {
    let degree = rng.gen_range(1..=5);
    let poles = (0..=degree).map(|_| grid_point(rng)).collect();
    let first = grid(rng, 0.0, 0.5, 0.001);
    let last = first + grid(rng, 0.05, 1.0 - first - 0.05, 0.001);
    FaceRecord::Curve(PrimitiveCurve::Bezier(
        BezierCurve::new(poles, degree, first, last).unwrap(),
    ))
}

/// Distinct knots on a centirad grid with gaps of at least 0.01.
fn grid_knots(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let mut knots = vec![grid(rng, -1.0, 1.0, 0.01)];
    for _ in 1..count {
        knots.push(knots.last().unwrap() + grid(rng, 0.01, 0.5, 0.01));
    }
    knots
}

fn grid_weights(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        vec![1.0; count]
    } else {
        (0..count).map(|_| grid(rng, 0.1, 5.0, 0.1)).collect()
    }
}

fn random_bspline(rng: &mut ChaCha8Rng) -> FaceRecord {
    let degree = rng.gen_range(1..=4);
    let periodic = rng.gen_bool(0.3);
    let knots = if periodic {
        let count = rng.gen_range(degree + 2..=degree + 5);
        KnotVector::new(grid_knots(rng, count), vec![1; count]).unwrap()
    } else {
        let interior = rng.gen_range(0..=3);
        let knots = grid_knots(rng, interior + 2);
        let mut mults = vec![degree as u32 + 1];
        for _ in 0..interior {
            mults.push(rng.gen_range(1..=degree as u32));
        }
        mults.push(degree as u32 + 1);
        KnotVector::new(knots, mults).unwrap()
    };
    let count = if periodic {
        knots.expanded_len() - knots.first_mult() as usize
    } else {
        knots.expanded_len() - degree - 1
    };
    let poles = (0..count).map(|_| grid_point(rng)).collect();
    let weights = grid_weights(rng, count);
    let (first, last) = (knots.first(), knots.last());
    FaceRecord::Curve(PrimitiveCurve::Bspline(
        NurbsCurve::new(poles, weights, degree, knots, periodic, first, last).unwrap(),
    ))
}

fn random_direction(rng: &mut ChaCha8Rng, degree: usize) -> (KnotVector, bool, usize) {
    let periodic = rng.gen_bool(0.25);
    if periodic {
        let count = rng.gen_range(degree + 2..=degree + 4);
        let kv = KnotVector::new(grid_knots(rng, count), vec![1; count]).unwrap();
        let poles = kv.expanded_len() - kv.first_mult() as usize;
        (kv, true, poles)
    } else {
        let interior = rng.gen_range(0..=2);
        let knots = grid_knots(rng, interior + 2);
        let mut mults = vec![degree as u32 + 1];
        for _ in 0..interior {
            mults.push(rng.gen_range(1..=degree as u32));
        }
        mults.push(degree as u32 + 1);
        let kv = KnotVector::new(knots, mults).unwrap();
        let poles = kv.expanded_len() - degree - 1;
        (kv, false, poles)
    }
}

fn random_surface(rng: &mut ChaCha8Rng) -> FaceRecord {
    let u_degree = rng.gen_range(1..=3);
    let v_degree = rng.gen_range(1..=3);
    let (u_knots, u_periodic, nu) = random_direction(rng, u_degree);
    let (v_knots, v_periodic, nv) = random_direction(rng, v_degree);
    let poles: Vec<Vec<Point3>> = (0..nu)
        .map(|_| (0..nv).map(|_| grid_point(rng)).collect())
        .collect();
    let flat = grid_weights(rng, nu * nv);
    let weights = flat.chunks(nv).map(<[f64]>::to_vec).collect();
    FaceRecord::Surface(
        NurbsSurface::new(
            poles, weights, u_degree, v_degree, u_knots, v_knots, u_periodic, v_periodic,
        )
        .unwrap(),
    )
}

/// One randomized document of 1 to 5 mixed face records. Every numeric field
/// is an exact decimal, so `serialize -> parse -> serialize` is byte-stable.
pub fn random_document(rng: &mut ChaCha8Rng, index: usize) -> SolidDocument {
    let normals = exact_unit_normals();
    let n_faces = rng.gen_range(1..=5);
    let faces = (0..n_faces)
        .map(|_| match rng.gen_range(0..6) {
            0 => random_line(rng),
            1 => random_circle(rng, &normals),
            2 => random_ellipse(rng, &normals),
            3 => random_bezier(rng),
            4 => random_bspline(rng),
            _ => random_surface(rng),
        })
        .collect();
    let name = match index % 3 {
        0 => None,
        1 => Some(format!("part-{index}")),
        _ => Some(format!("fixture \"{index}\" \u{03b2}")),
    };
    SolidDocument::new(name, faces).unwrap()
}

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::path::PathBuf;

use hybrep::shapes;

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

pub fn golden_line(a: [f64; 3], b: [f64; 3]) -> FaceRecord {
    FaceRecord::Curve(PrimitiveCurve::Line(
        LineSegment::new(Point3::from(a), Point3::from(b)).unwrap(),
    ))
}

pub fn ellipse_face() -> SolidDocument {
    let arc = EllipseArc::new(
        Point3::new(0.5, -0.25, 2.0),
        Vec3::new(0.6, 0.8, 0.0),
        2.5,
        1.25,
        0.0,
        TAU,
    )
    .unwrap();
    SolidDocument::new(
        Some("bracket \"E7\"".into()),
        vec![FaceRecord::Curve(PrimitiveCurve::Ellipse(arc))],
    )
    .unwrap()
}

pub fn bezier_loop() -> SolidDocument {
    let bez = BezierCurve::new(
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 2.0, 0.0),
            Point3::new(3.0, 2.0, 0.0),
            Point3::new(4.0, 0.0, 0.0),
        ],
        3,
        0.0,
        1.0,
    )
    .unwrap();
    SolidDocument::new(
        Some("bezier-loop".into()),
        vec![
            FaceRecord::Curve(PrimitiveCurve::Bezier(bez)),
            golden_line([4.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
        ],
    )
    .unwrap()
}

pub fn bspline_loop() -> SolidDocument {
    let spline = NurbsCurve::polynomial(
        vec![
            Point3::new(-1.0, 0.0, 0.0),
            Point3::new(0.0, 1.5, 0.0),
            Point3::new(1.0, 0.0, 0.0),
        ],
        2,
        KnotVector::new(vec![0.0, 1.0], vec![3, 3]).unwrap(),
        0.0,
        1.0,
    )
    .unwrap();
    SolidDocument::new(
        Some("bspline-loop".into()),
        vec![
            FaceRecord::Curve(PrimitiveCurve::Bspline(spline)),
            golden_line([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]),
        ],
    )
    .unwrap()
}

/// Cylindrical band built from a u-periodic rational circle (8 poles, no
/// clamping) swept along a straight v line; exercises periodic directions and
/// weight runs in one record.
pub fn rational_patch() -> SolidDocument {
    let ring = [
        [1.0, 0.0],
        [1.0, 1.0],
        [0.0, 1.0],
        [-1.0, 1.0],
        [-1.0, 0.0],
        [-1.0, -1.0],
        [0.0, -1.0],
        [1.0, -1.0],
    ];
    let poles: Vec<Vec<Point3>> = ring
        .iter()
        .map(|&[x, y]| vec![Point3::new(x, y, 0.0), Point3::new(x, y, 1.0)])
        .collect();
    let weights: Vec<Vec<f64>> = (0..8)
        .map(|i| {
            let w = if i % 2 == 0 { 1.0 } else { FRAC_1_SQRT_2 };
            vec![w, w]
        })
        .collect();
    let surface = NurbsSurface::new(
        poles,
        weights,
        2,
        1,
        KnotVector::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![2, 2, 2, 2, 2]).unwrap(),
        KnotVector::new(vec![0.0, 1.0], vec![2, 2]).unwrap(),
        true,
        false,
    )
    .unwrap();
    SolidDocument::new(
        Some("rational-patch".into()),
        vec![FaceRecord::Surface(surface)],
    )
    .unwrap()
}

pub fn fixtures() -> Vec<(&'static str, SolidDocument)> {
    vec![
        ("patch", shapes::bilinear_patch().unwrap()),
        ("cube", shapes::cube(1.0).unwrap()),
        ("cylinder", shapes::cylinder(1.0, 2.0).unwrap()),
        ("sphere", shapes::sphere(1.5).unwrap()),
        ("washer", shapes::washer(0.97, 1.0, 0.3).unwrap()),
        ("plate_with_hole", shapes::plate_with_hole(4.0, 1.0).unwrap()),
        ("ellipse_face", ellipse_face()),
        ("bezier_loop", bezier_loop()),
        ("bspline_loop", bspline_loop()),
        ("rational_patch", rational_patch()),
    ]
}

/// Arbitrary (not necessarily clamped) knot vector with a positive-width
/// domain for the given degree.
pub fn random_general_knots(rng: &mut ChaCha8Rng, degree: usize) -> KnotVector {
    loop {
        let count = rng.gen_range(2..=6);
        let mut knots = vec![rng.gen_range(-2.0..0.0)];
        for _ in 1..count {
            knots.push(knots.last().unwrap() + rng.gen_range(0.05..1.0));
        }
        let mults = (0..count)
            .map(|_| rng.gen_range(1..=degree as u32 + 1))
            .collect();
        let kv = KnotVector::new(knots, mults).unwrap();
        let e = kv.expanded();
        if e.len() >= degree + 2 && e[degree] < e[e.len() - degree - 1] {
            return kv;
        }
    }
}

/// Domain of `basis_functions` for this knot vector and degree.
pub fn general_domain(kv: &KnotVector, degree: usize) -> (f64, f64) {
    let e = kv.expanded();
    (e[degree], e[e.len() - degree - 1])
}

pub fn domain_samples(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<f64> {
    let mut samples = vec![lo, hi];
    samples.extend((0..8).map(|_| rng.gen_range(lo..hi)));
    samples
}
