//! End-to-end meshing behavior: document tessellation, welding, sampling
//! statistics, normalization, and exporter payloads.

mod common;

use common::seeded;
use rand::Rng;

use hybrep::mesh::{
    export_ply, export_stl, normalize_to_box, sample_points, tessellate_document, PointCloud,
    TriMesh, WELD_TOLERANCE,
};
use hybrep::shapes;
use hybrep::topo::is_watertight;
use hybrep::Point3;

#[test]
fn sphere_tessellation_vertices_lie_on_the_surface() {
    let radius = 1.5;
    let doc = shapes::sphere(radius).unwrap();
    let mesh = tessellate_document(&doc, 1e-3).unwrap();
    assert!(is_watertight(&mesh));
    for v in &mesh.vertices {
        let r = v.coords.norm();
        assert!(
            (r - radius).abs() <= 1e-9 * radius,
            "vertex at radius {r}, expected {radius}"
        );
    }
}

#[test]
fn finer_tolerance_refines_the_mesh() {
    let doc = shapes::sphere(1.0).unwrap();
    let coarse = tessellate_document(&doc, 1e-2).unwrap();
    let fine = tessellate_document(&doc, 1e-4).unwrap();
    assert!(
        fine.triangles.len() > 2 * coarse.triangles.len(),
        "fine {} vs coarse {}",
        fine.triangles.len(),
        coarse.triangles.len()
    );
}

#[test]
fn unit_cube_samples_cover_all_faces_uniformly() {
    let doc = shapes::cube(2.0).unwrap();
    let mesh = tessellate_document(&doc, 1e-3).unwrap();
    let n = 60_000;
    let cloud = sample_points(&mesh, n, 11).unwrap();
    assert_eq!(cloud.len(), n);

    // sample_points maps into the unit cube; every point sits on its surface.
    let mut face_counts = [0usize; 6];
    for p in &cloud.points {
        for c in 0..3 {
            assert!((-1e-9..=1.0 + 1e-9).contains(&p[c]), "point {p} out of box");
        }
        let on = (0..3).find(|&c| p[c].abs() < 1e-9 || (p[c] - 1.0).abs() < 1e-9);
        let axis = on.expect("surface sample not on any cube face");
        face_counts[2 * axis + usize::from(p[axis] > 0.5)] += 1;
    }
    // Each face should receive about n/6; 10000 +- 5 standard deviations.
    let expected = n as f64 / 6.0;
    let sd = (expected * (1.0 - 1.0 / 6.0)).sqrt();
    for (face, &count) in face_counts.iter().enumerate() {
        assert!(
            (count as f64 - expected).abs() <= 5.0 * sd,
            "face {face} got {count} of {n} samples"
        );
    }

    // In-face coordinates of a cube-surface-uniform sample have mean 1/2 and
    // variance 5/36 per axis.
    for c in 0..3 {
        let mean: f64 = cloud.points.iter().map(|p| p[c]).sum::<f64>() / n as f64;
        let var: f64 =
            cloud.points.iter().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "axis {c} mean {mean}");
        assert!((var - 5.0 / 36.0).abs() < 0.005, "axis {c} variance {var}");
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let doc = shapes::cylinder(1.0, 2.0).unwrap();
    let mesh = tessellate_document(&doc, 1e-3).unwrap();
    let a = sample_points(&mesh, 2048, 5).unwrap();
    let b = sample_points(&mesh, 2048, 5).unwrap();
    let c = sample_points(&mesh, 2048, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn welding_merges_only_within_tolerance() {
    let quad = |shift: f64| -> Vec<Point3> {
        vec![
            Point3::new(0.0, 0.0 + shift, 0.0),
            Point3::new(1.0, 0.0 + shift, 0.0),
            Point3::new(1.0, 1.0 + shift, 0.0),
        ]
    };
    let near: Vec<Point3> = [quad(0.0), quad(1e-9)].concat();
    let mesh = TriMesh::new(near, vec![[0, 1, 2], [3, 4, 5]]);
    let welded = mesh.welded(WELD_TOLERANCE);
    assert_eq!(welded.vertices.len(), 3, "1e-9 duplicates must merge");

    let far: Vec<Point3> = [quad(0.0), quad(1e-5)].concat();
    let mesh = TriMesh::new(far, vec![[0, 1, 2], [3, 4, 5]]);
    let welded = mesh.welded(WELD_TOLERANCE);
    assert_eq!(welded.vertices.len(), 6, "1e-5 gaps must survive the weld");
}

#[test]
fn normalize_to_box_maps_into_centered_two_cube() {
    let mut rng = seeded(3);
    let vertices: Vec<Point3> = (0..50)
        .map(|_| {
            Point3::new(
                rng.gen_range(2.0..5.0),
                rng.gen_range(-1.0..0.5),
                rng.gen_range(10.0..10.4),
            )
        })
        .collect();
    let triangles = (0..16).map(|i| [i, i + 1, i + 2]).collect();
    let mesh = TriMesh::new(vertices, triangles);
    let (normalized, scale, translation) = normalize_to_box(&mesh).unwrap();

    let (lo, hi) = normalized.aabb().unwrap();
    let extent = hi - lo;
    assert!((extent.max() - 2.0).abs() < 1e-12, "longest side {}", extent.max());
    for c in 0..3 {
        assert!((lo[c] + hi[c]).abs() < 1e-12, "axis {c} not centered");
    }
    // Aspect ratio is preserved by the single uniform scale.
    let (olo, ohi) = mesh.aabb().unwrap();
    for c in 0..3 {
        assert!(((ohi[c] - olo[c]) * scale - extent[c]).abs() < 1e-12);
    }
    for (a, b) in mesh.vertices.iter().zip(&normalized.vertices) {
        assert!((scale * a.coords + translation - b.coords).norm() < 1e-12);
    }
}

#[test]
fn ply_payload_is_bit_exact_little_endian_doubles() {
    let cloud = PointCloud::new(vec![
        Point3::new(0.1, -2.5, 3.75),
        Point3::new(f64::MIN_POSITIVE, 1e300, -0.0),
    ]);
    let bytes = export_ply(&cloud).unwrap();
    let header_end = bytes
        .windows(11)
        .position(|w| w == b"end_header\n")
        .unwrap()
        + 11;
    let payload = &bytes[header_end..];
    assert_eq!(payload.len(), cloud.len() * 24);
    for (k, p) in cloud.points.iter().enumerate() {
        for c in 0..3 {
            let offset = (k * 3 + c) * 8;
            let stored = f64::from_le_bytes(payload[offset..offset + 8].try_into().unwrap());
            assert_eq!(stored.to_bits(), p[c].to_bits());
        }
    }
}

#[test]
fn stl_payload_matches_f32_vertices() {
    let doc = shapes::cube(1.0).unwrap();
    let mesh = tessellate_document(&doc, 1e-3).unwrap();
    let bytes = export_stl(&mesh).unwrap();
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    assert_eq!(count, mesh.triangles.len());
    assert_eq!(bytes.len(), 84 + 50 * count);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let base = 84 + 50 * t + 12; // skip the normal
        for (k, &vi) in tri.iter().enumerate() {
            for c in 0..3 {
                let offset = base + (k * 3 + c) * 4;
                let stored = f32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap());
                assert_eq!(stored, mesh.vertices[vi][c] as f32);
            }
        }
    }
}

#[test]
fn plate_with_hole_meshes_with_both_loops() {
    let doc = shapes::plate_with_hole(4.0, 1.0).unwrap();
    let mesh = tessellate_document(&doc, 1e-3).unwrap();
    assert!(!mesh.triangles.is_empty());
    // Flat annular region: area = side^2 - pi r^2, all vertices at z = 0.
    let area = mesh.total_area();
    let expected = 16.0 - std::f64::consts::PI;
    assert!(
        (area - expected).abs() / expected < 0.01,
        "area {area} vs {expected}"
    );
    assert!(mesh.vertices.iter().all(|v| v.z.abs() < 1e-9));
    // No triangle may cross into the hole.
    for t in &mesh.triangles {
        let centroid = (mesh.vertices[t[0]].coords
            + mesh.vertices[t[1]].coords
            + mesh.vertices[t[2]].coords)
            / 3.0;
        let r = ((centroid.x - 2.0).powi(2) + (centroid.y - 2.0).powi(2)).sqrt();
        assert!(r > 0.99, "triangle centroid inside the hole at radius {r}");
    }
}
