//! Area-uniform point sampling over triangle meshes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Point3;

use super::{MeshError, PointCloud, TriMesh};

/// Draw `n` points area-uniformly in mesh coordinates. Returns the points and
/// the index of the triangle each point was drawn from.
pub fn sample_points_on_mesh(
    mesh: &TriMesh,
    n: usize,
    seed: u64,
) -> Result<(Vec<Point3>, Vec<usize>), MeshError> {
    if n == 0 {
        return Err(MeshError::Structure("sample count must be >= 1".into()));
    }
    if mesh.triangles.is_empty() {
        return Err(MeshError::Degenerate("mesh has no triangles".into()));
    }
    mesh.check()?;
    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for t in &mesh.triangles {
        total += mesh.triangle_area(*t);
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(MeshError::Degenerate("mesh has zero total area".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut owners = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = rng.gen::<f64>() * total;
        let ti = cumulative
            .partition_point(|&c| c <= pick)
            .min(mesh.triangles.len() - 1);
        let [ia, ib, ic] = mesh.triangles[ti];
        let (mut r0, mut r1) = (rng.gen::<f64>(), rng.gen::<f64>());
        if r0 + r1 > 1.0 {
            r0 = 1.0 - r0;
            r1 = 1.0 - r1;
        }
        let a = mesh.vertices[ia];
        let p = a + (mesh.vertices[ib] - a) * r0 + (mesh.vertices[ic] - a) * r1;
        points.push(p);
        owners.push(ti);
    }
    Ok((points, owners))
}

/// Area-uniform sampling followed by the affine map taking the mesh bounding
/// box into the unit cube (longest side to 1, box center to the cube center).
pub fn sample_points(mesh: &TriMesh, n: usize, seed: u64) -> Result<PointCloud, MeshError> {
    let (raw, _) = sample_points_on_mesh(mesh, n, seed)?;
    let (lo, hi) = mesh
        .aabb()
        .ok_or_else(|| MeshError::Degenerate("empty mesh has no bounding box".into()))?;
    let longest = (hi - lo).max();
    if !(longest > 0.0) {
        return Err(MeshError::Degenerate(
            "zero-extent geometry cannot be mapped to the unit cube".into(),
        ));
    }
    let scale = 1.0 / longest;
    let center = nalgebra::center(&lo, &hi);
    let half = crate::Vec3::new(0.5, 0.5, 0.5);
    let points = raw
        .into_iter()
        .map(|p| Point3::from((p - center) * scale + half))
        .collect();
    Ok(PointCloud::new(points))
}
