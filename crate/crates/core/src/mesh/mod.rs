//! Triangle meshes and point clouds: tessellation, welding, normalization,
//! area-uniform sampling, and file export.

use std::collections::HashMap;

use crate::{Point3, Vec3};

mod export;
mod sample;
mod tessellate;

pub use export::{export_obj, export_ply, export_stl, export_xyz, MeshFormat};
pub use sample::{sample_points, sample_points_on_mesh};
pub(crate) use tessellate::tessellate_groups;
pub use tessellate::{tessellate_document, tessellate_surface};

/// Triangles with less cross-product area than this are dropped as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Welding tolerance used when fusing per-face meshes of a document.
pub const WELD_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, thiserror::Error)]
pub enum MeshError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("tessellation failure: {0}")]
    Tessellation(String),
    #[error("invalid mesh: {0}")]
    Structure(String),
}

/// Indexed triangle mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
}

/// Unordered set of 3D sample points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point3>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Self {
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Self {
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// Structural soundness: indices in range, coordinates finite.
    pub fn check(&self) -> Result<(), MeshError> {
        if let Some(p) = self.vertices.iter().find(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(MeshError::Structure(format!(
                "non-finite vertex coordinates {p:?}"
            )));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.vertices.len()) {
                return Err(MeshError::Structure(format!(
                    "triangle {i} references a vertex out of range"
                )));
            }
        }
        Ok(())
    }

    /// Unnormalized triangle normal; its length is twice the triangle area.
    pub fn triangle_normal(&self, tri: [usize; 3]) -> Vec3 {
        let [a, b, c] = tri;
        (self.vertices[b] - self.vertices[a]).cross(&(self.vertices[c] - self.vertices[a]))
    }

    pub fn triangle_area(&self, tri: [usize; 3]) -> f64 {
        self.triangle_normal(tri).norm() * 0.5
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| self.triangle_area(*t)).sum()
    }

    pub fn aabb(&self) -> Option<(Point3, Point3)> {
        let first = *self.vertices.first()?;
        let (mut lo, mut hi) = (first, first);
        for p in &self.vertices {
            for c in 0..3 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        Some((lo, hi))
    }

    /// Drop triangles with repeated vertices or area below [`DEGENERATE_AREA`].
    pub fn without_degenerate_triangles(mut self) -> Self {
        self.triangles.retain(|t| {
            t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && {
                let n = (self.vertices[t[1]] - self.vertices[t[0]])
                    .cross(&(self.vertices[t[2]] - self.vertices[t[0]]));
                n.norm() * 0.5 >= DEGENERATE_AREA
            }
        });
        self
    }

    /// Remove vertices not referenced by any triangle.
    pub fn compacted(self) -> Self {
        let mut keep = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &v in t {
                keep[v] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, p) in self.vertices.into_iter().enumerate() {
            if keep[i] {
                remap[i] = vertices.len();
                vertices.push(p);
            }
        }
        let triangles = self
            .triangles
            .into_iter()
            .map(|t| t.map(|v| remap[v]))
            .collect();
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// Fuse vertices closer than `tolerance` (greedy, first occurrence wins),
    /// dropping triangles that collapse. Candidate representatives are found
    /// through a spatial hash over cells of the tolerance size, scanning the
    /// 27-cell neighborhood so matches straddling cell boundaries are caught.
    pub fn welded(&self, tolerance: f64) -> Self {
        assert!(tolerance > 0.0, "weld tolerance must be positive");
        let cell = |p: &Point3| {
            [
                (p.x / tolerance).floor() as i64,
                (p.y / tolerance).floor() as i64,
                (p.z / tolerance).floor() as i64,
            ]
        };
        let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        let mut vertices: Vec<Point3> = Vec::with_capacity(self.vertices.len());
        let mut remap = Vec::with_capacity(self.vertices.len());
        for p in &self.vertices {
            let c = cell(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let key = [c[0] + dx, c[1] + dy, c[2] + dz];
                        for &j in grid.get(&key).into_iter().flatten() {
                            if (vertices[j] - p).norm() <= tolerance {
                                found = Some(j);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let j = found.unwrap_or_else(|| {
                vertices.push(*p);
                grid.entry(c).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            remap.push(j);
        }
        let triangles = self.triangles.iter().map(|t| t.map(|v| remap[v])).collect();
        TriMesh {
            vertices,
            triangles,
        }
        .without_degenerate_triangles()
        .compacted()
    }
}

/// Uniformly scale and translate the mesh so its bounding box becomes the
/// origin-centered 2x2x2 cube (longest side maps to 2, aspect preserved).
/// Returns the transform as `p' = scale * p + translation`.
pub fn normalize_to_box(mesh: &TriMesh) -> Result<(TriMesh, f64, Vec3), MeshError> {
    let (lo, hi) = mesh
        .aabb()
        .ok_or_else(|| MeshError::Degenerate("empty mesh has no bounding box".into()))?;
    let extent = hi - lo;
    let longest = extent.max();
    if !(longest > 0.0) {
        return Err(MeshError::Degenerate(
            "zero-extent geometry cannot be normalized".into(),
        ));
    }
    let scale = 2.0 / longest;
    let center = nalgebra::center(&lo, &hi);
    let translation = -scale * center.coords;
    let vertices = mesh
        .vertices
        .iter()
        .map(|p| Point3::from(scale * p.coords + translation))
        .collect();
    Ok((
        TriMesh {
            vertices,
            triangles: mesh.triangles.clone(),
        },
        scale,
        translation,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_triangles() -> TriMesh {
        TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(1.0, 1.0, 1.0),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        )
    }

    #[test]
    fn area_of_unit_right_triangle() {
        let mesh = two_triangles();
        assert_relative_eq!(mesh.triangle_area([0, 1, 2]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_triangles_are_dropped() {
        let mut mesh = two_triangles();
        mesh.triangles.push([0, 0, 1]);
        mesh.triangles.push([0, 1, 1]);
        let cleaned = mesh.without_degenerate_triangles();
        assert_eq!(cleaned.triangles.len(), 2);
    }

    #[test]
    fn welding_fuses_duplicate_borders() {
        let eps = 1e-9;
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(1.0 + eps, 0.0, 0.0),
                Point3::new(0.0, 1.0 + eps, 0.0),
                Point3::new(1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [3, 5, 4]],
        );
        let welded = mesh.welded(1e-7);
        assert_eq!(welded.vertices.len(), 4);
        assert_eq!(welded.triangles.len(), 2);
    }

    #[test]
    fn welding_catches_cell_straddlers() {
        // Points on opposite sides of a quantization boundary.
        let t = WELD_TOLERANCE;
        let mesh = TriMesh::new(
            vec![
                Point3::new(t * 10.0 - t * 0.4, 0.0, 0.0),
                Point3::new(t * 10.0 + t * 0.4, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 2, 3], [1, 3, 2]],
        );
        let welded = mesh.welded(t);
        assert_eq!(welded.vertices.len(), 3);
    }

    #[test]
    fn normalize_maps_unit_box_to_centered_two_box() {
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 1.0),
                Point3::new(1.0, 0.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        let (out, scale, translation) = normalize_to_box(&mesh).unwrap();
        assert_relative_eq!(scale, 2.0);
        assert_relative_eq!(translation, Vec3::new(-1.0, -1.0, -1.0));
        let (lo, hi) = out.aabb().unwrap();
        assert_relative_eq!(lo, Point3::new(-1.0, -1.0, -1.0), epsilon = 1e-15);
        assert_relative_eq!(hi, Point3::new(1.0, 1.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn normalize_preserves_aspect() {
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(4.0, 2.0, 0.0),
                Point3::new(4.0, 0.0, 1.0),
            ],
            vec![[0, 1, 2]],
        );
        let (out, scale, _) = normalize_to_box(&mesh).unwrap();
        assert_relative_eq!(scale, 0.5);
        let (lo, hi) = out.aabb().unwrap();
        assert_relative_eq!(hi - lo, Vec3::new(2.0, 1.0, 0.5), epsilon = 1e-15);
    }

    #[test]
    fn normalize_rejects_zero_extent() {
        let mesh = TriMesh::new(vec![Point3::origin(); 3], vec![[0, 1, 2]]);
        assert!(matches!(
            normalize_to_box(&mesh),
            Err(MeshError::Degenerate(_))
        ));
    }
}
