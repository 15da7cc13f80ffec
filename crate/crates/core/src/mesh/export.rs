//! Mesh and point-cloud writers: ASCII OBJ, binary STL, ASCII XYZ, binary PLY.

use std::fmt::Write as _;

use super::{MeshError, PointCloud, TriMesh};

/// Mesh output formats supported by the exporters and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Stl,
}

fn require_nonempty(mesh: &TriMesh) -> Result<(), MeshError> {
    if mesh.vertices.is_empty() || mesh.triangles.is_empty() {
        return Err(MeshError::Degenerate("cannot export an empty mesh".into()));
    }
    mesh.check()
}

/// Wavefront OBJ with 1-based indices.
pub fn export_obj(mesh: &TriMesh) -> Result<Vec<u8>, MeshError> {
    require_nonempty(mesh)?;
    let mut out = String::new();
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    Ok(out.into_bytes())
}

/// Binary little-endian STL: 80-byte header, u32 triangle count, then
/// 50 bytes per triangle (normal, three vertices, attribute count).
pub fn export_stl(mesh: &TriMesh) -> Result<Vec<u8>, MeshError> {
    require_nonempty(mesh)?;
    let mut out = Vec::with_capacity(84 + 50 * mesh.triangles.len());
    let mut header = [0u8; 80];
    let tag = b"binary STL";
    header[..tag.len()].copy_from_slice(tag);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.triangles.len() as u32).to_le_bytes());
    for t in &mesh.triangles {
        let n = mesh.triangle_normal(*t);
        let n = if n.norm() > 0.0 { n.normalize() } else { n };
        for c in 0..3 {
            out.extend_from_slice(&(n[c] as f32).to_le_bytes());
        }
        for &vi in t {
            let v = mesh.vertices[vi];
            for c in 0..3 {
                out.extend_from_slice(&(v[c] as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    Ok(out)
}

/// ASCII XYZ: one `x y z` triple per line.
pub fn export_xyz(cloud: &PointCloud) -> Result<Vec<u8>, MeshError> {
    if cloud.is_empty() {
        return Err(MeshError::Degenerate(
            "cannot export an empty point cloud".into(),
        ));
    }
    let mut out = String::new();
    for p in &cloud.points {
        writeln!(out, "{} {} {}", p.x, p.y, p.z).unwrap();
    }
    Ok(out.into_bytes())
}

/// Binary little-endian PLY with double-precision vertex properties.
pub fn export_ply(cloud: &PointCloud) -> Result<Vec<u8>, MeshError> {
    if cloud.is_empty() {
        return Err(MeshError::Degenerate(
            "cannot export an empty point cloud".into(),
        ));
    }
    let mut out = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nend_header\n",
        cloud.len()
    )
    .into_bytes();
    for p in &cloud.points {
        for c in 0..3 {
            out.extend_from_slice(&p[c].to_le_bytes());
        }
    }
    Ok(out)
}
