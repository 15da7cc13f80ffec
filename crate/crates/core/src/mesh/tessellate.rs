//! Surface and document tessellation.

use rayon::prelude::*;

use crate::document::{FaceGroupKind, SolidDocument};
use crate::nurbs::{NurbsError, NurbsSurface};
use crate::primitives::{triangulate_planar_face, PrimitiveFace};
use crate::Point3;

use super::{MeshError, TriMesh, WELD_TOLERANCE};

/// Cap on grid points per parametric direction during adaptive refinement.
const MAX_GRID: usize = 1024;

/// Starting sample count for one parametric direction: a point per distinct
/// knot plus enough samples for the degree, so faces that already meet the
/// tolerance (planar patches in particular) stay minimal while every
/// polynomial span is probed before the first refinement decision.
fn start_samples(distinct_knots: usize, degree: usize) -> usize {
    distinct_knots.max(degree + 1).max(2).min(MAX_GRID)
}

fn tess_err(e: NurbsError) -> MeshError {
    MeshError::Tessellation(e.to_string())
}

fn eval_grid(
    surface: &NurbsSurface,
    nu: usize,
    nv: usize,
) -> Result<Vec<Point3>, MeshError> {
    let ((u0, u1), (v0, v1)) = surface.domain();
    let mut grid = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = u0 + (u1 - u0) * i as f64 / (nu - 1) as f64;
        for j in 0..nv {
            let v = v0 + (v1 - v0) * j as f64 / (nv - 1) as f64;
            let p = surface.point(u, v).map_err(tess_err)?;
            if !p.coords.iter().all(|c| c.is_finite()) {
                return Err(MeshError::Tessellation(format!(
                    "non-finite surface point at ({u}, {v})"
                )));
            }
            grid.push(p);
        }
    }
    Ok(grid)
}

fn mesh_from_grid(grid: Vec<Point3>, nu: usize, nv: usize) -> TriMesh {
    let idx = |i: usize, j: usize| i * nv + j;
    let mut triangles = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let (v00, v10) = (idx(i, j), idx(i + 1, j));
            let (v11, v01) = (idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    TriMesh::new(grid, triangles)
        .without_degenerate_triangles()
        .compacted()
}

/// Tessellate the surface on a fixed `nu x nv` parameter grid. Degenerate
/// triangles (collapsed rows of revolved caps and the like) are dropped.
pub fn tessellate_surface(
    surface: &NurbsSurface,
    nu: usize,
    nv: usize,
) -> Result<TriMesh, MeshError> {
    if nu < 2 || nv < 2 {
        return Err(MeshError::Structure(
            "tessellation grid needs at least 2 samples per direction".into(),
        ));
    }
    let work = surface.unperiodize().map_err(tess_err)?;
    let grid = eval_grid(&work, nu, nv)?;
    Ok(mesh_from_grid(grid, nu, nv))
}

/// Max distance between span midpoints on the surface and the midpoint of the
/// corresponding grid chord, measured separately per direction.
fn grid_deviation(
    surface: &NurbsSurface,
    grid: &[Point3],
    nu: usize,
    nv: usize,
) -> Result<(f64, f64), MeshError> {
    let ((u0, u1), (v0, v1)) = surface.domain();
    let uat = |i: usize| u0 + (u1 - u0) * i as f64 / (nu - 1) as f64;
    let vat = |j: usize| v0 + (v1 - v0) * j as f64 / (nv - 1) as f64;
    let idx = |i: usize, j: usize| i * nv + j;

    let mut dev_u: f64 = 0.0;
    for i in 0..nu - 1 {
        let um = 0.5 * (uat(i) + uat(i + 1));
        for j in 0..nv {
            let mid = surface.point(um, vat(j)).map_err(tess_err)?;
            let chord = nalgebra::center(&grid[idx(i, j)], &grid[idx(i + 1, j)]);
            dev_u = dev_u.max((mid - chord).norm());
        }
    }
    let mut dev_v: f64 = 0.0;
    for j in 0..nv - 1 {
        let vm = 0.5 * (vat(j) + vat(j + 1));
        for i in 0..nu {
            let mid = surface.point(uat(i), vm).map_err(tess_err)?;
            let chord = nalgebra::center(&grid[idx(i, j)], &grid[idx(i, j + 1)]);
            dev_v = dev_v.max((mid - chord).norm());
        }
    }
    Ok((dev_u, dev_v))
}

/// Adaptive tessellation: start on a coarse grid and double the sample count
/// per direction until the chord deviation drops under the tolerance (or the
/// per-direction cap is hit).
pub(crate) fn adaptive_surface_mesh(
    surface: &NurbsSurface,
    chord_tolerance: f64,
) -> Result<TriMesh, MeshError> {
    let work = surface.unperiodize().map_err(tess_err)?;
    let (mut nu, mut nv) = (
        start_samples(work.u_knots().knots().len(), work.u_degree()),
        start_samples(work.v_knots().knots().len(), work.v_degree()),
    );
    loop {
        let grid = eval_grid(&work, nu, nv)?;
        let (dev_u, dev_v) = grid_deviation(&work, &grid, nu, nv)?;
        let refine_u = dev_u >= chord_tolerance && nu < MAX_GRID;
        let refine_v = dev_v >= chord_tolerance && nv < MAX_GRID;
        if !refine_u && !refine_v {
            return Ok(mesh_from_grid(grid, nu, nv));
        }
        if refine_u {
            nu = (nu * 2).min(MAX_GRID);
        }
        if refine_v {
            nv = (nv * 2).min(MAX_GRID);
        }
    }
}

/// Tessellate each face group independently. Returns one entry per group:
/// a `faces[i]` / `faces[i-j]` label and the mesh or failure message.
pub(crate) fn tessellate_groups(
    doc: &SolidDocument,
    chord_tolerance: f64,
) -> Vec<(String, Result<TriMesh, String>)> {
    let groups = doc.face_groups();
    let results: Vec<Result<TriMesh, String>> = groups
        .par_iter()
        .map(|group| {
            let mesh = match &group.kind {
                FaceGroupKind::Surface(surface) => {
                    adaptive_surface_mesh(surface, chord_tolerance).map_err(|e| e.to_string())
                }
                FaceGroupKind::Planar(curves) => {
                    let owned = curves.iter().map(|c| (*c).clone()).collect();
                    PrimitiveFace::new(owned)
                        .and_then(|face| triangulate_planar_face(&face, chord_tolerance))
                        .map_err(|e| e.to_string())
                }
            }?;
            if mesh.triangles.is_empty() {
                return Err("produced no triangles".into());
            }
            Ok(mesh)
        })
        .collect();
    groups
        .iter()
        .zip(results)
        .map(|(group, result)| {
            let label = if group.count == 1 {
                format!("faces[{}]", group.first_index)
            } else {
                format!(
                    "faces[{}-{}]",
                    group.first_index,
                    group.first_index + group.count - 1
                )
            };
            (label, result)
        })
        .collect()
}

/// Tessellate every face of a document and weld the results into one mesh.
///
/// NURBS faces are meshed adaptively to the chord tolerance; runs of planar
/// primitive records are assembled into faces and triangulated. Failures are
/// collected and reported together, labeled with the face indices involved.
pub fn tessellate_document(
    doc: &SolidDocument,
    chord_tolerance: f64,
) -> Result<TriMesh, MeshError> {
    if !(chord_tolerance > 0.0) {
        return Err(MeshError::Structure(
            "chord tolerance must be positive".into(),
        ));
    }
    let mut failures = Vec::new();
    let mut merged = TriMesh::default();
    for (label, result) in tessellate_groups(doc, chord_tolerance) {
        match result {
            Ok(mesh) => {
                let base = merged.vertices.len();
                merged.vertices.extend(mesh.vertices);
                merged
                    .triangles
                    .extend(mesh.triangles.iter().map(|t| t.map(|v| v + base)));
            }
            Err(msg) => failures.push(format!("{label}: {msg}")),
        }
    }
    if !failures.is_empty() {
        return Err(MeshError::Tessellation(failures.join("; ")));
    }
    Ok(merged.welded(WELD_TOLERANCE))
}
