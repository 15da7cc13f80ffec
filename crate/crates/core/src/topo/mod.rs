//! Mesh topology and mass properties: bounding boxes, area, signed volume,
//! orientation repair, Euler characteristic / genus, and the metadata record
//! injected into annotation prompts.

use std::collections::HashMap;

use crate::document::{fmt_real, SolidDocument};
use crate::mesh::{tessellate_document, MeshError, TriMesh};
use crate::{Point3, Vec3};

#[derive(Debug, Clone, thiserror::Error)]
pub enum TopoError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("mesh is not watertight: {0}")]
    NotWatertight(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Axis-aligned bounding box summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
    pub extents: Vec3,
    pub diagonal: f64,
}

/// Componentwise min/max over the vertices. A mesh collapsing to a single
/// point (zero diagonal) is rejected as degenerate.
pub fn compute_aabb(mesh: &TriMesh) -> Result<Aabb, TopoError> {
    let (min, max) = mesh
        .aabb()
        .ok_or_else(|| TopoError::Degenerate("empty mesh has no bounding box".into()))?;
    let extents = max - min;
    let diagonal = extents.norm();
    if !(diagonal > 0.0) {
        return Err(TopoError::Degenerate(
            "bounding box has zero diagonal".into(),
        ));
    }
    Ok(Aabb {
        min,
        max,
        extents,
        diagonal,
    })
}

/// Sum of triangle areas.
pub fn surface_area(mesh: &TriMesh) -> f64 {
    mesh.total_area()
}

fn undirected(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn directed_edges(t: [usize; 3]) -> [(usize, usize); 3] {
    [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
}

/// Every undirected edge is shared by exactly two triangles traversing it in
/// opposite directions.
pub fn is_watertight(mesh: &TriMesh) -> bool {
    if mesh.triangles.is_empty() {
        return false;
    }
    let mut edges: HashMap<(usize, usize), (u32, u32)> = HashMap::new();
    for t in &mesh.triangles {
        for (a, b) in directed_edges(*t) {
            let entry = edges.entry(undirected(a, b)).or_insert((0, 0));
            if a < b {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    edges.values().all(|&(fwd, rev)| fwd == 1 && rev == 1)
}

/// Map from undirected edge to the triangles using it.
fn edge_incidence(mesh: &TriMesh) -> HashMap<(usize, usize), Vec<usize>> {
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        for (a, b) in directed_edges(*t) {
            edges.entry(undirected(a, b)).or_default().push(ti);
        }
    }
    edges
}

/// Breadth-first orientation repair: within each edge-connected component,
/// neighbor triangles are flipped so shared edges run in opposite directions.
/// Fails on edges with more than two incident triangles and on unorientable
/// complexes.
pub fn repair_orientation(mesh: &TriMesh) -> Result<TriMesh, TopoError> {
    let edges = edge_incidence(mesh);
    if let Some((edge, inc)) = edges.iter().find(|(_, inc)| inc.len() > 2) {
        return Err(TopoError::NonManifold(format!(
            "edge {edge:?} has {} incident triangles",
            inc.len()
        )));
    }
    let mut triangles = mesh.triangles.clone();
    let mut state = vec![0u8; triangles.len()]; // 0 unvisited, 1 queued/done
    let mut queue = std::collections::VecDeque::new();
    for seed in 0..triangles.len() {
        if state[seed] != 0 {
            continue;
        }
        state[seed] = 1;
        queue.push_back(seed);
        while let Some(ti) = queue.pop_front() {
            for (a, b) in directed_edges(triangles[ti]) {
                for &nb in &edges[&undirected(a, b)] {
                    if nb == ti {
                        continue;
                    }
                    // The neighbor is consistent iff it traverses (b, a).
                    let same_direction = directed_edges(triangles[nb])
                        .iter()
                        .any(|&(x, y)| (x, y) == (a, b));
                    if state[nb] == 0 {
                        if same_direction {
                            triangles[nb].swap(1, 2);
                        }
                        state[nb] = 1;
                        queue.push_back(nb);
                    } else if same_direction {
                        return Err(TopoError::NonManifold(
                            "unorientable triangle complex".into(),
                        ));
                    }
                }
            }
        }
    }
    Ok(TriMesh::new(mesh.vertices.clone(), triangles))
}

fn volume_sum_over(vertices: &[Point3], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|&[a, b, c]| {
            let (va, vb, vc) = (vertices[a], vertices[b], vertices[c]);
            va.coords.dot(&vb.coords.cross(&vc.coords)) / 6.0
        })
        .sum()
}

fn volume_sum(mesh: &TriMesh) -> f64 {
    volume_sum_over(&mesh.vertices, &mesh.triangles)
}

/// Divergence-theorem volume of a watertight, consistently oriented mesh.
/// Positive for outward orientation; callers wanting the physical volume
/// take the absolute value.
pub fn signed_volume(mesh: &TriMesh) -> Result<f64, TopoError> {
    if !is_watertight(mesh) {
        return Err(TopoError::NotWatertight(
            "signed volume requires a closed, consistently oriented mesh".into(),
        ));
    }
    Ok(volume_sum(mesh))
}

fn euler_counts(triangles: &[[usize; 3]]) -> (usize, usize, usize) {
    let mut vertices = std::collections::HashSet::new();
    let mut edges = std::collections::HashSet::new();
    for t in triangles {
        for &v in t {
            vertices.insert(v);
        }
        for (a, b) in directed_edges(*t) {
            edges.insert(undirected(a, b));
        }
    }
    (vertices.len(), edges.len(), triangles.len())
}

/// Euler characteristic and genus of a welded closed 2-manifold mesh,
/// computed globally: chi = V - E + F, genus = (2 - chi) / 2. A negative
/// genus indicates multiple components; per-component genus is what
/// [`compute_metadata`] reports.
pub fn euler_genus(mesh: &TriMesh) -> Result<(i64, i64), TopoError> {
    let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
    for t in &mesh.triangles {
        for (a, b) in directed_edges(*t) {
            *edge_count.entry(undirected(a, b)).or_insert(0) += 1;
        }
    }
    if mesh.triangles.is_empty() {
        return Err(TopoError::Degenerate("empty mesh".into()));
    }
    if let Some((edge, n)) = edge_count.iter().find(|(_, &n)| n != 2) {
        return Err(TopoError::NonManifold(format!(
            "edge {edge:?} has {n} incident triangles, expected 2"
        )));
    }
    let (v, e, f) = euler_counts(&mesh.triangles);
    let chi = v as i64 - e as i64 + f as i64;
    if (2 - chi) % 2 != 0 {
        return Err(TopoError::NonManifold(format!(
            "odd Euler defect for chi = {chi}"
        )));
    }
    Ok((chi, (2 - chi) / 2))
}

/// Edge-connected triangle components.
fn components(mesh: &TriMesh) -> Vec<Vec<[usize; 3]>> {
    let edges = edge_incidence(mesh);
    let mut seen = vec![false; mesh.triangles.len()];
    let mut out = Vec::new();
    for seed in 0..mesh.triangles.len() {
        if seen[seed] {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = std::collections::VecDeque::from([seed]);
        seen[seed] = true;
        while let Some(ti) = queue.pop_front() {
            component.push(mesh.triangles[ti]);
            for (a, b) in directed_edges(mesh.triangles[ti]) {
                for &nb in &edges[&undirected(a, b)] {
                    if !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
        }
        out.push(component);
    }
    out
}

/// The metadata payload computed for annotation prompts. Volume and hole
/// count are only meaningful for closed surfaces and are omitted otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct MetadataRecord {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub surface_area: f64,
    pub volume: Option<f64>,
    pub euler_characteristic: i64,
    pub genus: Option<i64>,
    pub watertight: bool,
}

impl MetadataRecord {
    /// JSON payload in the prompt-injection layout. `volume` and
    /// `through_holes` are omitted when the mesh is not watertight.
    pub fn to_json(&self) -> String {
        let mut out = format!(
            "{{\"length\":{},\"width\":{},\"height\":{},\"surface_area\":{}",
            fmt_real(self.length),
            fmt_real(self.width),
            fmt_real(self.height),
            fmt_real(self.surface_area)
        );
        if let Some(v) = self.volume {
            out.push_str(&format!(",\"volume\":{}", fmt_real(v)));
        }
        if let Some(g) = self.genus {
            out.push_str(&format!(",\"through_holes\":{g}"));
        }
        out.push_str(&format!(",\"watertight\":{}}}", self.watertight));
        out
    }
}

/// Tessellate a document and compute its metadata. Orientation is repaired
/// before the volume integral; meshes that stay open or unorientable report
/// `watertight = false` with volume and hole count omitted. Multi-component
/// meshes report the per-component genus sum and the sum of absolute
/// component volumes (disjoint solids; cavities are not subtracted).
pub fn compute_metadata(
    doc: &SolidDocument,
    chord_tolerance: f64,
) -> Result<MetadataRecord, TopoError> {
    metadata_of_mesh(&tessellate_document(doc, chord_tolerance)?)
}

/// Metadata of an existing mesh; see [`compute_metadata`].
pub fn metadata_of_mesh(mesh: &TriMesh) -> Result<MetadataRecord, TopoError> {
    let aabb = compute_aabb(mesh)?;
    let area = surface_area(mesh);
    let (v, e, f) = euler_counts(&mesh.triangles);
    let chi = v as i64 - e as i64 + f as i64;

    let repaired = repair_orientation(mesh).ok().filter(|m| is_watertight(m));
    let (volume, genus) = match &repaired {
        Some(mesh) => {
            let parts = components(mesh);
            let volume = parts
                .iter()
                .map(|tris| volume_sum_over(&mesh.vertices, tris).abs())
                .sum::<f64>();
            let genus = parts
                .iter()
                .map(|tris| {
                    let (v, e, f) = euler_counts(tris);
                    (2 - (v as i64 - e as i64 + f as i64)) / 2
                })
                .sum::<i64>();
            (Some(volume), Some(genus))
        }
        None => (None, None),
    };

    Ok(MetadataRecord {
        length: aabb.extents.x,
        width: aabb.extents.y,
        height: aabb.extents.z,
        surface_area: area,
        volume,
        euler_characteristic: chi,
        genus,
        watertight: repaired.is_some(),
    })
}
