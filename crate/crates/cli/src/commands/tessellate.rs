use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hybrep::document::{parse_document, validate_text};
use hybrep::mesh::{export_obj, export_stl, tessellate_document};

use super::FileReport;
use crate::config::RunConfig;
use crate::util::{atomic_write, read_bytes, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Obj,
    Stl,
}

impl MeshFormat {
    fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Stl => "stl",
        }
    }
}

/// Mesh one document and write it as OBJ or binary STL. An invalid document
/// prints its validation report and exits 1; tessellation failures name the
/// offending faces on standard error.
pub fn run(
    input: &Path,
    format: MeshFormat,
    output: Option<&Path>,
    config: &RunConfig,
) -> Result<i32, Failure> {
    let text = read_bytes(input)?;
    let violations = validate_text(&text, config.chord_tolerance);
    if !violations.is_empty() {
        FileReport::new(input, &violations).print();
        return Ok(1);
    }
    let doc = parse_document(&text).map_err(|e| Failure::Domain(e.to_string()))?;
    let mesh = tessellate_document(&doc, config.chord_tolerance)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let bytes = match format {
        MeshFormat::Obj => export_obj(&mesh),
        MeshFormat::Stl => export_stl(&mesh),
    }
    .map_err(|e| Failure::Domain(e.to_string()))?;

    let path = resolve_output(input, output, config, format.extension());
    atomic_write(&path, &bytes)?;
    eprintln!(
        "{}: {} faces -> {} vertices, {} triangles -> {}",
        input.display(),
        doc.faces().len(),
        mesh.vertices.len(),
        mesh.triangles.len(),
        path.display()
    );
    Ok(0)
}

pub fn resolve_output(
    input: &Path,
    flag: Option<&Path>,
    config: &RunConfig,
    extension: &str,
) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| input.with_extension(extension))
}
