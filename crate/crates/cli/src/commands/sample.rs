use std::path::Path;

use clap::ValueEnum;
use hybrep::document::{parse_document, validate_text};
use hybrep::mesh::{export_ply, export_xyz, sample_points, tessellate_document};

use super::tessellate::resolve_output;
use super::FileReport;
use crate::config::RunConfig;
use crate::util::{atomic_write, read_bytes, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CloudFormat {
    Xyz,
    Ply,
}

impl CloudFormat {
    fn extension(self) -> &'static str {
        match self {
            CloudFormat::Xyz => "xyz",
            CloudFormat::Ply => "ply",
        }
    }
}

/// Sample a bounding-box-normalized point cloud from one document and write
/// it as XYZ text or binary PLY.
pub fn run(
    input: &Path,
    format: CloudFormat,
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
    let cloud = sample_points(&mesh, config.n_points, config.seed)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let bytes = match format {
        CloudFormat::Xyz => export_xyz(&cloud),
        CloudFormat::Ply => export_ply(&cloud),
    }
    .map_err(|e| Failure::Domain(e.to_string()))?;

    let path = resolve_output(input, output, config, format.extension());
    atomic_write(&path, &bytes)?;
    eprintln!(
        "{}: sampled {} points (seed {}) -> {}",
        input.display(),
        cloud.points.len(),
        config.seed,
        path.display()
    );
    Ok(0)
}
