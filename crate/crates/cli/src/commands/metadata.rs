use std::path::Path;

use hybrep::document::parse_document;
use hybrep::topo::compute_metadata;

use crate::config::RunConfig;
use crate::util::{read_bytes, Failure};

/// Print the size, area, volume, and through-hole record of one document.
pub fn run(input: &Path, config: &RunConfig) -> Result<i32, Failure> {
    let text = read_bytes(input)?;
    let doc = parse_document(&text)
        .map_err(|e| Failure::Domain(format!("{}: {e}", input.display())))?;
    let meta = compute_metadata(&doc, config.chord_tolerance)
        .map_err(|e| Failure::Domain(format!("{}: {e}", input.display())))?;
    println!("{}", meta.to_json());
    Ok(0)
}
