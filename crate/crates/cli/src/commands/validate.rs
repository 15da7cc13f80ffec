use std::fs;
use std::path::PathBuf;

use hybrep::document::validate_text;
use rayon::prelude::*;

use super::FileReport;
use crate::config::RunConfig;
use crate::util::{json_files, read_bytes, Failure};

/// Validate files or directories of documents. Prints one report line per
/// file plus a summary with the invalidity ratio; exits 0 only when every
/// document is valid.
pub fn run(inputs: &[PathBuf], config: &RunConfig) -> Result<i32, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        let meta = fs::metadata(input)
            .map_err(|e| Failure::Environment(format!("{}: {e}", input.display())))?;
        if meta.is_dir() {
            files.extend(json_files(input)?);
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Failure::Domain("no documents to validate".into()));
    }

    let texts: Vec<Vec<u8>> = files.iter().map(|f| read_bytes(f)).collect::<Result<_, _>>()?;
    let reports: Vec<_> = texts
        .par_iter()
        .map(|text| validate_text(text, config.chord_tolerance))
        .collect();

    let mut invalid = 0usize;
    for (file, violations) in files.iter().zip(&reports) {
        if !violations.is_empty() {
            invalid += 1;
        }
        FileReport::new(file, violations).print();
    }
    let summary = serde_json::json!({
        "files": files.len(),
        "invalid": invalid,
        "ir": invalid as f64 / files.len() as f64,
    });
    println!("{summary}");
    Ok(if invalid == 0 { 0 } else { 1 })
}
