pub mod curate;
pub mod metadata;
pub mod metrics;
pub mod roundtrip;
pub mod sample;
pub mod tessellate;
pub mod validate;

use std::path::Path;

use hybrep::document::Violation;
use serde::Serialize;

/// Per-file validity record, printed as one JSON line on standard out.
#[derive(Serialize)]
pub struct FileReport<'a> {
    pub file: String,
    pub valid: bool,
    pub violations: &'a [Violation],
}

impl<'a> FileReport<'a> {
    pub fn new(path: &Path, violations: &'a [Violation]) -> FileReport<'a> {
        FileReport {
            file: path.display().to_string(),
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn print(&self) {
        println!("{}", serde_json::to_string(self).expect("report serializes"));
    }
}
