//! Validity reports. A document is valid iff it parses, every structural
//! invariant holds (enforced by the typed constructors during parsing), and
//! every face group tessellates to finite, non-empty geometry.

use serde::Serialize;

use crate::mesh::tessellate_groups;

use super::{parse_document, DocumentError, SolidDocument};

/// One validity problem; an empty violation list means the input is valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl From<DocumentError> for Violation {
    fn from(err: DocumentError) -> Self {
        match err {
            DocumentError::Syntax(message) => Violation {
                path: "$".into(),
                message: format!("JSON syntax error: {message}"),
            },
            DocumentError::Invalid { path, message } => Violation { path, message },
        }
    }
}

/// Validate raw bytes: parse failures become the single violation, otherwise
/// the parsed document is probed as in [`validate_document`].
pub fn validate_text(text: &[u8], chord_tolerance: f64) -> Vec<Violation> {
    match parse_document(text) {
        Err(err) => vec![err.into()],
        Ok(doc) => validate_document(&doc, chord_tolerance),
    }
}

/// Probe every face group for tessellation health. Structural invariants are
/// already guaranteed by construction, so only geometric failures (zero-width
/// domains, non-planar or open primitive loops, empty output) can appear.
pub fn validate_document(doc: &SolidDocument, chord_tolerance: f64) -> Vec<Violation> {
    if !(chord_tolerance > 0.0) {
        return vec![Violation {
            path: "$".into(),
            message: "chord tolerance must be positive".into(),
        }];
    }
    tessellate_groups(doc, chord_tolerance)
        .into_iter()
        .filter_map(|(label, result)| {
            result.err().map(|msg| Violation {
                path: label,
                message: format!("tessellation failure: {msg}"),
            })
        })
        .collect()
}
