//! Process-level plumbing: the exit-code contract, atomic file writes, and
//! input discovery.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

/// A failed run. Domain failures (invalid documents, impossible requests)
/// exit with code 1; environment failures (unreadable paths, bad config)
/// exit with code 2.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Environment(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Environment(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Environment(m) => m,
        }
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Environment(format!("{}: {e}", path.display())))
}

/// Write via a temporary file in the target directory, then rename, so a
/// crash never leaves a partial file under the final name.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let err = |e: std::io::Error| Failure::Environment(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let name = path
        .file_name()
        .ok_or_else(|| Failure::Environment(format!("{}: not a file path", path.display())))?;
    let tmp = dir
        .unwrap_or(Path::new("."))
        .join(format!(".{}.tmp{}", name.to_string_lossy(), process::id()));
    fs::write(&tmp, bytes).map_err(err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        err(e)
    })
}

/// Every `.json` file directly inside `dir`, sorted by file name.
pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let err = |e: std::io::Error| Failure::Environment(format!("{}: {e}", dir.display()));
    let entries = fs::read_dir(dir)
        .map_err(err)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<Vec<PathBuf>, _>>()
        .map_err(err)?;
    let mut files: Vec<PathBuf> = entries
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// File name without the `.json` extension; used as the document id.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
