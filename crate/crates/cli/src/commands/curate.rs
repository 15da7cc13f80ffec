use std::io::Write;
use std::path::Path;

use hybrep::curation::{complexity_score, curate_corpus, extract_features, FeatureStats, ScoredPart};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::util::{atomic_write, json_files, read_bytes, stem, Failure};

/// Score every document in a directory and sample a tiered subset. The
/// manifest (JSON lines) goes to `--output` or standard out; per-feature
/// min/max ranges go to `--stats` when given.
pub fn run(
    dir: &Path,
    target: usize,
    output: Option<&Path>,
    stats_path: Option<&Path>,
    config: &RunConfig,
) -> Result<i32, Failure> {
    let files = json_files(dir)?;
    if files.is_empty() {
        return Err(Failure::Domain(format!("no documents in {}", dir.display())));
    }
    let texts: Vec<Vec<u8>> = files.iter().map(|f| read_bytes(f)).collect::<Result<_, _>>()?;
    let extracted: Vec<_> = texts
        .par_iter()
        .map(|text| extract_features(text, config.chord_tolerance))
        .collect();

    let mut features = Vec::with_capacity(files.len());
    let mut bad = Vec::new();
    for (file, result) in files.iter().zip(extracted) {
        match result {
            Ok(f) => features.push(f),
            Err(e) => bad.push(format!("{}: {e}", file.display())),
        }
    }
    if !bad.is_empty() {
        return Err(Failure::Domain(format!(
            "feature extraction failed for {} document(s): {}",
            bad.len(),
            bad.join("; ")
        )));
    }

    let stats = FeatureStats::collect(&features).map_err(|e| Failure::Domain(e.to_string()))?;
    let mut parts = Vec::with_capacity(files.len());
    for (file, feature) in files.iter().zip(&features) {
        let (w, tier) =
            complexity_score(feature, &stats).map_err(|e| Failure::Domain(e.to_string()))?;
        parts.push(ScoredPart { id: stem(file), w, tier });
    }

    let manifest = curate_corpus(&parts, target, config.ratios, config.seed)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    for note in &manifest.notes {
        eprintln!("note: {note}");
    }
    let jsonl = manifest.to_jsonl();
    match output.map(Path::to_path_buf).or_else(|| config.output.clone()) {
        Some(path) => atomic_write(&path, jsonl.as_bytes())?,
        None => std::io::stdout()
            .write_all(jsonl.as_bytes())
            .map_err(|e| Failure::Environment(format!("stdout: {e}")))?,
    }
    if let Some(path) = stats_path {
        atomic_write(path, format!("{}\n", stats.to_json()).as_bytes())?;
    }
    Ok(0)
}
