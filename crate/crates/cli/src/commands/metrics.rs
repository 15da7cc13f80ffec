use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hybrep::metrics::{evaluate_pairs, DocumentPair, MetricConfig};

use crate::config::RunConfig;
use crate::util::{atomic_write, json_files, read_bytes, stem, Failure};

/// Pair generated and reference directories by file stem and print the
/// metric report. Unpaired files are excluded with a warning; an invalid
/// reference document is a hard error.
pub fn run(
    generated: &Path,
    reference: &Path,
    output: Option<&Path>,
    config: &RunConfig,
) -> Result<i32, Failure> {
    let gen_map: BTreeMap<String, PathBuf> =
        json_files(generated)?.into_iter().map(|p| (stem(&p), p)).collect();
    let ref_map: BTreeMap<String, PathBuf> =
        json_files(reference)?.into_iter().map(|p| (stem(&p), p)).collect();
    for name in gen_map.keys().filter(|n| !ref_map.contains_key(*n)) {
        eprintln!("warning: unpaired generated document {name:?} excluded");
    }
    for name in ref_map.keys().filter(|n| !gen_map.contains_key(*n)) {
        eprintln!("warning: unpaired reference document {name:?} excluded");
    }

    let mut pairs = Vec::new();
    for (name, gen_path) in &gen_map {
        if let Some(ref_path) = ref_map.get(name) {
            pairs.push(DocumentPair {
                name: name.clone(),
                generated: read_bytes(gen_path)?,
                reference: read_bytes(ref_path)?,
            });
        }
    }
    if pairs.is_empty() {
        return Err(Failure::Domain("no paired documents between the directories".into()));
    }

    let metric_config = MetricConfig {
        n_points: config.n_points,
        seed: config.seed,
        chord_tolerance: config.chord_tolerance,
        jsd_grid: config.jsd_grid,
    };
    let report = evaluate_pairs(&pairs, &metric_config)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let json = report.to_json();
    println!("{json}");
    if let Some(path) = output.map(Path::to_path_buf).or_else(|| config.output.clone()) {
        atomic_write(&path, format!("{json}\n").as_bytes())?;
    }
    Ok(0)
}
