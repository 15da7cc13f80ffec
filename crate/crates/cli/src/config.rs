//! Run parameters shared by the subcommands, with the precedence
//! flags > config file > built-in defaults. The config file is this struct
//! as JSON (`ratios` as a three-element array); its default path comes from
//! the `HYBREP_CONFIG` environment variable.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::util::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Chord tolerance for validation and tessellation.
    pub chord_tolerance: f64,
    /// Points sampled per solid.
    pub n_points: usize,
    /// Seed for every randomized draw.
    pub seed: u64,
    /// Histogram resolution per axis for the JSD.
    pub jsd_grid: usize,
    /// Chamfer threshold below which a NURBS representation is kept.
    pub epsilon: f64,
    /// Simple/moderate/complex sampling ratios.
    pub ratios: (f64, f64, f64),
    /// Default output path for commands that write a file.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            chord_tolerance: 1e-3,
            n_points: 8192,
            seed: 0,
            jsd_grid: 32,
            epsilon: 6e-4,
            ratios: (0.10, 0.50, 0.40),
            output: None,
        }
    }
}

impl RunConfig {
    /// Defaults overlaid with the config file named by `flag` or, failing
    /// that, by `HYBREP_CONFIG`. No file anywhere means plain defaults.
    pub fn load(flag: Option<&Path>) -> Result<RunConfig, Failure> {
        let from_env = env::var_os("HYBREP_CONFIG").filter(|v| !v.is_empty());
        let path = match (flag, &from_env) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => PathBuf::from(p),
            (None, None) => return Ok(RunConfig::default()),
        };
        let text = fs::read(&path)
            .map_err(|e| Failure::Environment(format!("config {}: {e}", path.display())))?;
        serde_json::from_slice(&text)
            .map_err(|e| Failure::Environment(format!("config {}: {e}", path.display())))
    }

    pub fn check(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Environment(m));
        if !(self.chord_tolerance > 0.0) || !self.chord_tolerance.is_finite() {
            return bad(format!("chord tolerance must be positive, got {}", self.chord_tolerance));
        }
        if self.n_points == 0 {
            return bad("point count must be at least 1".into());
        }
        if self.jsd_grid == 0 {
            return bad("JSD grid resolution must be at least 1".into());
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        let (a, b, c) = self.ratios;
        if !(a >= 0.0 && b >= 0.0 && c >= 0.0) {
            return bad(format!("ratios must be non-negative, got {a}/{b}/{c}"));
        }
        if (a + b + c - 1.0).abs() > 1e-9 {
            return bad(format!("ratios must sum to 1, got {a}/{b}/{c}"));
        }
        Ok(())
    }
}
