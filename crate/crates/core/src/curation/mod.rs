//! Dataset curation: representation selection, complexity scoring, tiering,
//! and seeded corpus sampling.
//!
//! A solid's hybrid form replaces NURBS faces with analytic primitives only
//! when the swap is geometrically faithful, judged by chamfer distance
//! against the ground-truth cloud. Corpus curation then scores every part on
//! a weighted mix of representation size, hole count, thinness, and bounding
//! slenderness, buckets the scores into three tiers, and draws a seeded
//! sample with fixed tier ratios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::document::{fmt_real, parse_document};
use crate::mesh::{normalize_to_box, tessellate_document, PointCloud};
use crate::metrics::{chamfer_distance, MetricsError};
use crate::topo::metadata_of_mesh;

/// Chamfer threshold below which the NURBS form is kept.
pub const DEFAULT_EPSILON: f64 = 6e-4;
/// Default simple/moderate/complex sampling ratios.
pub const DEFAULT_RATIOS: (f64, f64, f64) = (0.10, 0.50, 0.40);
/// Upper complexity score of the simple tier.
pub const TIER_SIMPLE_MAX: f64 = 0.12;
/// Upper complexity score of the moderate tier.
pub const TIER_MODERATE_MAX: f64 = 0.23;

const SCORE_WEIGHTS: [f64; 4] = [0.35, 0.3, 0.25, 0.1];

#[derive(Debug, Clone, thiserror::Error)]
pub enum CurationError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("target size {target} exceeds corpus size {corpus}")]
    TargetTooLarge { target: usize, corpus: usize },
    #[error("token lexing failed: {0}")]
    Lex(String),
    #[error("geometry failed: {0}")]
    Geometry(String),
}

type Result<T> = std::result::Result<T, CurationError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    KeepNurbs,
    FallbackPrimitive,
}

/// Decide whether a NURBS face survives in the hybrid document.
///
/// The NURBS form is kept when its sampled cloud stays within `epsilon`
/// chamfer distance (inclusive) of the ground-truth cloud; otherwise the
/// face falls back to its analytic primitive. Returns the measured chamfer
/// distance alongside the decision for audit logs.
pub fn select_representation(
    nurbs_cloud: &PointCloud,
    reference_cloud: &PointCloud,
    epsilon: f64,
) -> Result<(Representation, f64)> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(CurationError::Config("epsilon must be positive and finite".into()));
    }
    let cd = chamfer_distance(nurbs_cloud, reference_cloud).map_err(|e| match e {
        MetricsError::Degenerate(msg) => CurationError::Degenerate(msg),
        other => CurationError::Degenerate(other.to_string()),
    })?;
    let decision = if cd <= epsilon {
        Representation::KeepNurbs
    } else {
        Representation::FallbackPrimitive
    };
    Ok((decision, cd))
}

/// Count lexical JSON tokens: every punctuation character, string literal,
/// number literal, and keyword literal counts one.
pub fn token_count(text: &[u8]) -> Result<u64> {
    serde_json::from_slice::<serde::de::IgnoredAny>(text)
        .map_err(|e| CurationError::Lex(e.to_string()))?;
    let mut count = 0u64;
    let mut i = 0;
    while i < text.len() {
        match text[i] {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'{' | b'}' | b'[' | b']' | b':' | b',' => {
                count += 1;
                i += 1;
            }
            b'"' => {
                count += 1;
                i += 1;
                while i < text.len() && text[i] != b'"' {
                    i += if text[i] == b'\\' { 2 } else { 1 };
                }
                i += 1;
            }
            b't' => {
                count += 1;
                i += 4;
            }
            b'f' => {
                count += 1;
                i += 5;
            }
            b'n' => {
                count += 1;
                i += 4;
            }
            b'-' | b'0'..=b'9' => {
                count += 1;
                while i < text.len() && matches!(text[i], b'0'..=b'9' | b'-' | b'+' | b'.' | b'e' | b'E')
                {
                    i += 1;
                }
            }
            other => {
                return Err(CurationError::Lex(format!(
                    "unexpected byte 0x{other:02x} at offset {i}"
                )));
            }
        }
    }
    Ok(count)
}

/// Raw complexity features of one part, measured on its 2x2x2-normalized
/// geometry. `area_volume_ratio` is infinite when the mesh is open or has
/// no volume; scoring substitutes the corpus maximum for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityFeatures {
    pub token_count: u64,
    pub through_holes: u64,
    pub area_volume_ratio: f64,
    pub bbox_diag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    fn fold(&mut self, x: f64) {
        if x.is_finite() {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
    }

    fn normalize(&self, x: f64) -> f64 {
        let x = if x.is_finite() { x } else { self.max };
        if self.max > self.min {
            (x - self.min) / (self.max - self.min)
        } else {
            0.0
        }
    }
}

/// Per-feature corpus minima and maxima, persisted next to the manifest so a
/// curation run can be reproduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureStats {
    pub token_count: FeatureRange,
    pub through_holes: FeatureRange,
    pub area_volume_ratio: FeatureRange,
    pub bbox_diag: FeatureRange,
}

impl FeatureStats {
    pub fn collect(features: &[ComplexityFeatures]) -> Result<FeatureStats> {
        if features.is_empty() {
            return Err(CurationError::Degenerate("no features to aggregate".into()));
        }
        let empty = FeatureRange {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        let mut stats = FeatureStats {
            token_count: empty,
            through_holes: empty,
            area_volume_ratio: empty,
            bbox_diag: empty,
        };
        for f in features {
            stats.token_count.fold(f.token_count as f64);
            stats.through_holes.fold(f.through_holes as f64);
            stats.area_volume_ratio.fold(f.area_volume_ratio);
            stats.bbox_diag.fold(f.bbox_diag);
        }
        // A corpus where every part is open leaves the ratio range empty.
        if stats.area_volume_ratio.min > stats.area_volume_ratio.max {
            stats.area_volume_ratio = FeatureRange { min: 0.0, max: 0.0 };
        }
        Ok(stats)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("feature stats serialize")
    }

    pub fn from_json(text: &str) -> Result<FeatureStats> {
        serde_json::from_str(text)
            .map_err(|e| CurationError::Config(format!("bad feature stats: {e}")))
    }

    fn check(&self) -> Result<()> {
        for (name, r) in [
            ("token_count", &self.token_count),
            ("through_holes", &self.through_holes),
            ("area_volume_ratio", &self.area_volume_ratio),
            ("bbox_diag", &self.bbox_diag),
        ] {
            if !r.min.is_finite() || !r.max.is_finite() || r.max < r.min {
                return Err(CurationError::Config(format!(
                    "feature stats for {name} are not a valid range"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Simple,
    Moderate,
    Complex,
}

impl Tier {
    pub fn name(&self) -> &'static str {
        match self {
            Tier::Simple => "simple",
            Tier::Moderate => "moderate",
            Tier::Complex => "complex",
        }
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tier of a complexity score; both thresholds are inclusive upper bounds.
pub fn tier_of(w: f64) -> Tier {
    if w <= TIER_SIMPLE_MAX {
        Tier::Simple
    } else if w <= TIER_MODERATE_MAX {
        Tier::Moderate
    } else {
        Tier::Complex
    }
}

/// Weighted complexity score over min-max normalized features:
/// w = 0.35 tokens + 0.3 holes + 0.25 area/volume + 0.1 diagonal.
/// Constant features contribute zero.
pub fn complexity_score(
    features: &ComplexityFeatures,
    stats: &FeatureStats,
) -> Result<(f64, Tier)> {
    stats.check()?;
    if !(features.area_volume_ratio >= 0.0) || !(features.bbox_diag >= 0.0) {
        return Err(CurationError::Degenerate(
            "complexity features must be non-negative".into(),
        ));
    }
    let normalized = [
        stats.token_count.normalize(features.token_count as f64),
        stats.through_holes.normalize(features.through_holes as f64),
        stats.area_volume_ratio.normalize(features.area_volume_ratio),
        stats.bbox_diag.normalize(features.bbox_diag),
    ];
    let w = SCORE_WEIGHTS
        .iter()
        .zip(&normalized)
        .map(|(l, t)| l * t)
        .sum::<f64>();
    Ok((w, tier_of(w)))
}

/// Measure the complexity features of one document text.
pub fn extract_features(text: &[u8], chord_tolerance: f64) -> Result<ComplexityFeatures> {
    let tokens = token_count(text)?;
    let doc = parse_document(text).map_err(|e| CurationError::Geometry(e.to_string()))?;
    let mesh = tessellate_document(&doc, chord_tolerance)
        .map_err(|e| CurationError::Geometry(e.to_string()))?;
    let (normalized, _, _) =
        normalize_to_box(&mesh).map_err(|e| CurationError::Geometry(e.to_string()))?;
    let meta = metadata_of_mesh(&normalized).map_err(|e| CurationError::Geometry(e.to_string()))?;
    let diag =
        (meta.length * meta.length + meta.width * meta.width + meta.height * meta.height).sqrt();
    let ratio = match meta.volume {
        Some(v) if v > 1e-12 => meta.surface_area / v,
        _ => f64::INFINITY,
    };
    Ok(ComplexityFeatures {
        token_count: tokens,
        through_holes: meta.genus.map_or(0, |g| g.max(0)) as u64,
        area_volume_ratio: ratio,
        bbox_diag: diag,
    })
}

/// One scored corpus member going into curation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPart {
    pub id: String,
    pub w: f64,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub id: String,
    pub w: f64,
    pub tier: Tier,
    pub selected: bool,
}

/// Result of a curation run: every part in corpus order with its selection
/// flag, plus log notes about quota redistribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CurationManifest {
    pub rows: Vec<ManifestRow>,
    pub notes: Vec<String>,
}

impl CurationManifest {
    /// JSON-lines payload, one row per part in corpus order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "{{\"id\":{},\"w\":{},\"tier\":\"{}\",\"selected\":{}}}\n",
                serde_json::to_string(&row.id).expect("string escapes"),
                fmt_real(row.w),
                row.tier,
                row.selected
            ));
        }
        out
    }

    pub fn selected_ids(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.selected)
            .map(|r| r.id.as_str())
            .collect()
    }
}

/// Split `total` into integer shares proportional to `weights` over the
/// eligible tiers, by floor plus largest fractional remainder.
fn apportion(total: usize, weights: [f64; 3], eligible: [bool; 3]) -> [usize; 3] {
    let weight_sum: f64 = (0..3).filter(|&i| eligible[i]).map(|i| weights[i]).sum();
    let mut shares = [0usize; 3];
    if total == 0 {
        return shares;
    }
    let mut fractions: Vec<(f64, usize)> = Vec::new();
    let mut assigned = 0;
    for i in 0..3 {
        if !eligible[i] || weight_sum <= 0.0 {
            continue;
        }
        let ideal = total as f64 * weights[i] / weight_sum;
        shares[i] = ideal.floor() as usize;
        assigned += shares[i];
        fractions.push((ideal - ideal.floor(), i));
    }
    // Ties go to the lower tier index.
    fractions.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut leftover = total - assigned;
    for &(_, i) in fractions.iter().cycle().take(fractions.len().max(1) * leftover.max(1)) {
        if leftover == 0 {
            break;
        }
        shares[i] += 1;
        leftover -= 1;
    }
    shares
}

/// Draw a seeded sample of `target_size` parts with the given tier ratios.
///
/// Quotas are apportioned by largest remainder. A tier smaller than its
/// quota contributes all members; the shortfall moves to the remaining
/// tiers in proportion to their ratios (or remaining capacity when those
/// ratios are zero), and the move is recorded in the manifest notes.
/// Sampling within a tier is a seeded partial shuffle of its id-sorted
/// members, so results do not depend on input order.
pub fn curate_corpus(
    parts: &[ScoredPart],
    target_size: usize,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<CurationManifest> {
    if parts.is_empty() {
        return Err(CurationError::Degenerate("empty corpus".into()));
    }
    if target_size > parts.len() {
        return Err(CurationError::TargetTooLarge {
            target: target_size,
            corpus: parts.len(),
        });
    }
    let weights = [ratios.0, ratios.1, ratios.2];
    if weights.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(CurationError::Config("ratios must be non-negative".into()));
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(CurationError::Config("ratios must sum to one".into()));
    }

    let tiers = [Tier::Simple, Tier::Moderate, Tier::Complex];
    let mut members: [Vec<usize>; 3] = Default::default();
    for (i, part) in parts.iter().enumerate() {
        members[part.tier as usize].push(i);
    }
    for tier in &mut members {
        tier.sort_by(|&a, &b| parts[a].id.cmp(&parts[b].id).then(a.cmp(&b)));
    }
    let sizes: [usize; 3] = std::array::from_fn(|i| members[i].len());

    let mut notes = Vec::new();
    let mut quota = [0usize; 3];
    let mut saturated = [false; 3];
    let mut remaining = target_size;
    while remaining > 0 {
        let eligible: [bool; 3] = std::array::from_fn(|i| !saturated[i]);
        let eligible_ratio_sum: f64 = (0..3).filter(|&i| eligible[i]).map(|i| weights[i]).sum();
        let shares = if eligible_ratio_sum > 0.0 {
            apportion(remaining, weights, eligible)
        } else {
            // Only zero-ratio tiers have room left; fall back to capacity.
            let capacity: [f64; 3] = std::array::from_fn(|i| (sizes[i] - quota[i]) as f64);
            notes.push("remaining quota spread by capacity over zero-ratio tiers".into());
            apportion(remaining, capacity, eligible)
        };
        remaining = 0;
        for i in 0..3 {
            quota[i] += shares[i];
            if quota[i] > sizes[i] {
                remaining += quota[i] - sizes[i];
                quota[i] = sizes[i];
                saturated[i] = true;
                notes.push(format!(
                    "tier {} undersized: kept all {} members, redistributing the shortfall",
                    tiers[i], sizes[i]
                ));
            }
        }
    }

    let mut selected = vec![false; parts.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..3 {
        let pool = &mut members[i];
        for k in 0..quota[i] {
            let j = rng.gen_range(k..pool.len());
            pool.swap(k, j);
        }
        for &part_index in &pool[..quota[i]] {
            selected[part_index] = true;
        }
    }

    let rows = parts
        .iter()
        .zip(&selected)
        .map(|(p, &sel)| ManifestRow {
            id: p.id.clone(),
            w: p.w,
            tier: p.tier,
            selected: sel,
        })
        .collect();
    Ok(CurationManifest { rows, notes })
}
