//! Point-cloud distribution metrics for comparing generated solids against
//! references: chamfer distance, Hausdorff distance, Jensen-Shannon
//! divergence over occupancy histograms, minimum matching distance, and the
//! invalidity ratio of a batch.
//!
//! All distances are computed on unit-cube normalized clouds, so values are
//! comparable across solids of different physical size. Nearest-neighbor
//! queries run on a spatial grid whose results match brute force exactly.

use rayon::prelude::*;

use crate::document::{fmt_real, parse_document, validate_text, Violation};
use crate::mesh::{sample_points, tessellate_document, MeshError, PointCloud};
use crate::Point3;

pub mod nn;

use nn::NnIndex;

#[derive(Debug, Clone, thiserror::Error)]
pub enum MetricsError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("invalid reference document {name}: {detail}")]
    InvalidReference { name: String, detail: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

type Result<T> = std::result::Result<T, MetricsError>;

/// Mean squared distance from each point of `from` to its nearest neighbor
/// in `to`.
fn directed_mean_sq(from: &[Point3], to: &NnIndex) -> f64 {
    let sum: f64 = from.iter().map(|p| to.nearest_sq(p)).sum();
    sum / from.len() as f64
}

fn directed_max_sq(from: &[Point3], to: &NnIndex) -> f64 {
    from.iter()
        .map(|p| to.nearest_sq(p))
        .fold(0.0_f64, f64::max)
}

fn cd_between(a: &NnIndex, b: &NnIndex) -> f64 {
    directed_mean_sq(a.points(), b) + directed_mean_sq(b.points(), a)
}

fn hd_between(a: &NnIndex, b: &NnIndex) -> f64 {
    directed_max_sq(a.points(), b)
        .max(directed_max_sq(b.points(), a))
        .sqrt()
}

fn nonempty<'a>(cloud: &'a PointCloud, side: &str) -> Result<&'a [Point3]> {
    if cloud.points.is_empty() {
        return Err(MetricsError::Degenerate(format!("{side} cloud is empty")));
    }
    Ok(&cloud.points)
}

/// Symmetric chamfer distance: the sum of the two directed mean squared
/// nearest-neighbor distances.
pub fn chamfer_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    let pa = nonempty(a, "first")?;
    let pb = nonempty(b, "second")?;
    Ok(cd_between(&NnIndex::build(pa), &NnIndex::build(pb)))
}

/// Symmetric Hausdorff distance: the larger of the two directed maximum
/// nearest-neighbor distances, unsquared.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    let pa = nonempty(a, "first")?;
    let pb = nonempty(b, "second")?;
    Ok(hd_between(&NnIndex::build(pa), &NnIndex::build(pb)))
}

/// Occupancy histogram of every point of every cloud in the set, over a
/// `grid`^3 voxelization of the unit cube, normalized to sum to one.
fn histogram(set: &[PointCloud], grid: usize) -> Vec<f64> {
    let mut counts = vec![0.0_f64; grid * grid * grid];
    let mut total = 0.0;
    for cloud in set {
        for p in &cloud.points {
            let idx: [usize; 3] = std::array::from_fn(|a| {
                ((p[a] * grid as f64).floor() as i64).clamp(0, grid as i64 - 1) as usize
            });
            counts[idx[0] + grid * (idx[1] + grid * idx[2])] += 1.0;
            total += 1.0;
        }
    }
    for c in &mut counts {
        *c /= total;
    }
    counts
}

/// Jensen-Shannon divergence (natural log, bounded by ln 2) between the
/// pooled occupancy distributions of two sets of unit-cube clouds.
pub fn jsd(reference: &[PointCloud], generated: &[PointCloud], grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(MetricsError::Config("JSD grid resolution must be positive".into()));
    }
    if reference.iter().all(|c| c.points.is_empty()) {
        return Err(MetricsError::Degenerate("reference set has no points".into()));
    }
    if generated.iter().all(|c| c.points.is_empty()) {
        return Err(MetricsError::Degenerate("generated set has no points".into()));
    }
    let p = histogram(reference, grid);
    let q = histogram(generated, grid);
    let kl_to_mid = |f: &[f64], g: &[f64]| {
        f.iter()
            .zip(g)
            .filter(|(&fi, _)| fi > 0.0)
            .map(|(&fi, &gi)| fi * (fi / (0.5 * (fi + gi))).ln())
            .sum::<f64>()
    };
    Ok(0.5 * kl_to_mid(&p, &q) + 0.5 * kl_to_mid(&q, &p))
}

/// Minimum matching distance: for each reference cloud, the chamfer distance
/// to its closest generated cloud, averaged over the references.
pub fn mmd(reference: &[PointCloud], generated: &[PointCloud]) -> Result<f64> {
    if reference.is_empty() || generated.is_empty() {
        return Err(MetricsError::Degenerate(
            "MMD needs at least one cloud on each side".into(),
        ));
    }
    let ref_indices: Vec<NnIndex> = reference
        .iter()
        .map(|c| nonempty(c, "reference").map(NnIndex::build))
        .collect::<Result<_>>()?;
    let gen_indices: Vec<NnIndex> = generated
        .iter()
        .map(|c| nonempty(c, "generated").map(NnIndex::build))
        .collect::<Result<_>>()?;
    let sum: f64 = ref_indices
        .par_iter()
        .map(|r| {
            gen_indices
                .iter()
                .map(|g| cd_between(g, r))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(sum / ref_indices.len() as f64)
}

/// Fraction of validation reports that contain at least one violation.
pub fn invalidity_ratio(reports: &[Vec<Violation>]) -> Result<f64> {
    if reports.is_empty() {
        return Err(MetricsError::Degenerate("no validation reports".into()));
    }
    let invalid = reports.iter().filter(|r| !r.is_empty()).count();
    Ok(invalid as f64 / reports.len() as f64)
}

/// Settings shared by the batch evaluation pipeline.
#[derive(Debug, Clone)]
pub struct MetricConfig {
    /// Points sampled per solid.
    pub n_points: usize,
    /// RNG seed used for every cloud.
    pub seed: u64,
    /// Chord tolerance for validation and tessellation.
    pub chord_tolerance: f64,
    /// Histogram resolution per axis for the JSD.
    pub jsd_grid: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            n_points: 8192,
            seed: 0,
            chord_tolerance: 1e-3,
            jsd_grid: 32,
        }
    }
}

/// One generated document paired with its reference.
#[derive(Debug, Clone)]
pub struct DocumentPair {
    pub name: String,
    pub generated: Vec<u8>,
    pub reference: Vec<u8>,
}

/// Batch metrics. Distances are stored unscaled; [`MetricReport::to_json`]
/// applies the conventional 10^2 display factor to cd, jsd, and mmd.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub cd: f64,
    pub hd: f64,
    pub jsd: f64,
    pub mmd: f64,
    pub ir: f64,
    pub sample_count: usize,
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"cd\":{},\"hd\":{},\"jsd\":{},\"mmd\":{},\"ir\":{},\"n\":{}}}",
            fmt_real(self.cd * 100.0),
            fmt_real(self.hd),
            fmt_real(self.jsd * 100.0),
            fmt_real(self.mmd * 100.0),
            fmt_real(self.ir),
            self.sample_count
        )
    }
}

fn cloud_of(text: &[u8], config: &MetricConfig) -> std::result::Result<PointCloud, String> {
    let doc = parse_document(text).map_err(|e| e.to_string())?;
    let mesh = tessellate_document(&doc, config.chord_tolerance).map_err(|e| e.to_string())?;
    sample_points(&mesh, config.n_points, config.seed).map_err(|e| e.to_string())
}

/// Evaluate a batch of generated documents against their references.
///
/// References must all be valid; a broken reference is a hard error. An
/// invalid generated document only raises the invalidity ratio and is
/// excluded from the geometric metrics. Fails if every generated document is
/// invalid, since no geometric comparison is possible then.
pub fn evaluate_pairs(pairs: &[DocumentPair], config: &MetricConfig) -> Result<MetricReport> {
    if config.n_points == 0 {
        return Err(MetricsError::Config("sample count must be positive".into()));
    }
    if config.jsd_grid == 0 {
        return Err(MetricsError::Config("JSD grid resolution must be positive".into()));
    }
    if !(config.chord_tolerance > 0.0) {
        return Err(MetricsError::Config("chord tolerance must be positive".into()));
    }
    if pairs.is_empty() {
        return Err(MetricsError::Degenerate("no document pairs to evaluate".into()));
    }

    let outcomes: Vec<(PointCloud, Option<PointCloud>)> = pairs
        .par_iter()
        .map(|pair| {
            let broken = |detail: String| MetricsError::InvalidReference {
                name: pair.name.clone(),
                detail,
            };
            let violations = validate_text(&pair.reference, config.chord_tolerance);
            if !violations.is_empty() {
                let detail = violations
                    .iter()
                    .take(3)
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ");
                return Err(broken(detail));
            }
            let reference = cloud_of(&pair.reference, config).map_err(broken)?;
            let generated = if validate_text(&pair.generated, config.chord_tolerance).is_empty() {
                cloud_of(&pair.generated, config).ok()
            } else {
                None
            };
            Ok((reference, generated))
        })
        .collect::<Result<_>>()?;

    let total = outcomes.len();
    let ref_indices: Vec<NnIndex> = outcomes
        .par_iter()
        .map(|(r, _)| NnIndex::build(&r.points))
        .collect();
    let valid: Vec<(usize, NnIndex)> = outcomes
        .par_iter()
        .enumerate()
        .filter_map(|(i, (_, g))| g.as_ref().map(|c| (i, NnIndex::build(&c.points))))
        .collect();
    if valid.is_empty() {
        return Err(MetricsError::Degenerate(
            "every generated document failed validation".into(),
        ));
    }
    let ir = (total - valid.len()) as f64 / total as f64;

    let per_pair: Vec<(f64, f64)> = valid
        .par_iter()
        .map(|(i, g)| (cd_between(g, &ref_indices[*i]), hd_between(g, &ref_indices[*i])))
        .collect();
    let cd = per_pair.iter().map(|(c, _)| c).sum::<f64>() / per_pair.len() as f64;
    let hd = per_pair.iter().map(|(_, h)| h).sum::<f64>() / per_pair.len() as f64;

    let ref_clouds: Vec<PointCloud> = outcomes.iter().map(|(r, _)| r.clone()).collect();
    let gen_clouds: Vec<PointCloud> = outcomes
        .iter()
        .filter_map(|(_, g)| g.clone())
        .collect();
    let jsd = jsd(&ref_clouds, &gen_clouds, config.jsd_grid)?;

    let mmd_sum: f64 = ref_indices
        .par_iter()
        .map(|r| {
            valid
                .iter()
                .map(|(_, g)| cd_between(g, r))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let mmd = mmd_sum / ref_indices.len() as f64;

    Ok(MetricReport {
        cd,
        hd,
        jsd,
        mmd,
        ir,
        sample_count: config.n_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(points: Vec<Point3>) -> PointCloud {
        PointCloud { points }
    }

    fn random_cloud(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        cloud((0..n).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect())
    }

    fn brute_cd(a: &PointCloud, b: &PointCloud) -> f64 {
        let directed = |xs: &[Point3], ys: &[Point3]| {
            xs.iter()
                .map(|p| {
                    ys.iter()
                        .map(|q| (p - q).norm_squared())
                        .fold(f64::INFINITY, f64::min)
                })
                .sum::<f64>()
                / xs.len() as f64
        };
        directed(&a.points, &b.points) + directed(&b.points, &a.points)
    }

    #[test]
    fn chamfer_of_identical_clouds_is_zero() {
        let a = random_cloud(300, 1);
        assert_eq!(chamfer_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn chamfer_is_symmetric_and_positive() {
        let a = random_cloud(200, 2);
        let b = random_cloud(250, 3);
        let ab = chamfer_distance(&a, &b).unwrap();
        let ba = chamfer_distance(&b, &a).unwrap();
        assert_eq!(ab, ba);
        assert!(ab > 0.0);
    }

    #[test]
    fn chamfer_matches_hand_computed_value() {
        let a = cloud(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)]);
        let b = cloud(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 1.0, 0.0)]);
        assert!((chamfer_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!((hausdorff_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chamfer_equals_brute_force() {
        for seed in 0..5 {
            let a = random_cloud(180 + 13 * seed as usize, seed);
            let b = random_cloud(140 + 29 * seed as usize, seed + 100);
            let fast = chamfer_distance(&a, &b).unwrap();
            assert!((fast - brute_cd(&a, &b)).abs() <= 1e-12);
        }
    }

    #[test]
    fn empty_cloud_is_rejected() {
        let a = random_cloud(10, 4);
        let err = chamfer_distance(&a, &cloud(vec![])).unwrap_err();
        assert!(matches!(err, MetricsError::Degenerate(_)));
    }

    #[test]
    fn jsd_of_identical_sets_is_zero() {
        let set = vec![random_cloud(500, 5)];
        assert_eq!(jsd(&set, &set, 8).unwrap(), 0.0);
    }

    #[test]
    fn jsd_of_disjoint_supports_is_ln2() {
        let a = vec![cloud(vec![Point3::new(0.1, 0.1, 0.1); 50])];
        let b = vec![cloud(vec![Point3::new(0.9, 0.9, 0.9); 50])];
        let d = jsd(&a, &b, 4).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn jsd_matches_closed_form_two_bin_case() {
        // Reference occupies two cells equally, generated only the first:
        // JSD = 1/2 (1/2 ln(2/3) + 1/2 ln 2) + 1/2 ln(4/3).
        let a = vec![cloud(vec![
            Point3::new(0.25, 0.25, 0.25),
            Point3::new(0.75, 0.25, 0.25),
        ])];
        let b = vec![cloud(vec![Point3::new(0.25, 0.25, 0.25); 2])];
        let expected = 0.5 * (0.5 * (2.0f64 / 3.0).ln() + 0.5 * 2.0f64.ln())
            + 0.5 * (4.0f64 / 3.0).ln();
        assert!((jsd(&a, &b, 2).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn mmd_over_matching_sets_is_zero() {
        let set = vec![random_cloud(100, 6), random_cloud(100, 7)];
        assert_eq!(mmd(&set, &set).unwrap(), 0.0);
    }

    #[test]
    fn mmd_picks_the_closest_generated_cloud() {
        let r = random_cloud(100, 8);
        let mut shifted = r.clone();
        for p in &mut shifted.points {
            p.x += 0.5;
        }
        let exact = mmd(&[r.clone()], &[shifted.clone(), r.clone()]).unwrap();
        assert_eq!(exact, 0.0);
        let off = mmd(&[r.clone()], &[shifted]).unwrap();
        assert!(off > 1e-3);
    }

    #[test]
    fn invalidity_ratio_counts_failed_reports() {
        let ok = Vec::new();
        let bad = validate_text(b"not json", 1e-3);
        assert!(!bad.is_empty());
        let ir = invalidity_ratio(&[ok.clone(), bad, ok.clone(), ok]).unwrap();
        assert!((ir - 0.25).abs() < 1e-15);
    }

    fn patch_text() -> Vec<u8> {
        br#"{"faces": [
            {"type": "nurbs", "u_degree": 1, "v_degree": 1,
             "u_knots": [0.0, 1.0], "u_mults": [2, 2],
             "v_knots": [0.0, 1.0], "v_mults": [2, 2],
             "poles": [[[0,0,0],[0,1,0]],[[1,0,0],[1,1,0]]]}
        ]}"#
        .to_vec()
    }

    fn small_config() -> MetricConfig {
        MetricConfig {
            n_points: 256,
            ..MetricConfig::default()
        }
    }

    #[test]
    fn identical_pair_scores_zero_everywhere() {
        let pairs = vec![DocumentPair {
            name: "patch".into(),
            generated: patch_text(),
            reference: patch_text(),
        }];
        let report = evaluate_pairs(&pairs, &small_config()).unwrap();
        assert_eq!(report.cd, 0.0);
        assert_eq!(report.hd, 0.0);
        assert_eq!(report.jsd, 0.0);
        assert_eq!(report.mmd, 0.0);
        assert_eq!(report.ir, 0.0);
        assert_eq!(report.sample_count, 256);
    }

    #[test]
    fn invalid_generated_raises_ir_only() {
        let pairs = vec![
            DocumentPair {
                name: "good".into(),
                generated: patch_text(),
                reference: patch_text(),
            },
            DocumentPair {
                name: "bad".into(),
                generated: b"not json".to_vec(),
                reference: patch_text(),
            },
        ];
        let report = evaluate_pairs(&pairs, &small_config()).unwrap();
        assert!((report.ir - 0.5).abs() < 1e-15);
        assert_eq!(report.cd, 0.0);
    }

    #[test]
    fn invalid_reference_is_a_hard_error() {
        let pairs = vec![DocumentPair {
            name: "broken-ref".into(),
            generated: patch_text(),
            reference: b"{}".to_vec(),
        }];
        let err = evaluate_pairs(&pairs, &small_config()).unwrap_err();
        assert!(matches!(err, MetricsError::InvalidReference { .. }));
    }

    #[test]
    fn all_invalid_generated_is_an_error() {
        let pairs = vec![DocumentPair {
            name: "bad".into(),
            generated: b"[]".to_vec(),
            reference: patch_text(),
        }];
        let err = evaluate_pairs(&pairs, &small_config()).unwrap_err();
        assert!(matches!(err, MetricsError::Degenerate(_)));
    }

    #[test]
    fn report_json_scales_cd_jsd_mmd() {
        let report = MetricReport {
            cd: 0.0123,
            hd: 0.5,
            jsd: 0.002,
            mmd: 0.0456,
            ir: 0.25,
            sample_count: 2048,
        };
        assert_eq!(
            report.to_json(),
            "{\"cd\":1.230000,\"hd\":0.500000,\"jsd\":0.200000,\"mmd\":4.560000,\"ir\":0.250000,\"n\":2048}"
        );
    }
}
