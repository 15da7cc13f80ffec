//! JSON to [`SolidDocument`] with path-tracked errors and warnings for
//! unknown keys.

use serde_json::{Map, Value};

use crate::nurbs::{KnotVector, NurbsCurve, NurbsSurface};
use crate::primitives::{BezierCurve, CircleArc, EllipseArc, LineSegment, PrimitiveCurve};
use crate::{Point3, Vec3};

use super::{DocumentError, FaceRecord, SolidDocument};

type Result<T> = std::result::Result<T, DocumentError>;

pub fn parse_document(text: &[u8]) -> Result<SolidDocument> {
    parse_document_with_warnings(text).map(|(doc, _)| doc)
}

/// Parse and fully validate a document. Unknown JSON keys do not fail the
/// parse; they are reported as warnings (one string per key, path-prefixed).
pub fn parse_document_with_warnings(text: &[u8]) -> Result<(SolidDocument, Vec<String>)> {
    let value: Value =
        serde_json::from_slice(text).map_err(|e| DocumentError::Syntax(e.to_string()))?;
    let mut warnings = Vec::new();
    let root = value
        .as_object()
        .ok_or_else(|| DocumentError::at("$", "document root must be a JSON object"))?;
    warn_unknown_keys(root, "$", &["name", "faces"], &mut warnings);

    let name = match root.get("name") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(DocumentError::at("name", "must be a string")),
    };
    let faces_value = root
        .get("faces")
        .ok_or_else(|| DocumentError::at("faces", "missing required field"))?;
    let entries = faces_value
        .as_array()
        .ok_or_else(|| DocumentError::at("faces", "must be an array"))?;
    if entries.is_empty() {
        return Err(DocumentError::at("faces", "document needs at least one face"));
    }

    let mut faces = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        faces.push(parse_face(entry, i, &mut warnings)?);
    }
    let doc = SolidDocument::new(name, faces)?;
    Ok((doc, warnings))
}

fn warn_unknown_keys(
    obj: &Map<String, Value>,
    path: &str,
    known: &[&str],
    warnings: &mut Vec<String>,
) {
    for key in obj.keys() {
        if !known.contains(&key.as_str()) {
            warnings.push(format!("{path}.{key}: unknown key ignored"));
        }
    }
}

fn field<'v>(obj: &'v Map<String, Value>, path: &str, key: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| DocumentError::at(format!("{path}.{key}"), "missing required field"))
}

fn as_real(v: &Value, path: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| DocumentError::at(path, "must be a number"))?;
    if !x.is_finite() {
        return Err(DocumentError::at(path, "must be a finite number"));
    }
    Ok(x)
}

fn as_uint(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| DocumentError::at(path, "must be a non-negative integer"))
}

fn as_bool(v: &Value, path: &str) -> Result<bool> {
    v.as_bool()
        .ok_or_else(|| DocumentError::at(path, "must be a boolean"))
}

fn as_triple(v: &Value, path: &str) -> Result<[f64; 3]> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| DocumentError::at(path, "must be an array of three numbers"))?;
    let mut out = [0.0; 3];
    for (i, e) in arr.iter().enumerate() {
        out[i] = as_real(e, &format!("{path}[{i}]"))?;
    }
    Ok(out)
}

fn as_point(v: &Value, path: &str) -> Result<Point3> {
    as_triple(v, path).map(Point3::from)
}

/// Normals are renormalized on parse so 6-decimal rounding cannot break the
/// unit-length invariant; a norm off by more than 1e-3 is a real error.
fn as_unit_normal(v: &Value, path: &str) -> Result<Vec3> {
    let n = Vec3::from(as_triple(v, path)?);
    let norm = n.norm();
    if (norm - 1.0).abs() > 1e-3 {
        return Err(DocumentError::at(
            path,
            format!("normal must be unit length, got norm {norm}"),
        ));
    }
    Ok(n / norm)
}

fn as_real_array(v: &Value, path: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| DocumentError::at(path, "must be an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| as_real(e, &format!("{path}[{i}]")))
        .collect()
}

fn as_uint_array(v: &Value, path: &str) -> Result<Vec<u32>> {
    let arr = v
        .as_array()
        .ok_or_else(|| DocumentError::at(path, "must be an array of positive integers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| {
            e.as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| {
                    DocumentError::at(format!("{path}[{i}]"), "must be a positive integer")
                })
        })
        .collect()
}

fn as_pole_list(v: &Value, path: &str) -> Result<Vec<Point3>> {
    let arr = v
        .as_array()
        .ok_or_else(|| DocumentError::at(path, "must be an array of points"))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| as_point(e, &format!("{path}[{i}]")))
        .collect()
}

fn as_pole_grid(v: &Value, path: &str) -> Result<Vec<Vec<Point3>>> {
    let arr = v
        .as_array()
        .ok_or_else(|| DocumentError::at(path, "must be a 2D array of points"))?;
    arr.iter()
        .enumerate()
        .map(|(i, row)| as_pole_list(row, &format!("{path}[{i}]")))
        .collect()
}

/// Accepted weight encodings, tried in order:
/// 1. (value, frequency) runs - every element is a 2-array whose second entry
///    is a positive integer and the frequencies sum to the pole count;
/// 2. a flat list of numbers, one per pole (row-major for surfaces);
/// 3. for surfaces, a 2D grid of numbers matching the pole grid.
/// A 2-column numeric grid whose "frequencies" happen to sum to the pole
/// count is read as runs; writers must avoid that shape (ours emits runs).
fn parse_weights(v: &Value, expected: usize, path: &str, allow_grid: bool) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| DocumentError::at(path, "must be an array"))?;

    let run_pair = |e: &Value| -> Option<(f64, u64)> {
        let pair = e.as_array()?;
        if pair.len() != 2 {
            return None;
        }
        let value = pair[0].as_f64()?;
        let freq = pair[1].as_u64().filter(|&f| f > 0)?;
        Some((value, freq))
    };
    if !arr.is_empty() {
        if let Some(runs) = arr.iter().map(run_pair).collect::<Option<Vec<_>>>() {
            let total: u64 = runs.iter().map(|&(_, f)| f).sum();
            if total == expected as u64 {
                let mut out = Vec::with_capacity(expected);
                for (value, freq) in runs {
                    if !value.is_finite() {
                        return Err(DocumentError::at(path, "run value must be finite"));
                    }
                    out.extend(std::iter::repeat(value).take(freq as usize));
                }
                return Ok(out);
            }
        }
    }

    if arr.iter().all(Value::is_number) {
        if arr.len() != expected {
            return Err(DocumentError::at(
                path,
                format!(
                    "weight/pole count mismatch: {} weights for {} poles",
                    arr.len(),
                    expected
                ),
            ));
        }
        return as_real_array(v, path);
    }

    if allow_grid && arr.iter().all(Value::is_array) {
        let mut out = Vec::new();
        for (i, row) in arr.iter().enumerate() {
            out.extend(as_real_array(row, &format!("{path}[{i}]"))?);
        }
        if out.len() != expected {
            return Err(DocumentError::at(
                path,
                format!(
                    "weight/pole count mismatch: {} weights for {} poles",
                    out.len(),
                    expected
                ),
            ));
        }
        return Ok(out);
    }

    Err(DocumentError::at(
        path,
        "unrecognized weights encoding (expected runs, flat list, or grid)",
    ))
}

fn parse_face(v: &Value, index: usize, warnings: &mut Vec<String>) -> Result<FaceRecord> {
    let path = format!("faces[{index}]");
    let obj = v
        .as_object()
        .ok_or_else(|| DocumentError::at(&path, "face must be an object"))?;
    let kind = field(obj, &path, "type")?
        .as_str()
        .ok_or_else(|| DocumentError::at(format!("{path}.type"), "must be a string"))?;
    match kind {
        "nurbs" => parse_nurbs_face(obj, &path, warnings),
        "line" => {
            warn_unknown_keys(obj, &path, &["type", "start", "end"], warnings);
            let start = as_point(field(obj, &path, "start")?, &format!("{path}.start"))?;
            let end = as_point(field(obj, &path, "end")?, &format!("{path}.end"))?;
            let line = LineSegment::new(start, end)
                .map_err(|e| DocumentError::at(&path, e.to_string()))?;
            Ok(FaceRecord::Curve(PrimitiveCurve::Line(line)))
        }
        "circle" => {
            warn_unknown_keys(
                obj,
                &path,
                &["type", "center", "normal", "radius", "first", "last"],
                warnings,
            );
            let center = as_point(field(obj, &path, "center")?, &format!("{path}.center"))?;
            let normal =
                as_unit_normal(field(obj, &path, "normal")?, &format!("{path}.normal"))?;
            let radius = as_real(field(obj, &path, "radius")?, &format!("{path}.radius"))?;
            let (first, last) = arc_range(obj, &path)?;
            let arc = CircleArc::new(center, normal, radius, first, last)
                .map_err(|e| DocumentError::at(&path, e.to_string()))?;
            Ok(FaceRecord::Curve(PrimitiveCurve::Circle(arc)))
        }
        "ellipse" => {
            warn_unknown_keys(
                obj,
                &path,
                &[
                    "type",
                    "center",
                    "normal",
                    "major_radius",
                    "minor_radius",
                    "first",
                    "last",
                ],
                warnings,
            );
            let center = as_point(field(obj, &path, "center")?, &format!("{path}.center"))?;
            let normal =
                as_unit_normal(field(obj, &path, "normal")?, &format!("{path}.normal"))?;
            let major = as_real(
                field(obj, &path, "major_radius")?,
                &format!("{path}.major_radius"),
            )?;
            let minor = as_real(
                field(obj, &path, "minor_radius")?,
                &format!("{path}.minor_radius"),
            )?;
            let (first, last) = arc_range(obj, &path)?;
            let arc = EllipseArc::new(center, normal, major, minor, first, last)
                .map_err(|e| DocumentError::at(&path, e.to_string()))?;
            Ok(FaceRecord::Curve(PrimitiveCurve::Ellipse(arc)))
        }
        "bezier" => {
            warn_unknown_keys(
                obj,
                &path,
                &["type", "poles", "degree", "first", "last"],
                warnings,
            );
            if obj.contains_key("weights") {
                return Err(DocumentError::at(
                    format!("{path}.weights"),
                    "bezier records are polynomial; encode rational curves as bspline",
                ));
            }
            let poles = as_pole_list(field(obj, &path, "poles")?, &format!("{path}.poles"))?;
            let degree = as_uint(field(obj, &path, "degree")?, &format!("{path}.degree"))?;
            let first = match obj.get("first") {
                Some(v) => as_real(v, &format!("{path}.first"))?,
                None => 0.0,
            };
            let last = match obj.get("last") {
                Some(v) => as_real(v, &format!("{path}.last"))?,
                None => 1.0,
            };
            let bez = BezierCurve::new(poles, degree, first, last)
                .map_err(|e| DocumentError::at(&path, e.to_string()))?;
            Ok(FaceRecord::Curve(PrimitiveCurve::Bezier(bez)))
        }
        "bspline" => parse_bspline_face(obj, &path, warnings),
        other => Err(DocumentError::at(
            format!("{path}.type"),
            format!("unknown face kind \"{other}\""),
        )),
    }
}

fn arc_range(obj: &Map<String, Value>, path: &str) -> Result<(f64, f64)> {
    let first = match obj.get("first") {
        Some(v) => as_real(v, &format!("{path}.first"))?,
        None => 0.0,
    };
    let last = match obj.get("last") {
        Some(v) => as_real(v, &format!("{path}.last"))?,
        None => std::f64::consts::TAU,
    };
    Ok((first, last))
}

fn parse_bspline_face(
    obj: &Map<String, Value>,
    path: &str,
    warnings: &mut Vec<String>,
) -> Result<FaceRecord> {
    warn_unknown_keys(
        obj,
        path,
        &[
            "type",
            "poles",
            "weights",
            "degree",
            "knots",
            "mults",
            "is_periodic",
            "first",
            "last",
        ],
        warnings,
    );
    let poles = as_pole_list(field(obj, path, "poles")?, &format!("{path}.poles"))?;
    let degree = as_uint(field(obj, path, "degree")?, &format!("{path}.degree"))?;
    let knots = as_real_array(field(obj, path, "knots")?, &format!("{path}.knots"))?;
    let mults = as_uint_array(field(obj, path, "mults")?, &format!("{path}.mults"))?;
    let knot_vector = KnotVector::new(knots, mults)
        .map_err(|e| DocumentError::at(format!("{path}.knots"), e.to_string()))?;
    let periodic = match obj.get("is_periodic") {
        Some(v) => as_bool(v, &format!("{path}.is_periodic"))?,
        None => false,
    };
    let weights = match obj.get("weights") {
        Some(v) => parse_weights(v, poles.len(), &format!("{path}.weights"), false)?,
        None => vec![1.0; poles.len()],
    };
    // Default domain endpoints: the full valid range of the knot vector.
    let (dom_first, dom_last) = if periodic {
        (knot_vector.first(), knot_vector.last())
    } else {
        let expanded = knot_vector.expanded();
        if expanded.len() > degree && poles.len() < expanded.len() {
            (expanded[degree.min(expanded.len() - 1)], expanded[poles.len()])
        } else {
            (knot_vector.first(), knot_vector.last())
        }
    };
    let first = match obj.get("first") {
        Some(v) => as_real(v, &format!("{path}.first"))?,
        None => dom_first,
    };
    let last = match obj.get("last") {
        Some(v) => as_real(v, &format!("{path}.last"))?,
        None => dom_last,
    };
    let curve = NurbsCurve::new(poles, weights, degree, knot_vector, periodic, first, last)
        .map_err(|e| DocumentError::at(path, e.to_string()))?;
    Ok(FaceRecord::Curve(PrimitiveCurve::Bspline(curve)))
}

fn parse_nurbs_face(
    obj: &Map<String, Value>,
    path: &str,
    warnings: &mut Vec<String>,
) -> Result<FaceRecord> {
    warn_unknown_keys(
        obj,
        path,
        &[
            "type",
            "poles",
            "weights",
            "u_degree",
            "v_degree",
            "u_knots",
            "u_mults",
            "v_knots",
            "v_mults",
            "u_periodic",
            "v_periodic",
        ],
        warnings,
    );
    let poles = as_pole_grid(field(obj, path, "poles")?, &format!("{path}.poles"))?;
    let pole_count: usize = poles.iter().map(Vec::len).sum();
    let u_degree = as_uint(field(obj, path, "u_degree")?, &format!("{path}.u_degree"))?;
    let v_degree = as_uint(field(obj, path, "v_degree")?, &format!("{path}.v_degree"))?;
    let u_knots = as_real_array(field(obj, path, "u_knots")?, &format!("{path}.u_knots"))?;
    let u_mults = as_uint_array(field(obj, path, "u_mults")?, &format!("{path}.u_mults"))?;
    let v_knots = as_real_array(field(obj, path, "v_knots")?, &format!("{path}.v_knots"))?;
    let v_mults = as_uint_array(field(obj, path, "v_mults")?, &format!("{path}.v_mults"))?;
    let u_kv = KnotVector::new(u_knots, u_mults)
        .map_err(|e| DocumentError::at(format!("{path}.u_knots"), e.to_string()))?;
    let v_kv = KnotVector::new(v_knots, v_mults)
        .map_err(|e| DocumentError::at(format!("{path}.v_knots"), e.to_string()))?;
    let u_periodic = match obj.get("u_periodic") {
        Some(v) => as_bool(v, &format!("{path}.u_periodic"))?,
        None => false,
    };
    let v_periodic = match obj.get("v_periodic") {
        Some(v) => as_bool(v, &format!("{path}.v_periodic"))?,
        None => false,
    };
    let weights_flat = match obj.get("weights") {
        Some(v) => parse_weights(v, pole_count, &format!("{path}.weights"), true)?,
        None => vec![1.0; pole_count],
    };
    let mut weights = Vec::with_capacity(poles.len());
    let mut cursor = 0;
    for row in &poles {
        weights.push(weights_flat[cursor..cursor + row.len()].to_vec());
        cursor += row.len();
    }
    let surface = NurbsSurface::new(
        poles, weights, u_degree, v_degree, u_kv, v_kv, u_periodic, v_periodic,
    )
    .map_err(|e| DocumentError::at(path, e.to_string()))?;
    Ok(FaceRecord::Surface(surface))
}
