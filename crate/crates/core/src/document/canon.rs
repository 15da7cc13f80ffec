//! Canonical document serialization: every real printed with exactly six
//! decimal places, weights compressed to (value, frequency) runs, one face
//! record per line, deterministic key order.

use std::fmt::Write as _;

use crate::nurbs::{KnotVector, NurbsCurve, NurbsSurface};
use crate::primitives::PrimitiveCurve;
use crate::{Point3, Vec3};

use super::{FaceRecord, SolidDocument};

/// Six-decimal rendering with the negative-zero artifact normalized away.
pub(crate) fn fmt_real(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn fmt_point(p: &Point3) -> String {
    format!("[{},{},{}]", fmt_real(p.x), fmt_real(p.y), fmt_real(p.z))
}

fn fmt_vector(v: &Vec3) -> String {
    format!("[{},{},{}]", fmt_real(v.x), fmt_real(v.y), fmt_real(v.z))
}

fn fmt_reals(xs: &[f64]) -> String {
    let body: Vec<String> = xs.iter().map(|&x| fmt_real(x)).collect();
    format!("[{}]", body.join(","))
}

fn fmt_uints(xs: &[u32]) -> String {
    let body: Vec<String> = xs.iter().map(u32::to_string).collect();
    format!("[{}]", body.join(","))
}

fn fmt_pole_list(poles: &[Point3]) -> String {
    let body: Vec<String> = poles.iter().map(fmt_point).collect();
    format!("[{}]", body.join(","))
}

/// Runs of equal weights, grouped after 6-decimal rounding so the grouping
/// is stable across round-trips. `None` when every weight rounds to 1.
fn weight_runs<'a>(weights: impl Iterator<Item = &'a f64>) -> Option<String> {
    let mut runs: Vec<(String, usize)> = Vec::new();
    for w in weights {
        let s = fmt_real(*w);
        match runs.last_mut() {
            Some((value, freq)) if *value == s => *freq += 1,
            _ => runs.push((s, 1)),
        }
    }
    if runs.iter().all(|(value, _)| value == "1.000000") {
        return None;
    }
    let body: Vec<String> = runs
        .into_iter()
        .map(|(value, freq)| format!("[{value},{freq}]"))
        .collect();
    Some(format!("[{}]", body.join(",")))
}

fn knot_fields(out: &mut String, prefix: &str, kv: &KnotVector) {
    write!(
        out,
        ",\"{prefix}knots\":{},\"{prefix}mults\":{}",
        fmt_reals(kv.knots()),
        fmt_uints(kv.mults())
    )
    .unwrap();
}

fn surface_line(s: &NurbsSurface) -> String {
    let mut out = String::from("{\"type\":\"nurbs\"");
    write!(
        out,
        ",\"u_degree\":{},\"v_degree\":{},\"u_periodic\":{},\"v_periodic\":{}",
        s.u_degree(),
        s.v_degree(),
        s.u_periodic(),
        s.v_periodic()
    )
    .unwrap();
    knot_fields(&mut out, "u_", s.u_knots());
    knot_fields(&mut out, "v_", s.v_knots());
    let rows: Vec<String> = s.poles().iter().map(|row| fmt_pole_list(row)).collect();
    write!(out, ",\"poles\":[{}]", rows.join(",")).unwrap();
    if let Some(runs) = weight_runs(s.weights().iter().flatten()) {
        write!(out, ",\"weights\":{runs}").unwrap();
    }
    out.push('}');
    out
}

fn bspline_line(c: &NurbsCurve) -> String {
    let mut out = String::from("{\"type\":\"bspline\"");
    write!(
        out,
        ",\"degree\":{},\"is_periodic\":{},\"first\":{},\"last\":{}",
        c.degree(),
        c.is_periodic(),
        fmt_real(c.first()),
        fmt_real(c.last())
    )
    .unwrap();
    knot_fields(&mut out, "", c.knots());
    write!(out, ",\"poles\":{}", fmt_pole_list(c.poles())).unwrap();
    if let Some(runs) = weight_runs(c.weights().iter()) {
        write!(out, ",\"weights\":{runs}").unwrap();
    }
    out.push('}');
    out
}

fn face_line(face: &FaceRecord) -> String {
    match face {
        FaceRecord::Surface(s) => surface_line(s),
        FaceRecord::Curve(PrimitiveCurve::Line(l)) => format!(
            "{{\"type\":\"line\",\"start\":{},\"end\":{}}}",
            fmt_point(&l.start),
            fmt_point(&l.end)
        ),
        FaceRecord::Curve(PrimitiveCurve::Circle(c)) => format!(
            "{{\"type\":\"circle\",\"center\":{},\"normal\":{},\"radius\":{},\"first\":{},\"last\":{}}}",
            fmt_point(&c.center),
            fmt_vector(&c.normal),
            fmt_real(c.radius),
            fmt_real(c.first),
            fmt_real(c.last)
        ),
        FaceRecord::Curve(PrimitiveCurve::Ellipse(e)) => format!(
            "{{\"type\":\"ellipse\",\"center\":{},\"normal\":{},\"major_radius\":{},\"minor_radius\":{},\"first\":{},\"last\":{}}}",
            fmt_point(&e.center),
            fmt_vector(&e.normal),
            fmt_real(e.major_radius),
            fmt_real(e.minor_radius),
            fmt_real(e.first),
            fmt_real(e.last)
        ),
        FaceRecord::Curve(PrimitiveCurve::Bezier(b)) => format!(
            "{{\"type\":\"bezier\",\"degree\":{},\"first\":{},\"last\":{},\"poles\":{}}}",
            b.degree(),
            fmt_real(b.first()),
            fmt_real(b.last()),
            fmt_pole_list(b.poles())
        ),
        FaceRecord::Curve(PrimitiveCurve::Bspline(c)) => bspline_line(c),
    }
}

/// Canonical byte serialization. Reparsing yields a document whose numeric
/// fields equal the 6-decimal rounding of the input; serializing that
/// document again reproduces the same bytes.
pub fn serialize_document(doc: &SolidDocument) -> Vec<u8> {
    let mut out = String::from("{");
    if let Some(name) = doc.name() {
        write!(out, "\"name\":{},", serde_json::to_string(name).unwrap()).unwrap();
    }
    out.push_str("\"faces\":[\n");
    let n = doc.faces().len();
    for (i, face) in doc.faces().iter().enumerate() {
        out.push_str(&face_line(face));
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]}\n");
    out.into_bytes()
}
