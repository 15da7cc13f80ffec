//! Periodic-to-clamped conversion on homogeneous pole rows.
//!
//! Both curves and surfaces funnel through these helpers: a "row" is one pole
//! slot along the direction being converted (a single homogeneous pole for a
//! curve, a full line of the pole grid for a surface). All blending happens in
//! homogeneous coordinates `[w*x, w*y, w*z, w]` so rational geometry is
//! preserved exactly.

use super::{KnotVector, NurbsError};

pub(crate) type HomoPole = [f64; 4];

fn blend(a: &[HomoPole], b: &[HomoPole], alpha: f64) -> Vec<HomoPole> {
    a.iter()
        .zip(b)
        .map(|(pa, pb)| {
            let mut out = [0.0; 4];
            for c in 0..4 {
                out[c] = alpha * pa[c] + (1.0 - alpha) * pb[c];
            }
            out
        })
        .collect()
}

/// Unroll a periodic knot vector / pole-row cycle into an equivalent
/// non-periodic (unclamped) representation covering one full period.
///
/// Pole row `0` of the periodic input is the first row active just past the
/// start of the period window; rows wrap with index modulo the row count.
pub(crate) fn unroll_periodic(
    knots: &KnotVector,
    degree: usize,
    rows: &[Vec<HomoPole>],
) -> Result<(Vec<f64>, Vec<Vec<HomoPole>>), NurbsError> {
    let distinct = knots.knots();
    let mults = knots.mults();
    let k = distinct.len() - 1;
    if k == 0 {
        return Err(NurbsError::Structure(
            "periodic knot vector needs at least two distinct knots".into(),
        ));
    }
    let m0 = mults[0] as usize;
    if mults[k] as usize != m0 {
        return Err(NurbsError::Structure(
            "periodic knot vector must have equal first and last multiplicities".into(),
        ));
    }
    if mults.iter().any(|&m| m as usize > degree) {
        return Err(NurbsError::Structure(format!(
            "periodic multiplicities must be <= degree {degree}"
        )));
    }
    let n_rows: usize = rows.len();
    let expected: usize = knots.expanded_len() - m0;
    if n_rows != expected {
        return Err(NurbsError::Structure(format!(
            "periodic pole count {n_rows} != sum of multiplicities minus first multiplicity ({expected})"
        )));
    }
    if n_rows < degree + 1 {
        return Err(NurbsError::Structure(format!(
            "periodic direction needs at least degree + 1 = {} poles, got {n_rows}",
            degree + 1
        )));
    }
    let period = distinct[k] - distinct[0];

    // One expanded period (knots t_0 .. t_{k-1}), length == n_rows.
    let mut period_knots = Vec::with_capacity(n_rows);
    for i in 0..k {
        for _ in 0..mults[i] {
            period_knots.push(distinct[i]);
        }
    }

    // Core window t_0 .. t_k plus `degree` wrapped knots on each side, read
    // off the infinite tiled sequence so short periods wrap as many times as
    // needed. Tiles of the period-start knot land exactly on the stored end
    // knots (`first + period` recomputed in floating point can differ from
    // `last` by a few ulp, which would later fail the domain check).
    let tile = |j: isize| -> f64 {
        let n = n_rows as isize;
        let idx = j.rem_euclid(n) as usize;
        let cycle = (j - idx as isize) / n;
        if idx < m0 {
            match cycle {
                0 => distinct[0],
                1 => distinct[k],
                c => distinct[0] + c as f64 * period,
            }
        } else {
            period_knots[idx] + cycle as f64 * period
        }
    };
    let expanded: Vec<f64> = (-(degree as isize)..(n_rows + m0 + degree) as isize)
        .map(tile)
        .collect();

    let out_rows = expanded.len() - degree - 1;
    let rows_out: Vec<Vec<HomoPole>> = (0..out_rows)
        .map(|a| {
            let idx =
                (a as isize - m0 as isize + 1).rem_euclid(n_rows as isize) as usize;
            rows[idx].clone()
        })
        .collect();
    Ok((expanded, rows_out))
}

/// Boehm single-knot insertion on homogeneous rows. `u` must lie within the
/// valid domain of the expanded knot vector.
pub(crate) fn insert_knot(
    expanded: &mut Vec<f64>,
    rows: &mut Vec<Vec<HomoPole>>,
    degree: usize,
    u: f64,
) {
    let p = degree;
    let n = rows.len() - 1;
    let mut k = expanded.partition_point(|&t| t <= u);
    debug_assert!(k > 0);
    k -= 1; // last index with expanded[k] <= u
    k = k.min(n);

    let mut new_rows = Vec::with_capacity(rows.len() + 1);
    new_rows.extend_from_slice(&rows[..=k - p]);
    for i in k - p + 1..=k {
        let denom = expanded[i + p] - expanded[i];
        debug_assert!(denom > 0.0);
        let alpha = (u - expanded[i]) / denom;
        new_rows.push(blend(&rows[i], &rows[i - 1], alpha));
    }
    new_rows.extend_from_slice(&rows[k..]);
    *rows = new_rows;
    expanded.insert(k + 1, u);
}

/// Clamp an unclamped non-periodic direction: raise the multiplicity of both
/// domain endpoints to `degree + 1` by knot insertion, then trim the rows and
/// knots outside the domain window.
pub(crate) fn clamp_ends(
    expanded: &mut Vec<f64>,
    rows: &mut Vec<Vec<HomoPole>>,
    degree: usize,
) {
    let p = degree;
    let a = expanded[p];
    let b = expanded[rows.len()]; // == expanded[n + 1]
    let mult_of = |expanded: &[f64], t: f64| expanded.iter().filter(|&&x| x == t).count();

    for _ in mult_of(expanded, a)..=p {
        insert_knot(expanded, rows, p, a);
    }
    for _ in mult_of(expanded, b)..=p {
        insert_knot(expanded, rows, p, b);
    }

    let lead = expanded.iter().take_while(|&&t| t < a).count();
    let tail = expanded.iter().rev().take_while(|&&t| t > b).count();
    expanded.drain(expanded.len() - tail..);
    expanded.drain(..lead);
    rows.drain(rows.len() - tail..);
    rows.drain(..lead);
}
