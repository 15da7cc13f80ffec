use super::{KnotVector, NurbsError};

/// Locate the positive-width expanded span containing `u`.
///
/// Returns `span` with `expanded[span] <= u < expanded[span + 1]`. At the
/// right domain endpoint (`u == expanded[n + 1]`) the last positive-width
/// span is returned instead, closing the domain on both sides. `n` is the
/// highest basis index (pole count minus one).
pub(crate) fn find_span(
    expanded: &[f64],
    degree: usize,
    n: usize,
    u: f64,
) -> Result<usize, NurbsError> {
    let lo = expanded[degree];
    let hi = expanded[n + 1];
    if !(u >= lo && u <= hi) {
        return Err(NurbsError::Domain {
            param: u,
            min: lo,
            max: hi,
        });
    }
    if lo == hi {
        return Err(NurbsError::DegenerateDomain);
    }
    if u >= hi {
        // Walk down to the last span of positive width.
        let mut span = n;
        while expanded[span] == expanded[span + 1] {
            span -= 1;
        }
        return Ok(span);
    }
    let mut low = degree;
    let mut high = n + 1;
    let mut mid = (low + high) / 2;
    while u < expanded[mid] || u >= expanded[mid + 1] {
        if u < expanded[mid] {
            high = mid;
        } else {
            low = mid;
        }
        mid = (low + high) / 2;
    }
    Ok(mid)
}

/// The `degree + 1` basis values that are non-zero on `span`, i.e.
/// `N[span - degree .. = span]`, computed by the triangular (de Boor style)
/// recursion over the containing span. Denominators are always positive for a
/// positive-width span, so no explicit 0/0 guard is needed here.
pub(crate) fn local_basis(expanded: &[f64], degree: usize, span: usize, u: f64) -> Vec<f64> {
    let p = degree;
    let mut values = vec![0.0; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    values[0] = 1.0;
    for j in 1..=p {
        left[j] = u - expanded[span + 1 - j];
        right[j] = expanded[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = values[r] / (right[r + 1] + left[j - r]);
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    values
}

/// Local basis values together with their first derivatives, using
/// `N'_{i,p} = p * (N_{i,p-1} / (U[i+p] - U[i]) - N_{i+1,p-1} / (U[i+p+1] - U[i+1]))`
/// with the 0/0 := 0 convention on collapsed denominators.
pub(crate) fn local_basis_with_derivative(
    expanded: &[f64],
    degree: usize,
    span: usize,
    u: f64,
) -> (Vec<f64>, Vec<f64>) {
    let p = degree;
    let values = local_basis(expanded, p, span, u);
    let mut derivs = vec![0.0; p + 1];
    if p == 0 {
        return (values, derivs);
    }
    // Degree p-1 basis over the same span: non-zero for indices
    // span-p+1 ..= span.
    let lower = local_basis(expanded, p - 1, span, u);
    let lower_at = |i: isize| -> f64 {
        let lo = span as isize - p as isize + 1;
        if i >= lo && i <= span as isize {
            lower[(i - lo) as usize]
        } else {
            0.0
        }
    };
    for (k, d) in derivs.iter_mut().enumerate() {
        let i = span as isize - p as isize + k as isize;
        let iu = i as usize;
        let d1 = expanded[iu + p] - expanded[iu];
        let d2 = expanded[iu + p + 1] - expanded[iu + 1];
        let t1 = if d1 > 0.0 { lower_at(i) / d1 } else { 0.0 };
        let t2 = if d2 > 0.0 { lower_at(i + 1) / d2 } else { 0.0 };
        *d = p as f64 * (t1 - t2);
    }
    (values, derivs)
}

/// Evaluate all B-spline basis functions of the given degree at `u`.
///
/// The knot vector is interpreted as non-periodic; the result has one entry
/// per basis function (`expanded length - degree - 1`), with exactly
/// `degree + 1` non-zero entries scattered at the containing span. Values off
/// the local support are exact zeros.
pub fn basis_functions(knots: &KnotVector, degree: usize, u: f64) -> Result<Vec<f64>, NurbsError> {
    let expanded = knots.expanded();
    let len = expanded.len();
    if len < degree + 2 {
        return Err(NurbsError::Structure(format!(
            "knot vector with {len} expanded knots cannot support degree {degree}"
        )));
    }
    let count = len - degree - 1;
    let span = find_span(&expanded, degree, count - 1, u)?;
    let local = local_basis(&expanded, degree, span, u);
    let mut out = vec![0.0; count];
    out[span - degree..=span].copy_from_slice(&local);
    Ok(out)
}
