use serde::{Deserialize, Serialize};

use crate::{Point3, Vec3};

use super::basis::{find_span, local_basis, local_basis_with_derivative};
use super::convert::{clamp_ends, unroll_periodic, HomoPole};
use super::{KnotVector, NurbsError};

/// Rational B-spline curve.
///
/// For non-periodic curves the pole count equals `sum(mults) - degree - 1`;
/// for periodic curves it equals `sum(mults) - mults[0]`, with pole indices
/// wrapping around the period (`pole 0` is the first pole active just past
/// the start of the period window). `[first, last]` bounds the evaluated
/// parameter range and must lie inside the knot domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NurbsCurve {
    poles: Vec<Point3>,
    weights: Vec<f64>,
    degree: usize,
    knots: KnotVector,
    periodic: bool,
    first: f64,
    last: f64,
}

impl NurbsCurve {
    pub fn new(
        poles: Vec<Point3>,
        weights: Vec<f64>,
        degree: usize,
        knots: KnotVector,
        periodic: bool,
        first: f64,
        last: f64,
    ) -> Result<Self, NurbsError> {
        if degree == 0 {
            return Err(NurbsError::Structure("curve degree must be >= 1".into()));
        }
        if poles.len() != weights.len() {
            return Err(NurbsError::Structure(format!(
                "pole count {} != weight count {}",
                poles.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(NurbsError::Structure(
                "weights must be finite and strictly positive".into(),
            ));
        }
        if poles
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(NurbsError::Structure("poles must be finite".into()));
        }
        let expanded_len = knots.expanded_len();
        if periodic {
            let expected = expanded_len - knots.first_mult() as usize;
            if poles.len() != expected {
                return Err(NurbsError::Structure(format!(
                    "periodic curve needs sum(mults) - first mult = {expected} poles, got {}",
                    poles.len()
                )));
            }
            if knots.first_mult() != knots.last_mult() {
                return Err(NurbsError::Structure(
                    "periodic knot vector must have equal first and last multiplicities".into(),
                ));
            }
            if knots.max_mult() as usize > degree {
                return Err(NurbsError::Structure(format!(
                    "periodic multiplicities must be <= degree {degree}"
                )));
            }
        } else {
            if expanded_len < degree + 2 {
                return Err(NurbsError::Structure(
                    "not enough knots for the requested degree".into(),
                ));
            }
            let expected = expanded_len - degree - 1;
            if poles.len() != expected {
                return Err(NurbsError::Structure(format!(
                    "curve needs sum(mults) - degree - 1 = {expected} poles, got {}",
                    poles.len()
                )));
            }
            if knots.max_mult() as usize > degree + 1 {
                return Err(NurbsError::Structure(format!(
                    "multiplicities must be <= degree + 1 = {}",
                    degree + 1
                )));
            }
        }
        if poles.len() < degree + 1 {
            return Err(NurbsError::Structure(format!(
                "curve needs at least degree + 1 = {} poles, got {}",
                degree + 1,
                poles.len()
            )));
        }
        if !(first.is_finite() && last.is_finite()) || first > last {
            return Err(NurbsError::Structure(format!(
                "invalid parameter range [{first}, {last}]"
            )));
        }
        let (dom_lo, dom_hi) = if periodic {
            (knots.first(), knots.last())
        } else {
            let expanded = knots.expanded();
            (expanded[degree], expanded[poles.len()])
        };
        if first < dom_lo || last > dom_hi {
            return Err(NurbsError::Structure(format!(
                "range [{first}, {last}] outside knot domain [{dom_lo}, {dom_hi}]"
            )));
        }
        Ok(Self {
            poles,
            weights,
            degree,
            knots,
            periodic,
            first,
            last,
        })
    }

    /// Non-rational convenience constructor with all weights 1.
    pub fn polynomial(
        poles: Vec<Point3>,
        degree: usize,
        knots: KnotVector,
        first: f64,
        last: f64,
    ) -> Result<Self, NurbsError> {
        let weights = vec![1.0; poles.len()];
        Self::new(poles, weights, degree, knots, false, first, last)
    }

    pub fn poles(&self) -> &[Point3] {
        &self.poles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn first(&self) -> f64 {
        self.first
    }

    pub fn last(&self) -> f64 {
        self.last
    }

    pub fn is_rational(&self) -> bool {
        self.weights.iter().any(|&w| w != 1.0)
    }

    fn homogeneous_rows(&self) -> Vec<Vec<HomoPole>> {
        self.poles
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| vec![[p.x * w, p.y * w, p.z * w, w]])
            .collect()
    }

    /// Convert to an equivalent clamped non-periodic curve.
    ///
    /// Non-periodic input is returned unchanged. For periodic input the knot
    /// cycle is unrolled over one period with wrap-duplicated poles, then both
    /// domain endpoints are raised to full multiplicity by knot insertion, so
    /// the result is clamped and evaluates to the same points over
    /// `[first, last]`.
    pub fn unperiodize(&self) -> Result<NurbsCurve, NurbsError> {
        if !self.periodic {
            return Ok(self.clone());
        }
        let rows = self.homogeneous_rows();
        let (mut expanded, mut rows) = unroll_periodic(&self.knots, self.degree, &rows)?;
        clamp_ends(&mut expanded, &mut rows, self.degree);
        let mut poles = Vec::with_capacity(rows.len());
        let mut weights = Vec::with_capacity(rows.len());
        for row in rows {
            let [x, y, z, w] = row[0];
            if !(w > 0.0) {
                return Err(NurbsError::Internal(
                    "non-positive weight after unperiodize".into(),
                ));
            }
            poles.push(Point3::new(x / w, y / w, z / w));
            weights.push(w);
        }
        NurbsCurve::new(
            poles,
            weights,
            self.degree,
            KnotVector::from_expanded(&expanded)?,
            false,
            self.first,
            self.last,
        )
    }

    fn check_range(&self, u: f64) -> Result<(), NurbsError> {
        if u < self.first || u > self.last || !u.is_finite() {
            return Err(NurbsError::Domain {
                param: u,
                min: self.first,
                max: self.last,
            });
        }
        Ok(())
    }

    /// Evaluate the curve point at `u` (must lie within `[first, last]`).
    pub fn point(&self, u: f64) -> Result<Point3, NurbsError> {
        self.check_range(u)?;
        if self.periodic {
            return self.unperiodize()?.point(u);
        }
        let expanded = self.knots.expanded();
        let n = self.poles.len() - 1;
        let span = find_span(&expanded, self.degree, n, u)?;
        let basis = local_basis(&expanded, self.degree, span, u);
        let mut acc = [0.0; 4];
        for (j, &b) in basis.iter().enumerate() {
            let idx = span - self.degree + j;
            let w = self.weights[idx] * b;
            let p = &self.poles[idx];
            acc[0] += w * p.x;
            acc[1] += w * p.y;
            acc[2] += w * p.z;
            acc[3] += w;
        }
        if acc[3] <= 0.0 {
            return Err(NurbsError::Internal(
                "vanishing rational denominator on valid domain".into(),
            ));
        }
        Ok(Point3::new(
            acc[0] / acc[3],
            acc[1] / acc[3],
            acc[2] / acc[3],
        ))
    }

    /// Evaluate the derivative of the given order at `u`. Order 0 returns the
    /// point as a vector from the origin; only orders 0 and 1 are supported.
    pub fn derivative(&self, u: f64, order: usize) -> Result<Vec3, NurbsError> {
        if order > 1 {
            return Err(NurbsError::Structure(format!(
                "derivative order {order} unsupported (only 0 and 1)"
            )));
        }
        self.check_range(u)?;
        if self.periodic {
            return self.unperiodize()?.derivative(u, order);
        }
        if order == 0 {
            return Ok(self.point(u)?.coords);
        }
        let expanded = self.knots.expanded();
        let n = self.poles.len() - 1;
        let span = find_span(&expanded, self.degree, n, u)?;
        let (basis, dbasis) = local_basis_with_derivative(&expanded, self.degree, span, u);
        // Rational quotient rule: C' = (A' - w' C) / w with A = sum(N w P),
        // w = sum(N w).
        let mut a = [0.0; 4];
        let mut da = [0.0; 4];
        for j in 0..=self.degree {
            let idx = span - self.degree + j;
            let w = self.weights[idx];
            let p = &self.poles[idx];
            let homo = [w * p.x, w * p.y, w * p.z, w];
            for c in 0..4 {
                a[c] += basis[j] * homo[c];
                da[c] += dbasis[j] * homo[c];
            }
        }
        if a[3] <= 0.0 {
            return Err(NurbsError::Internal(
                "vanishing rational denominator on valid domain".into(),
            ));
        }
        let point = [a[0] / a[3], a[1] / a[3], a[2] / a[3]];
        Ok(Vec3::new(
            (da[0] - da[3] * point[0]) / a[3],
            (da[1] - da[3] * point[1]) / a[3],
            (da[2] - da[3] * point[2]) / a[3],
        ))
    }
}
