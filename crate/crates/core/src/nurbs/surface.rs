use serde::{Deserialize, Serialize};

use crate::Point3;

use super::basis::{find_span, local_basis};
use super::convert::{clamp_ends, unroll_periodic, HomoPole};
use super::{KnotVector, NurbsError};

/// Tensor-product rational B-spline surface.
///
/// Poles are stored as `poles[i][j]` with `i` indexing the u direction and
/// `j` the v direction; `weights` has the same shape. Each direction obeys
/// the same pole-count/knot relation as [`super::NurbsCurve`], applied
/// independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NurbsSurface {
    poles: Vec<Vec<Point3>>,
    weights: Vec<Vec<f64>>,
    u_degree: usize,
    v_degree: usize,
    u_knots: KnotVector,
    v_knots: KnotVector,
    u_periodic: bool,
    v_periodic: bool,
}

fn check_direction(
    label: &str,
    count: usize,
    degree: usize,
    knots: &KnotVector,
    periodic: bool,
) -> Result<(), NurbsError> {
    if degree == 0 {
        return Err(NurbsError::Structure(format!(
            "{label} degree must be >= 1"
        )));
    }
    let expanded_len = knots.expanded_len();
    if periodic {
        if knots.first_mult() != knots.last_mult() {
            return Err(NurbsError::Structure(format!(
                "periodic {label} knots must have equal first and last multiplicities"
            )));
        }
        if knots.max_mult() as usize > degree {
            return Err(NurbsError::Structure(format!(
                "periodic {label} multiplicities must be <= degree {degree}"
            )));
        }
        let expected = expanded_len - knots.first_mult() as usize;
        if count != expected {
            return Err(NurbsError::Structure(format!(
                "periodic {label} direction needs {expected} poles, got {count}"
            )));
        }
    } else {
        if expanded_len < degree + 2 {
            return Err(NurbsError::Structure(format!(
                "not enough {label} knots for degree {degree}"
            )));
        }
        let expected = expanded_len - degree - 1;
        if count != expected {
            return Err(NurbsError::Structure(format!(
                "{label} direction needs sum(mults) - degree - 1 = {expected} poles, got {count}"
            )));
        }
        if knots.max_mult() as usize > degree + 1 {
            return Err(NurbsError::Structure(format!(
                "{label} multiplicities must be <= degree + 1 = {}",
                degree + 1
            )));
        }
    }
    if count < degree + 1 {
        return Err(NurbsError::Structure(format!(
            "{label} direction needs at least degree + 1 = {} poles, got {count}",
            degree + 1
        )));
    }
    Ok(())
}

impl NurbsSurface {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        poles: Vec<Vec<Point3>>,
        weights: Vec<Vec<f64>>,
        u_degree: usize,
        v_degree: usize,
        u_knots: KnotVector,
        v_knots: KnotVector,
        u_periodic: bool,
        v_periodic: bool,
    ) -> Result<Self, NurbsError> {
        let nu = poles.len();
        if nu == 0 || poles[0].is_empty() {
            return Err(NurbsError::Structure("empty pole grid".into()));
        }
        let nv = poles[0].len();
        if poles.iter().any(|row| row.len() != nv) {
            return Err(NurbsError::Structure(
                "pole grid rows must all have the same length".into(),
            ));
        }
        if weights.len() != nu || weights.iter().any(|row| row.len() != nv) {
            return Err(NurbsError::Structure(
                "weight grid must match the pole grid shape".into(),
            ));
        }
        if weights
            .iter()
            .flatten()
            .any(|&w| !(w > 0.0) || !w.is_finite())
        {
            return Err(NurbsError::Structure(
                "weights must be finite and strictly positive".into(),
            ));
        }
        if poles
            .iter()
            .flatten()
            .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(NurbsError::Structure("poles must be finite".into()));
        }
        check_direction("u", nu, u_degree, &u_knots, u_periodic)?;
        check_direction("v", nv, v_degree, &v_knots, v_periodic)?;
        Ok(Self {
            poles,
            weights,
            u_degree,
            v_degree,
            u_knots,
            v_knots,
            u_periodic,
            v_periodic,
        })
    }

    /// Non-rational convenience constructor with all weights 1.
    #[allow(clippy::too_many_arguments)]
    pub fn polynomial(
        poles: Vec<Vec<Point3>>,
        u_degree: usize,
        v_degree: usize,
        u_knots: KnotVector,
        v_knots: KnotVector,
        u_periodic: bool,
        v_periodic: bool,
    ) -> Result<Self, NurbsError> {
        let weights = poles.iter().map(|row| vec![1.0; row.len()]).collect();
        Self::new(
            poles, weights, u_degree, v_degree, u_knots, v_knots, u_periodic, v_periodic,
        )
    }

    pub fn poles(&self) -> &[Vec<Point3>] {
        &self.poles
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn u_degree(&self) -> usize {
        self.u_degree
    }

    pub fn v_degree(&self) -> usize {
        self.v_degree
    }

    pub fn u_knots(&self) -> &KnotVector {
        &self.u_knots
    }

    pub fn v_knots(&self) -> &KnotVector {
        &self.v_knots
    }

    pub fn u_periodic(&self) -> bool {
        self.u_periodic
    }

    pub fn v_periodic(&self) -> bool {
        self.v_periodic
    }

    pub fn is_rational(&self) -> bool {
        self.weights.iter().flatten().any(|&w| w != 1.0)
    }

    /// Parametric domain `((u_min, u_max), (v_min, v_max))`.
    pub fn domain(&self) -> ((f64, f64), (f64, f64)) {
        let dir = |knots: &KnotVector, degree: usize, count: usize, periodic: bool| {
            if periodic {
                (knots.first(), knots.last())
            } else {
                let expanded = knots.expanded();
                (expanded[degree], expanded[count])
            }
        };
        (
            dir(&self.u_knots, self.u_degree, self.poles.len(), self.u_periodic),
            dir(
                &self.v_knots,
                self.v_degree,
                self.poles[0].len(),
                self.v_periodic,
            ),
        )
    }

    /// Convert any periodic direction to an equivalent clamped non-periodic
    /// form; non-periodic input is returned unchanged.
    pub fn unperiodize(&self) -> Result<NurbsSurface, NurbsError> {
        if !self.u_periodic && !self.v_periodic {
            return Ok(self.clone());
        }
        let mut surface = self.clone();
        if surface.u_periodic {
            // Rows along u: each row carries the full v line of poles.
            let rows: Vec<Vec<HomoPole>> = surface
                .poles
                .iter()
                .zip(&surface.weights)
                .map(|(prow, wrow)| {
                    prow.iter()
                        .zip(wrow)
                        .map(|(p, &w)| [p.x * w, p.y * w, p.z * w, w])
                        .collect()
                })
                .collect();
            let (mut expanded, mut rows) =
                unroll_periodic(&surface.u_knots, surface.u_degree, &rows)?;
            clamp_ends(&mut expanded, &mut rows, surface.u_degree);
            let (poles, weights) = split_homogeneous(&rows)?;
            surface = NurbsSurface::new(
                poles,
                weights,
                surface.u_degree,
                surface.v_degree,
                KnotVector::from_expanded(&expanded)?,
                surface.v_knots.clone(),
                false,
                surface.v_periodic,
            )?;
        }
        if surface.v_periodic {
            // Rows along v: transpose, convert, transpose back.
            let nu = surface.poles.len();
            let nv = surface.poles[0].len();
            let rows: Vec<Vec<HomoPole>> = (0..nv)
                .map(|j| {
                    (0..nu)
                        .map(|i| {
                            let p = &surface.poles[i][j];
                            let w = surface.weights[i][j];
                            [p.x * w, p.y * w, p.z * w, w]
                        })
                        .collect()
                })
                .collect();
            let (mut expanded, mut rows) =
                unroll_periodic(&surface.v_knots, surface.v_degree, &rows)?;
            clamp_ends(&mut expanded, &mut rows, surface.v_degree);
            let (tposed, tweights) = split_homogeneous(&rows)?;
            let new_nv = tposed.len();
            let poles: Vec<Vec<Point3>> = (0..nu)
                .map(|i| (0..new_nv).map(|j| tposed[j][i]).collect())
                .collect();
            let weights: Vec<Vec<f64>> = (0..nu)
                .map(|i| (0..new_nv).map(|j| tweights[j][i]).collect())
                .collect();
            surface = NurbsSurface::new(
                poles,
                weights,
                surface.u_degree,
                surface.v_degree,
                surface.u_knots.clone(),
                KnotVector::from_expanded(&expanded)?,
                false,
                false,
            )?;
        }
        Ok(surface)
    }

    /// Evaluate the surface point at `(u, v)`.
    pub fn point(&self, u: f64, v: f64) -> Result<Point3, NurbsError> {
        if self.u_periodic || self.v_periodic {
            return self.unperiodize()?.point(u, v);
        }
        let ue = self.u_knots.expanded();
        let ve = self.v_knots.expanded();
        let nu = self.poles.len();
        let nv = self.poles[0].len();
        let uspan = find_span(&ue, self.u_degree, nu - 1, u)?;
        let vspan = find_span(&ve, self.v_degree, nv - 1, v)?;
        let ubasis = local_basis(&ue, self.u_degree, uspan, u);
        let vbasis = local_basis(&ve, self.v_degree, vspan, v);
        let mut acc = [0.0; 4];
        for (a, &bu) in ubasis.iter().enumerate() {
            let i = uspan - self.u_degree + a;
            for (b, &bv) in vbasis.iter().enumerate() {
                let j = vspan - self.v_degree + b;
                let w = self.weights[i][j] * bu * bv;
                let p = &self.poles[i][j];
                acc[0] += w * p.x;
                acc[1] += w * p.y;
                acc[2] += w * p.z;
                acc[3] += w;
            }
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
}

fn split_homogeneous(
    rows: &[Vec<HomoPole>],
) -> Result<(Vec<Vec<Point3>>, Vec<Vec<f64>>), NurbsError> {
    let mut poles = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for row in rows {
        let mut prow = Vec::with_capacity(row.len());
        let mut wrow = Vec::with_capacity(row.len());
        for &[x, y, z, w] in row {
            if !(w > 0.0) {
                return Err(NurbsError::Internal(
                    "non-positive weight after unperiodize".into(),
                ));
            }
            prow.push(Point3::new(x / w, y / w, z / w));
            wrow.push(w);
        }
        poles.push(prow);
        weights.push(wrow);
    }
    Ok((poles, weights))
}
