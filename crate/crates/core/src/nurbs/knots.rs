use serde::{Deserialize, Serialize};

use super::NurbsError;

/// Knot vector in distinct form: strictly increasing knot values paired with
/// per-knot multiplicities (each >= 1). The expanded form repeats every knot
/// according to its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotVector {
    knots: Vec<f64>,
    mults: Vec<u32>,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, mults: Vec<u32>) -> Result<Self, NurbsError> {
        if knots.is_empty() || knots.len() != mults.len() {
            return Err(NurbsError::Structure(format!(
                "knots and mults must be non-empty and of equal length, got {} and {}",
                knots.len(),
                mults.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(NurbsError::Structure("knot values must be finite".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NurbsError::Structure(
                "distinct knot values must be strictly increasing".into(),
            ));
        }
        if mults.iter().any(|&m| m == 0) {
            return Err(NurbsError::Structure(
                "knot multiplicities must be >= 1".into(),
            ));
        }
        Ok(Self { knots, mults })
    }

    /// Collapse an expanded non-decreasing knot sequence back to distinct form.
    pub fn from_expanded(expanded: &[f64]) -> Result<Self, NurbsError> {
        let mut knots = Vec::new();
        let mut mults: Vec<u32> = Vec::new();
        for &k in expanded {
            match knots.last() {
                Some(&prev) if prev == k => *mults.last_mut().unwrap() += 1,
                _ => {
                    knots.push(k);
                    mults.push(1);
                }
            }
        }
        Self::new(knots, mults)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn mults(&self) -> &[u32] {
        &self.mults
    }

    /// First (smallest) distinct knot value.
    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    /// Last (largest) distinct knot value.
    pub fn last(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn max_mult(&self) -> u32 {
        self.mults.iter().copied().max().unwrap()
    }

    pub fn first_mult(&self) -> u32 {
        self.mults[0]
    }

    pub fn last_mult(&self) -> u32 {
        *self.mults.last().unwrap()
    }

    /// Length of the expanded knot sequence (sum of multiplicities).
    pub fn expanded_len(&self) -> usize {
        self.mults.iter().map(|&m| m as usize).sum()
    }

    /// Expanded knot sequence with each knot repeated `mult` times.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.expanded_len());
        for (&k, &m) in self.knots.iter().zip(&self.mults) {
            for _ in 0..m {
                out.push(k);
            }
        }
        out
    }
}
