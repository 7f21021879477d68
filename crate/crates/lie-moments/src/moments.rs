//! Truncated moment description of a state.
//!
//! A [`MomentState`] holds the expectations `x_k = ⟨x̂_k⟩` and the
//! Weyl-ordered central moments `Δ(x^{i⃗}) = ⟨ê_{i⃗}⟩` for `2 ≤ |i⃗| ≤ N`.
//! Degree-0 and degree-1 moments are fixed by the conventions `Δ(1) = 1`,
//! `Δ(x_k) = 0` and are never stored; a stored degree that is absent reads
//! as `0`, which keeps sparse states cheap.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::index::{indices_up_to, MultiIndex};

/// Semiclassical order of a single term: `|i⃗|` factors of `Δx̂` count once
/// each, every power of `ħ` counts twice, and a residual constraint factor
/// `(C − c)` counts twice. Truncation at order `N` keeps terms with
/// `order ≤ N`.
pub fn term_order(moment_degree: u32, hbar_power: u32, constraint_factor: bool) -> u32 {
    moment_degree + 2 * hbar_power + if constraint_factor { 2 } else { 0 }
}

/// Errors building or editing a [`MomentState`].
#[derive(Debug, Error, PartialEq)]
pub enum MomentError {
    #[error("hbar must be positive and finite, got {got}")]
    BadHbar { got: f64 },
    #[error("truncation order must be at least 2, got {got}")]
    OrderTooSmall { got: u32 },
    #[error("state dimension must be at least 1")]
    DimensionZero,
    #[error("moment index {idx} has dimension {got}, state has {dim}")]
    DimensionMismatch { idx: MultiIndex, got: usize, dim: usize },
    #[error("moment index {idx} has degree {degree}, outside 2..={order}")]
    DegreeOutOfRange { idx: MultiIndex, degree: u32, order: u32 },
}

/// Expectations plus central moments up to a truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    dim: usize,
    hbar: f64,
    order: u32,
    expectations: Vec<f64>,
    moments: BTreeMap<MultiIndex, f64>,
}

impl MomentState {
    /// A state with the given expectations and no stored moments yet.
    pub fn new(expectations: Vec<f64>, hbar: f64, order: u32) -> Result<Self, MomentError> {
        if expectations.is_empty() {
            return Err(MomentError::DimensionZero);
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(MomentError::BadHbar { got: hbar });
        }
        if order < 2 {
            return Err(MomentError::OrderTooSmall { got: order });
        }
        Ok(MomentState {
            dim: expectations.len(),
            hbar,
            order,
            expectations,
            moments: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn expectations(&self) -> &[f64] {
        &self.expectations
    }

    pub fn expectation(&self, k: usize) -> f64 {
        self.expectations[k]
    }

    pub fn set_expectation(&mut self, k: usize, value: f64) {
        self.expectations[k] = value;
    }

    /// Reads a moment. Degree 0 is `1`, degree 1 is `0` (central moments),
    /// anything not stored is `0`.
    pub fn moment(&self, idx: &MultiIndex) -> f64 {
        match idx.degree() {
            0 => 1.0,
            1 => 0.0,
            _ => self.moments.get(idx).copied().unwrap_or(0.0),
        }
    }

    /// Stores a moment; the index must have degree `2..=order` and the
    /// state's dimension.
    pub fn set_moment(&mut self, idx: MultiIndex, value: f64) -> Result<(), MomentError> {
        if idx.dim() != self.dim {
            return Err(MomentError::DimensionMismatch {
                got: idx.dim(),
                dim: self.dim,
                idx,
            });
        }
        let degree = idx.degree();
        if degree < 2 || degree > self.order {
            return Err(MomentError::DegreeOutOfRange {
                degree,
                order: self.order,
                idx,
            });
        }
        self.moments.insert(idx, value);
        Ok(())
    }

    /// Builder-style [`MomentState::set_moment`].
    pub fn with_moment(mut self, idx: MultiIndex, value: f64) -> Result<Self, MomentError> {
        self.set_moment(idx, value)?;
        Ok(self)
    }

    /// Stored (index, value) pairs in index order.
    pub fn stored_moments(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.moments.iter().map(|(i, &v)| (i, v))
    }

    /// Every index slot of degree `2..=order`, graded order — the canonical
    /// coordinate system used when states are flattened to vectors.
    pub fn moment_slots(&self) -> Vec<MultiIndex> {
        indices_up_to(self.dim, self.order)
            .into_iter()
            .filter(|i| i.degree() >= 2)
            .collect()
    }

    /// Flattens the moments onto `slots` (typically [`MomentState::moment_slots`]).
    pub fn moment_vector(&self, slots: &[MultiIndex]) -> Vec<f64> {
        slots.iter().map(|i| self.moment(i)).collect()
    }

    /// The counterpart of [`MomentState::moment_vector`]: replaces all stored
    /// moments with the given slot values.
    pub fn set_moment_vector(
        &mut self,
        slots: &[MultiIndex],
        values: &[f64],
    ) -> Result<(), MomentError> {
        assert_eq!(slots.len(), values.len(), "slot/value length mismatch");
        self.moments.clear();
        for (idx, &v) in slots.iter().zip(values) {
            self.set_moment(idx.clone(), v)?;
        }
        Ok(())
    }

    /// The matrix of second moments `Δ(x_i x_j)`.
    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, j| {
            self.moment(&MultiIndex::unit(d, i).plus_unit(j))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_guards() {
        assert_eq!(
            MomentState::new(vec![], 1.0, 2).err(),
            Some(MomentError::DimensionZero)
        );
        assert!(matches!(
            MomentState::new(vec![0.0], -1.0, 2),
            Err(MomentError::BadHbar { .. })
        ));
        assert!(matches!(
            MomentState::new(vec![0.0], 1.0, 1),
            Err(MomentError::OrderTooSmall { got: 1 })
        ));
    }

    #[test]
    fn moment_conventions() {
        let mut s = MomentState::new(vec![1.0, 0.0, 0.5], 0.1, 3).unwrap();
        assert_eq!(s.moment(&MultiIndex::zero(3)), 1.0);
        assert_eq!(s.moment(&MultiIndex::unit(3, 1)), 0.0);
        let idx = MultiIndex::new(vec![1, 1, 0]);
        assert_eq!(s.moment(&idx), 0.0);
        s.set_moment(idx.clone(), 0.25).unwrap();
        assert_eq!(s.moment(&idx), 0.25);
        // degree outside 2..=order is rejected
        assert!(matches!(
            s.set_moment(MultiIndex::new(vec![2, 2, 0]), 1.0),
            Err(MomentError::DegreeOutOfRange { degree: 4, .. })
        ));
    }

    #[test]
    fn slots_and_vector_roundtrip() {
        let mut s = MomentState::new(vec![0.0, 0.0], 0.5, 3).unwrap();
        let slots = s.moment_slots();
        // degree 2: 3 indices, degree 3: 4 indices
        assert_eq!(slots.len(), 7);
        let values: Vec<f64> = (0..7).map(|k| 0.1 * k as f64).collect();
        s.set_moment_vector(&slots, &values).unwrap();
        assert_eq!(s.moment_vector(&slots), values);
        let cov = s.covariance_matrix();
        assert_eq!(cov[(0, 1)], cov[(1, 0)]);
    }

    #[test]
    fn grading() {
        assert_eq!(term_order(3, 0, false), 3);
        assert_eq!(term_order(1, 1, false), 3);
        assert_eq!(term_order(0, 2, false), 4);
        assert_eq!(term_order(2, 0, true), 4);
    }
}
