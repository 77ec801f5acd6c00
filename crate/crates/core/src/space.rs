//! Finite basis prefix of a real separable Hilbert space.
//!
//! An [`HVector`] stores the coefficients `x_k = <x, u_k>` against the
//! orthonormal basis `(u_k)`. Vectors of different lengths interoperate by
//! implicit zero-padding, which is how finitely supported sequences embed
//! into `l2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of basis coordinates a factorization may touch.
pub const DEFAULT_MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("vector must have at least one coefficient")]
    Empty,
    #[error("coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("segment parameter t = {0} lies outside [0, 1]")]
    SegmentParameter(f64),
    #[error("ball radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

/// Element of the truncated space, `coeffs[k] = <x, u_{k+1}>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HVector {
    coeffs: Vec<f64>,
}

impl HVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, SpaceError> {
        if coeffs.is_empty() {
            return Err(SpaceError::Empty);
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(SpaceError::NonFinite { index, value });
        }
        Ok(Self { coeffs })
    }

    /// Zero vector with `dim` coordinates (at least one).
    pub fn zeros(dim: usize) -> Self {
        Self {
            coeffs: vec![0.0; dim.max(1)],
        }
    }

    /// The basis vector `u_k` (1-based).
    pub fn unit(k: usize) -> Self {
        assert!(k >= 1, "basis indices are 1-based");
        let mut coeffs = vec![0.0; k];
        coeffs[k - 1] = 1.0;
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coordinate `x_k = <x, u_k>` (1-based); zero beyond the stored prefix.
    pub fn coord(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.coeffs.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Returns a copy padded with zeros up to `dim` coordinates.
    pub fn padded(&self, dim: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < dim {
            coeffs.resize(dim, 0.0);
        }
        Self { coeffs }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let dim = self.dim().max(other.dim());
        let coeffs = (1..=dim)
            .map(|k| op(self.coord(k), other.coord(k)))
            .collect();
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|v| c * v).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

impl TryFrom<Vec<f64>> for HVector {
    type Error = SpaceError;

    fn try_from(coeffs: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(coeffs)
    }
}

impl From<HVector> for Vec<f64> {
    fn from(v: HVector) -> Self {
        v.coeffs
    }
}

/// `sum_k u_k v_k` over the zero-padded common dimension.
pub fn inner(u: &HVector, v: &HVector) -> f64 {
    u.coeffs
        .iter()
        .zip(v.coeffs.iter())
        .map(|(a, b)| a * b)
        .sum()
}

pub fn norm(v: &HVector) -> f64 {
    inner(v, v).sqrt()
}

/// The point `a + t (x - a)` on the segment from `a` to `x`.
pub fn segment_point(a: &HVector, x: &HVector, t: f64) -> Result<HVector, SpaceError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(SpaceError::SegmentParameter(t));
    }
    Ok(segment_point_unchecked(a, x, t))
}

pub(crate) fn segment_point_unchecked(a: &HVector, x: &HVector, t: f64) -> HVector {
    a.zip_with(x, |ak, xk| ak + t * (xk - ak))
}

/// Open star-convex neighbourhoods supported by the factorization routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawDomain")]
pub enum StarDomain {
    #[serde(rename = "whole")]
    WholeSpace,
    Ball { center: HVector, radius: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawDomain {
    Whole,
    Ball { center: HVector, radius: f64 },
}

impl TryFrom<RawDomain> for StarDomain {
    type Error = SpaceError;

    fn try_from(raw: RawDomain) -> Result<Self, Self::Error> {
        match raw {
            RawDomain::Whole => Ok(StarDomain::WholeSpace),
            RawDomain::Ball { center, radius } => StarDomain::ball(center, radius),
        }
    }
}

impl StarDomain {
    pub fn ball(center: HVector, radius: f64) -> Result<Self, SpaceError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SpaceError::BadRadius(radius));
        }
        Ok(StarDomain::Ball { center, radius })
    }

    /// Membership test; balls are open so the boundary is excluded.
    pub fn contains(&self, x: &HVector) -> bool {
        match self {
            StarDomain::WholeSpace => true,
            StarDomain::Ball { center, radius } => norm(&x.sub(center)) < *radius,
        }
    }
}
