//! Householder reflections and the affine normalisation used by the
//! two-point representation.

use crate::space::{inner, norm, HVector};

/// `Q = I - 2 v vᵀ / (vᵀ v)`, or the identity when `v` is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct Householder {
    v: Option<HVector>,
    vv: f64,
}

impl Householder {
    pub fn identity() -> Self {
        Self { v: None, vv: 1.0 }
    }

    /// Reflection sending the unit vector `e` to `u_1`.
    pub fn to_first_axis(e: &HVector) -> Self {
        let v = e.sub(&HVector::unit(1));
        let vv = inner(&v, &v);
        if vv <= 1e-30 {
            return Self::identity();
        }
        Self { v: Some(v), vv }
    }

    pub fn is_identity(&self) -> bool {
        self.v.is_none()
    }

    pub fn apply(&self, x: &HVector) -> HVector {
        match &self.v {
            None => x.clone(),
            Some(v) => x.sub(&v.scale(2.0 * inner(v, x) / self.vv)),
        }
    }

    /// Entry `Q_{ij}` (1-based). `Q` is symmetric.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let delta = if i == j { 1.0 } else { 0.0 };
        match &self.v {
            None => delta,
            Some(v) => delta - 2.0 * v.coord(i) * v.coord(j) / self.vv,
        }
    }
}

/// `φ(x) = Q (x - z) / ‖y - z‖`, which sends `z` to `0` and `y` to `u_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineReduction {
    pub z: HVector,
    pub scale: f64,
    pub reflection: Householder,
    pub dim: usize,
}

impl AffineReduction {
    /// Returns `None` when `y == z`.
    pub fn new(y: &HVector, z: &HVector) -> Option<Self> {
        let diff = y.sub(z);
        let scale = norm(&diff);
        if scale == 0.0 {
            return None;
        }
        let reflection = Householder::to_first_axis(&diff.scale(1.0 / scale));
        Some(Self {
            z: z.clone(),
            scale,
            reflection,
            dim: y.dim().max(z.dim()),
        })
    }

    pub fn forward(&self, x: &HVector) -> HVector {
        self.reflection
            .apply(&x.sub(&self.z))
            .scale(1.0 / self.scale)
    }

    pub fn inverse(&self, xi: &HVector) -> HVector {
        self.z.add(&self.reflection.apply(xi).scale(self.scale))
    }
}
