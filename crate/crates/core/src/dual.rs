//! Dual numbers `a + εb` with `ε² = 0`, and evaluation of smooth
//! functionals at `x + εy`.
//!
//! Only first-order terms are ever stored: a product drops the `ε²`
//! coefficient identically, which makes evaluating a tree over
//! [`DualScalar`] the forward-mode rule `f(x + εy) = f(x) + ε<∇f(x), y>`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{pow_f64, Prim, Scalar, SmoothExpr, UnknownPrim};
use crate::space::HVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DualError {
    #[error(transparent)]
    UnknownPrim(#[from] UnknownPrim),
    #[error("{0} has zero standard part and is not invertible in R[ε]")]
    NotInvertible(DualScalar),
}

/// `re + ε·eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualScalar {
    pub re: f64,
    pub eps: f64,
}

impl std::fmt::Display for DualScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+ε{}", self.re, self.eps)
    }
}

impl DualScalar {
    pub const ZERO: DualScalar = DualScalar { re: 0.0, eps: 0.0 };
    pub const ONE: DualScalar = DualScalar { re: 1.0, eps: 0.0 };
    /// The infinitesimal itself, `0 + ε·1`.
    pub const EPSILON: DualScalar = DualScalar { re: 0.0, eps: 1.0 };

    pub const fn new(re: f64, eps: f64) -> Self {
        Self { re, eps }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, eps: 0.0 }
    }

    /// `(a + εb)⁻¹ = a⁻¹ − ε b a⁻²`, defined only for `a ≠ 0`.
    pub fn inv(self) -> Result<Self, DualError> {
        if self.re == 0.0 {
            return Err(DualError::NotInvertible(self));
        }
        let r = 1.0 / self.re;
        Ok(Self::new(r, -self.eps * r * r))
    }
}

impl Add for DualScalar {
    type Output = DualScalar;
    fn add(self, q: DualScalar) -> DualScalar {
        DualScalar::new(self.re + q.re, self.eps + q.eps)
    }
}

impl Sub for DualScalar {
    type Output = DualScalar;
    fn sub(self, q: DualScalar) -> DualScalar {
        DualScalar::new(self.re - q.re, self.eps - q.eps)
    }
}

impl Neg for DualScalar {
    type Output = DualScalar;
    fn neg(self) -> DualScalar {
        DualScalar::new(-self.re, -self.eps)
    }
}

impl Mul for DualScalar {
    type Output = DualScalar;
    fn mul(self, q: DualScalar) -> DualScalar {
        DualScalar::new(self.re * q.re, self.re * q.eps + self.eps * q.re)
    }
}

pub fn dual_add(p: DualScalar, q: DualScalar) -> DualScalar {
    p + q
}

pub fn dual_mul(p: DualScalar, q: DualScalar) -> DualScalar {
    p * q
}

/// `prim(a) + ε b prim'(a)` for a primitive given by name.
pub fn dual_prim(name: &str, p: DualScalar) -> Result<DualScalar, DualError> {
    let prim: Prim = name.parse()?;
    Ok(p.prim(prim))
}

impl Scalar for DualScalar {
    fn constant(c: f64) -> Self {
        DualScalar::real(c)
    }

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn mul(self, other: Self) -> Self {
        self * other
    }

    fn scale(self, c: f64) -> Self {
        DualScalar::new(c * self.re, c * self.eps)
    }

    fn powi(self, p: u32) -> Self {
        if p == 0 {
            return DualScalar::ONE;
        }
        // d/da a^p = p a^(p-1)
        let lower = pow_f64(self.re, p - 1);
        DualScalar::new(lower * self.re, f64::from(p) * lower * self.eps)
    }

    fn prim(self, prim: Prim) -> Self {
        let (value, slope) = match prim {
            Prim::Sin => (self.re.sin(), self.re.cos()),
            Prim::Cos => (self.re.cos(), -self.re.sin()),
            Prim::Exp => {
                let e = self.re.exp();
                (e, e)
            }
        };
        DualScalar::new(value, self.eps * slope)
    }
}

/// `x + εy` in `H[ε]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector {
    pub point: HVector,
    pub tangent: HVector,
}

impl DualVector {
    pub fn new(point: HVector, tangent: HVector) -> Self {
        Self { point, tangent }
    }

    /// Coordinate `x_k + ε y_k`, zero-padded on either side.
    pub fn coord(&self, k: usize) -> DualScalar {
        DualScalar::new(self.point.coord(k), self.tangent.coord(k))
    }
}

/// Evaluates `f` at `x + εy` under dual arithmetic.
pub fn psi_eval(f: &SmoothExpr, arg: &DualVector) -> DualScalar {
    f.eval_with(&|k| arg.coord(k))
}
