//! Special representations built from nested factorizations: functions
//! vanishing on every coordinate axis, and functions with two prescribed
//! zeros.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::factor::{decompose, Factor};
use super::HadamardError;
use crate::expr::SmoothExpr;
use crate::quadrature::QuadratureSpec;
use crate::reflect::AffineReduction;
use crate::space::{HVector, StarDomain};

/// Tolerance for "numerically zero" in the precondition probes.
pub const ZERO_TOL: f64 = 1e-9;

/// Radius `r` of the axis probe grid `δ ∈ {±2^{-p} r}`.
pub const AXIS_PROBE_RADIUS: f64 = 4.0;
const AXIS_PROBE_LEVELS: i32 = 10;

/// `f(x) = Σ_{k,j} x_k x_j g_{kj}(x)` for `f` vanishing on every axis.
#[derive(Debug, Clone)]
pub struct AxesFactorization {
    factors: BTreeMap<(usize, usize), Factor>,
}

impl AxesFactorization {
    pub fn factors(&self) -> &BTreeMap<(usize, usize), Factor> {
        &self.factors
    }

    pub fn get(&self, k: usize, j: usize) -> Option<&Factor> {
        self.factors.get(&(k, j))
    }

    pub fn reconstruct(&self, x: &HVector) -> f64 {
        self.factors
            .iter()
            .map(|(&(k, j), g)| x.coord(k) * x.coord(j) * g.eval(x))
            .sum()
    }
}

/// Checks `|f(δ u_n)| ≤ ZERO_TOL` on the probe grid for each `n` in the support.
pub fn probe_axes(f: &SmoothExpr) -> Result<(), HadamardError> {
    for axis in f.support() {
        for p in 0..=AXIS_PROBE_LEVELS {
            for sign in [1.0, -1.0] {
                let delta = sign * AXIS_PROBE_RADIUS * 0.5f64.powi(p);
                let value = f.eval(&HVector::unit(axis).scale(delta));
                if value.abs() > ZERO_TOL || !value.is_finite() {
                    return Err(HadamardError::AxesPrecondition { axis, delta, value });
                }
            }
        }
    }
    Ok(())
}

/// Second-level factors `g_{kj}` at the origin for a function that vanishes
/// on every `span{u_n}`. Uses `f(0) = 0` and `g_k(0) = ∂_k f(0) = 0`.
pub fn axes_vanishing_factor(
    f: &SmoothExpr,
    quad: QuadratureSpec,
) -> Result<AxesFactorization, HadamardError> {
    probe_axes(f)?;
    let origin = HVector::zeros(f.max_coord());
    let base = decompose(f, &origin, &StarDomain::WholeSpace, quad)?;
    let mut factors = BTreeMap::new();
    for &k in base.support() {
        let nested = Arc::new(base.refactor(k)?);
        for &j in base.support() {
            factors.insert((k, j), nested.factor(j));
        }
    }
    Ok(AxesFactorization { factors })
}

/// `f(x) = Σ_k g_k(x) h_k(x)` with `g_k(y) = 0` and `h_k(z) = 0`.
#[derive(Debug, Clone)]
pub struct TwoPointFactorization {
    reduction: AffineReduction,
    w: HVector,
    g: Vec<Factor>,
    h: Vec<Factor>,
}

impl TwoPointFactorization {
    pub fn reduction(&self) -> &AffineReduction {
        &self.reduction
    }

    /// `w = g̃(u_1)` in reduced coordinates.
    pub fn w(&self) -> &HVector {
        &self.w
    }

    pub fn g(&self) -> &[Factor] {
        &self.g
    }

    pub fn h(&self) -> &[Factor] {
        &self.h
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn reconstruct(&self, x: &HVector) -> f64 {
        self.g
            .iter()
            .zip(&self.h)
            .map(|(g, h)| g.eval(x) * h.eval(x))
            .sum()
    }

    /// `max_k |g_k(y)|` and `max_k |h_k(z)|`.
    pub fn endpoint_residuals(&self, y: &HVector, z: &HVector) -> (f64, f64) {
        let gy = self.g.iter().map(|g| g.eval(y).abs()).fold(0.0, f64::max);
        let hz = self.h.iter().map(|h| h.eval(z).abs()).fold(0.0, f64::max);
        (gy, hz)
    }
}

/// Product representation for a function with zeros at `y ≠ z`.
///
/// Reduces to `y = u_1`, `z = 0` with `φ(x) = Q(x - z)/‖y - z‖`, factorizes
/// the pulled-back `f̃ = f∘φ⁻¹` at the origin as `f̃(ξ) = <g̃(ξ), ξ>`, sets
/// `w = g̃(u_1)` and emits, for every coordinate `k`,
///
/// ```text
/// g_{3k-2} = g̃_k - w_k    h_{3k-2} = ξ_k
/// g_{3k-1} = w_k ξ_k       h_{3k-1} = ξ_1
/// g_{3k}   = 1 - ξ_1       h_{3k}   = w_k ξ_k
/// ```
///
/// with `ξ = φ(x)`. The last two rows sum to `w_k ξ_k`, so the total is
/// `<g̃ - w, ξ> + <w, ξ> = f̃(ξ)`.
pub fn two_point_factor(
    f: &SmoothExpr,
    y: &HVector,
    z: &HVector,
    quad: QuadratureSpec,
) -> Result<TwoPointFactorization, HadamardError> {
    let reduction = AffineReduction::new(y, z).ok_or(HadamardError::CoincidentPoints)?;
    for (point, at) in [("y", y), ("z", z)] {
        let value = f.eval(at);
        if value.abs() > ZERO_TOL || !value.is_finite() {
            return Err(HadamardError::NotAZero { point, value });
        }
    }
    let dim = reduction.dim.max(f.max_coord());
    let pulled = pull_back(f, &reduction, dim);
    let reduced = Arc::new(decompose(
        &pulled,
        &HVector::zeros(dim),
        &StarDomain::WholeSpace,
        quad,
    )?);
    let y_reduced = reduction.forward(y);
    let w = reduced
        .eval_g(&y_reduced)
        .expect("whole-space factorization")
        .padded(dim);

    let phi = Arc::new(reduction.clone());
    let mut g = Vec::with_capacity(3 * dim);
    let mut h = Vec::with_capacity(3 * dim);
    for k in 1..=dim {
        let wk = w.coord(k);
        let n = 3 * k;

        let (p, r) = (Arc::clone(&phi), Arc::clone(&reduced));
        g.push(Factor::new(format!("g_{}", n - 2), move |x| {
            r.eval_gk_unchecked(k, &p.forward(x)) - wk
        }));
        let p = Arc::clone(&phi);
        h.push(Factor::new(format!("h_{}", n - 2), move |x| p.forward(x).coord(k)));

        let p = Arc::clone(&phi);
        g.push(Factor::new(format!("g_{}", n - 1), move |x| wk * p.forward(x).coord(k)));
        let p = Arc::clone(&phi);
        h.push(Factor::new(format!("h_{}", n - 1), move |x| p.forward(x).coord(1)));

        let p = Arc::clone(&phi);
        g.push(Factor::new(format!("g_{n}"), move |x| 1.0 - p.forward(x).coord(1)));
        let p = Arc::clone(&phi);
        h.push(Factor::new(format!("h_{n}"), move |x| wk * p.forward(x).coord(k)));
    }
    Ok(TwoPointFactorization {
        reduction,
        w,
        g,
        h,
    })
}

/// `f∘φ⁻¹` with `φ⁻¹(ξ) = z + ‖y - z‖ Q ξ`, substituted coordinate-wise.
fn pull_back(f: &SmoothExpr, phi: &AffineReduction, dim: usize) -> SmoothExpr {
    f.substitute(&|k| {
        let mut terms = vec![SmoothExpr::Const(phi.z.coord(k))];
        for i in 1..=dim {
            let q = phi.reflection.entry(k, i);
            if q != 0.0 {
                terms.push(SmoothExpr::scale(phi.scale * q, SmoothExpr::Coord(i)));
            }
        }
        SmoothExpr::add(terms)
    })
}
