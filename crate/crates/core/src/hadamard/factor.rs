use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{HadamardError, Limits};
use crate::expr::{SmoothExpr, Support};
use crate::quadrature::{GaussLegendre, Nesting, QuadratureSpec};
use crate::space::{inner, segment_point_unchecked, HVector, StarDomain};

/// A concrete smooth factor, evaluated on demand.
#[derive(Clone)]
pub struct Factor {
    label: String,
    func: Arc<dyn Fn(&HVector) -> f64 + Send + Sync>,
}

impl Factor {
    pub fn new(label: impl Into<String>, func: impl Fn(&HVector) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            func: Arc::new(func),
        }
    }

    pub fn eval(&self, x: &HVector) -> f64 {
        (self.func)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Factor").field(&self.label).finish()
    }
}

/// The family `{g_k}` for `f` at an anchor, possibly nested.
///
/// With an empty `path` this is the first-order family of `f`. A path
/// `[j_1, ..., j_m]` denotes the family obtained by re-factorizing
/// `g_{j_1}`, then `g_{j_1 j_2}`, and so on, so `eval_gk(k, x)` is
/// `g_{j_1 ... j_m k}(x)`.
#[derive(Debug, Clone)]
pub struct HadamardFactorization {
    f: SmoothExpr,
    anchor: HVector,
    domain: StarDomain,
    quad: QuadratureSpec,
    rule: GaussLegendre,
    path: Vec<usize>,
    support: Support,
    /// `∂_path f`, the integrand of the family one level up.
    parent: SmoothExpr,
    /// `k ↦ ∂_k ∂_path f`.
    integrands: BTreeMap<usize, SmoothExpr>,
}

pub fn decompose(
    f: &SmoothExpr,
    a: &HVector,
    domain: &StarDomain,
    quad: QuadratureSpec,
) -> Result<HadamardFactorization, HadamardError> {
    decompose_with_limits(f, a, domain, quad, &Limits::default())
}

pub fn decompose_with_limits(
    f: &SmoothExpr,
    a: &HVector,
    domain: &StarDomain,
    quad: QuadratureSpec,
    limits: &Limits,
) -> Result<HadamardFactorization, HadamardError> {
    if !domain.contains(a) {
        return Err(HadamardError::AnchorOutsideDomain);
    }
    let support = f.support();
    let dim = support.last().copied().unwrap_or(0);
    if dim > limits.max_dim {
        return Err(HadamardError::DimensionCap {
            dim,
            cap: limits.max_dim,
        });
    }
    Ok(HadamardFactorization::build(
        f.clone(),
        a.clone(),
        domain.clone(),
        quad,
        quad.rule(),
        Vec::new(),
        support,
    ))
}

impl HadamardFactorization {
    fn build(
        f: SmoothExpr,
        anchor: HVector,
        domain: StarDomain,
        quad: QuadratureSpec,
        rule: GaussLegendre,
        path: Vec<usize>,
        support: Support,
    ) -> Self {
        let parent = f.mixed_partial(&path);
        let integrands = support
            .iter()
            .map(|&k| (k, parent.partial(k)))
            .collect();
        Self {
            f,
            anchor,
            domain,
            quad,
            rule,
            path,
            support,
            parent,
            integrands,
        }
    }

    pub fn function(&self) -> &SmoothExpr {
        &self.f
    }

    pub fn anchor(&self) -> &HVector {
        &self.anchor
    }

    pub fn domain(&self) -> &StarDomain {
        &self.domain
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quad
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    /// Number of coordinates in `g(x)`: the largest support index, at least 1.
    pub fn dim(&self) -> usize {
        self.support.last().copied().unwrap_or(1)
    }

    fn check_point(&self, x: &HVector) -> Result<(), HadamardError> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(HadamardError::PointOutsideDomain)
        }
    }

    /// `g_{path, k}(x)`; exactly zero when `k` is outside the support.
    pub fn eval_gk(&self, k: usize, x: &HVector) -> Result<f64, HadamardError> {
        self.check_point(x)?;
        Ok(self.eval_gk_unchecked(k, x))
    }

    pub(crate) fn eval_gk_unchecked(&self, k: usize, x: &HVector) -> f64 {
        match self.integrands.get(&k) {
            Some(integrand) => self.nested_integral(integrand, self.path.len(), x),
            None => 0.0,
        }
    }

    /// `∫_{[0,1]^(m+1)} t_0^m t_1^(m-1) ⋯ t_m^0 · D(a + t_0⋯t_m (x - a)) dt`.
    fn nested_integral(&self, integrand: &SmoothExpr, m: usize, x: &HVector) -> f64 {
        if integrand.is_zero() {
            return 0.0;
        }
        let a = &self.anchor;
        let at = |tau: f64| integrand.eval(&segment_point_unchecked(a, x, tau));
        match self.quad.nesting {
            Nesting::Collapsed => {
                let norm: f64 = (1..=m).map(|i| i as f64).product();
                self.rule.integrate(|tau| {
                    let mut kernel = 1.0;
                    for _ in 0..m {
                        kernel *= 1.0 - tau;
                    }
                    kernel / norm * at(tau)
                })
            }
            Nesting::ProductGrid => self.grid_level(0, m, 1.0, 1.0, &at),
        }
    }

    fn grid_level(
        &self,
        level: usize,
        m: usize,
        tau: f64,
        weight: f64,
        at: &impl Fn(f64) -> f64,
    ) -> f64 {
        if level > m {
            return weight * at(tau);
        }
        let power = (m - level) as i32;
        self.rule
            .iter()
            .map(|(t, w)| self.grid_level(level + 1, m, tau * t, weight * w * t.powi(power), at))
            .sum()
    }

    /// `g(x) = Σ_k g_k(x) u_k`.
    pub fn eval_g(&self, x: &HVector) -> Result<HVector, HadamardError> {
        self.check_point(x)?;
        let mut g = vec![0.0; self.dim()];
        for &k in &self.support {
            g[k - 1] = self.eval_gk_unchecked(k, x);
        }
        Ok(HVector::new(g).expect("finite factor values"))
    }

    /// Value of the function this family factorizes: `f` itself for an
    /// empty path, otherwise the parent factor `g_path`.
    pub fn parent_value(&self, x: &HVector) -> Result<f64, HadamardError> {
        self.check_point(x)?;
        Ok(match self.path.len() {
            0 => self.f.eval(x),
            m => self.nested_integral(&self.parent, m - 1, x),
        })
    }

    /// `parent(a) + <g(x), x - a>`; equals `f(x)` for an unnested family.
    pub fn reconstruct(&self, x: &HVector) -> Result<f64, HadamardError> {
        let base = self.parent_value(&self.anchor)?;
        let g = self.eval_g(x)?;
        Ok(base + inner(&g, &x.sub(&self.anchor).padded(g.dim())))
    }

    /// Applies the factorization again to `g_k` at the same anchor.
    pub fn refactor(&self, k: usize) -> Result<HadamardFactorization, HadamardError> {
        if !self.support.contains(&k) {
            return Err(HadamardError::IndexOutOfSupport {
                index: k,
                support: self.support.iter().copied().collect(),
            });
        }
        let mut path = self.path.clone();
        path.push(k);
        Ok(HadamardFactorization::build(
            self.f.clone(),
            self.anchor.clone(),
            self.domain.clone(),
            self.quad,
            self.rule.clone(),
            path,
            self.support.clone(),
        ))
    }

    /// `g_k` as a standalone [`Factor`]. Points outside the domain yield NaN.
    pub fn factor(self: &Arc<Self>, k: usize) -> Factor {
        let this = Arc::clone(self);
        let mut label = String::from("g_");
        for i in self.path.iter().chain(std::iter::once(&k)) {
            label.push_str(&format!("{i},"));
        }
        label.pop();
        Factor::new(label, move |x| {
            this.eval_gk(k, x).unwrap_or(f64::NAN)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{gradient, parse};

    fn v(c: &[f64]) -> HVector {
        HVector::new(c.to_vec()).unwrap()
    }

    fn whole(f: &str, a: &[f64]) -> HadamardFactorization {
        decompose(
            &parse(f).unwrap(),
            &v(a),
            &StarDomain::WholeSpace,
            QuadratureSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn constant_has_zero_family() {
        let fact = whole("2.5", &[0.3]);
        let x = v(&[1.0, -4.0, 2.0]);
        assert_eq!(fact.eval_gk(1, &x).unwrap(), 0.0);
        assert!(fact.eval_g(&x).unwrap().is_zero());
        assert_eq!(fact.reconstruct(&x).unwrap(), 2.5);
    }

    #[test]
    fn square_gives_identity_factor() {
        // ∫₀¹ 2t·x1 dt = x1
        let fact = whole("x1^2", &[0.0]);
        assert!((fact.eval_gk(1, &v(&[5.0])).unwrap() - 5.0).abs() < 1e-13);
        assert!((fact.reconstruct(&v(&[3.0])).unwrap() - 9.0).abs() < 1e-13);
        let fact = whole("x1^2 + x2^2", &[0.0, 0.0]);
        let x = v(&[1.5, -2.5]);
        let g = fact.eval_g(&x).unwrap();
        assert!((g.coord(1) - 1.5).abs() < 1e-13 && (g.coord(2) + 2.5).abs() < 1e-13);
    }

    #[test]
    fn linear_functional_has_constant_factors() {
        let fact = whole("2*x1 - 3*x3", &[0.0]);
        let g = fact.eval_g(&v(&[9.0, 1.0, -7.0])).unwrap();
        assert!((g.coord(1) - 2.0).abs() < 1e-14);
        assert_eq!(g.coord(2), 0.0);
        assert!((g.coord(3) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn outside_support_is_exact_zero() {
        let fact = whole("x2^3", &[0.0]);
        assert_eq!(fact.eval_gk(1, &v(&[0.4, 1.1])).unwrap(), 0.0);
        assert_eq!(fact.eval_gk(7, &v(&[0.4, 1.1])).unwrap(), 0.0);
    }

    #[test]
    fn anchor_collapse() {
        let f = "sin(x1)*exp(x2) + x3^4";
        let a = [0.2, -0.4, 1.1];
        let fact = whole(f, &a);
        let g = fact.eval_g(&v(&a)).unwrap();
        let grad = gradient(&parse(f).unwrap(), &v(&a));
        for k in 1..=3 {
            assert!((g.coord(k) - grad.coord(k)).abs() <= 1e-12);
        }
        assert_eq!(fact.reconstruct(&v(&a)).unwrap(), parse(f).unwrap().eval(&v(&a)));
    }

    #[test]
    fn sin_reconstructs_to_quadrature_accuracy() {
        let fact = whole("sin(x1)", &[0.0]);
        assert!((fact.reconstruct(&v(&[1.0])).unwrap() - 1f64.sin()).abs() <= 1e-10);
    }

    #[test]
    fn domain_checks() {
        let ball = StarDomain::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let f = parse("x1*x2").unwrap();
        assert_eq!(
            decompose(&f, &v(&[2.0, 0.0]), &ball, QuadratureSpec::default()).unwrap_err(),
            HadamardError::AnchorOutsideDomain
        );
        let fact = decompose(&f, &v(&[0.1, 0.2]), &ball, QuadratureSpec::default()).unwrap();
        assert!(fact.eval_gk(1, &v(&[0.5, 0.5])).is_ok());
        assert_eq!(
            fact.eval_gk(1, &v(&[0.9, 0.9])).unwrap_err(),
            HadamardError::PointOutsideDomain
        );
        assert!(fact.reconstruct(&v(&[1.0, 0.0])).is_err());
        let limits = Limits {
            max_dim: 2,
            ..Limits::default()
        };
        assert!(matches!(
            decompose_with_limits(
                &parse("x3").unwrap(),
                &v(&[0.0]),
                &StarDomain::WholeSpace,
                QuadratureSpec::default(),
                &limits
            ),
            Err(HadamardError::DimensionCap { dim: 3, cap: 2 })
        ));
    }

    #[test]
    fn refactor_square_twice() {
        // x1^2 = x1·(0 + x1·1)
        let fact = whole("x1^2", &[0.0]);
        let nested = fact.refactor(1).unwrap();
        for x in [-3.0, 0.5, 2.0] {
            assert!((nested.eval_gk(1, &v(&[x])).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(nested.path(), &[1]);
        assert!(matches!(
            fact.refactor(2),
            Err(HadamardError::IndexOutOfSupport { index: 2, .. })
        ));
    }

    #[test]
    fn refactor_identity_and_second_order_anchor() {
        let src = "exp(0.3*x1)*cos(x2) + x1^2*x2";
        let f = parse(src).unwrap();
        let a = v(&[0.5, -0.25]);
        let fact = whole(src, a.coeffs());
        let x = v(&[1.5, 0.75]);
        for k in [1, 2] {
            let nested = fact.refactor(k).unwrap();
            let direct = fact.eval_gk(k, &x).unwrap();
            assert!((nested.reconstruct(&x).unwrap() - direct).abs() < 1e-12);
            for j in [1, 2] {
                let second = f.mixed_partial(&[k, j]).eval(&a);
                assert!((2.0 * nested.eval_gk(j, &a).unwrap() - second).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn product_grid_agrees_with_collapsed_kernel() {
        let f = parse("sin(x1)*exp(0.5*x2) + x1^3*x2^2").unwrap();
        let a = v(&[0.1, -0.3]);
        let x = v(&[0.9, 0.6]);
        let collapsed = decompose(&f, &a, &StarDomain::WholeSpace, QuadratureSpec::new(10).unwrap())
            .unwrap();
        let grid = decompose(
            &f,
            &a,
            &StarDomain::WholeSpace,
            QuadratureSpec::new(10).unwrap().with_nesting(Nesting::ProductGrid),
        )
        .unwrap();
        let mut c = collapsed.clone();
        let mut g = grid.clone();
        for k in [1, 2, 1] {
            c = c.refactor(k).unwrap();
            g = g.refactor(k).unwrap();
            for j in [1, 2] {
                let lhs = c.eval_gk(j, &x).unwrap();
                let rhs = g.eval_gk(j, &x).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "path {:?} j {j}: {lhs} vs {rhs}", c.path());
            }
        }
    }

    #[test]
    fn factor_handle_labels() {
        let fact = Arc::new(whole("x1*x2", &[0.0, 0.0]).refactor(2).unwrap());
        let g = fact.factor(1);
        assert_eq!(g.label(), "g_2,1");
        assert!((g.eval(&v(&[3.0, 4.0])) - 0.5).abs() < 1e-14);
    }
}
