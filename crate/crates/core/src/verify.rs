//! Seeded property checks over a standard family of functions.
//!
//! Every check samples deterministically from a ChaCha stream derived from
//! [`CheckConfig::seed`] and the check name, records the worst observed
//! residual together with a standalone counter-input, and reports pass or
//! fail against a fixed tolerance. [`run_suite`] runs all checks in a fixed
//! order; its JSON-lines rendering is byte-identical for identical configs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual::{dual_mul, psi_eval, DualScalar, DualVector};
use crate::expr::{directional_derivative, gradient, nth_directional, parse, SmoothExpr};
use crate::hadamard::{
    axes_vanishing_factor, decompose, multi_indices, remainder_factors, taylor,
    two_point_factor, HadamardError,
};
use crate::quadrature::{QuadratureSpec, DEFAULT_NODES};
use crate::space::{norm, HVector, StarDomain};

/// `|g_k(a) - ∂_k f(a)|`, relative to `max(1, |∂_k f(a)|)`.
pub const ANCHOR_GRADIENT_TOL: f64 = 1e-12;
/// `|2 g_{kj}(a) - ∂_k ∂_j f(a)|`, relative.
pub const ANCHOR_HESSIAN_TOL: f64 = 1e-10;
/// Exact-arithmetic identities of dual evaluation, relative.
pub const ALGEBRA_REL_TOL: f64 = 1e-12;
/// Dual or symbolic derivative against a central difference, relative.
pub const FD_REL_TOL: f64 = 1e-6;
/// Reconstruction of factored representations.
pub const FACTOR_TOL: f64 = 1e-8;
/// `|g_k(y)|` and `|h_k(z)|` in the two-point representation.
pub const ENDPOINT_TOL: f64 = 1e-10;
/// Allowed shortfall of the fitted remainder decay exponent.
pub const EXPONENT_SLACK: f64 = 0.1;
/// Remainders below this magnitude are rounding noise.
pub const ROUNDING_FLOOR: f64 = 1e-13;
/// Radius of the sampling ball around the anchor.
pub const SAMPLE_RADIUS: f64 = 4.0;
/// Length of the first step in the Taylor halving sequence.
pub const TAYLOR_BASE_STEP: f64 = 1.0;
/// Number of halvings used in the exponent fit.
pub const TAYLOR_HALVINGS: i32 = 6;
/// Halvings tried before giving up on a settled window.
pub const TAYLOR_MAX_HALVINGS: i32 = 40;
/// Largest spread of local decay rates inside a settled window.
pub const SLOPE_SPREAD: f64 = 0.05;
/// Vanishing threshold for derivative probes.
pub const VANISH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid check configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Hadamard(#[from] HadamardError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub samples: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub fd_step: f64,
    pub dims: usize,
    pub nodes: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 200,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            fd_step: 1e-5,
            dims: 8,
            nodes: DEFAULT_NODES,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.samples == 0 {
            return Err(VerifyError::Config("samples must be at least 1"));
        }
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(VerifyError::Config("tolerances must be positive"));
        }
        if !positive(self.fd_step) {
            return Err(VerifyError::Config("finite-difference step must be positive"));
        }
        if self.dims == 0 || self.nodes == 0 {
            return Err(VerifyError::Config("dims and nodes must be at least 1"));
        }
        Ok(())
    }

    fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::new(self.nodes).expect("validated node count")
    }
}

/// Everything needed to re-evaluate a residual outside the harness.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CounterInput {
    pub function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<HVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<HVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<HVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub input: CounterInput,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub worst_case: WorstCase,
    pub samples_run: usize,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// One report per line.
pub fn to_json_lines(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.to_json());
        out.push('\n');
    }
    out
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Tracks the sample with the largest residual-to-tolerance ratio.
struct Worst {
    name: String,
    ratio: f64,
    case: WorstCase,
    samples: usize,
}

impl Worst {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ratio: f64::NEG_INFINITY,
            case: WorstCase::default(),
            samples: 0,
        }
    }

    fn observe(&mut self, residual: f64, tolerance: f64, input: impl FnOnce() -> CounterInput) {
        let ratio = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual / tolerance
        };
        if ratio > self.ratio {
            self.ratio = ratio;
            self.case = WorstCase {
                input: input(),
                residual: if residual.is_nan() { f64::MAX } else { residual },
                tolerance,
            };
        }
    }

    fn sample_done(&mut self) {
        self.samples += 1;
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name,
            passed: self.ratio <= 1.0,
            worst_case: self.case,
            samples_run: self.samples,
        }
    }
}

fn stream(cfg: &CheckConfig, label: &str) -> ChaCha8Rng {
    // FNV-1a keeps the per-check streams stable across platforms
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(cfg.seed ^ h)
}

/// Uniform direction on the unit sphere of `dim` coordinates.
pub fn unit_direction(rng: &mut impl Rng, dim: usize) -> HVector {
    loop {
        let raw: Vec<f64> = (0..dim.max(1)).map(|_| rng.sample(StandardNormal)).collect();
        let v = HVector::new(raw).expect("finite normals");
        let n = norm(&v);
        if n > 1e-12 {
            return v.scale(1.0 / n);
        }
    }
}

/// Uniform direction on the unit sphere of `span{u_k : k ∈ support}`.
pub fn support_direction(rng: &mut impl Rng, support: &[usize]) -> HVector {
    let Some(&top) = support.last() else {
        return HVector::zeros(1);
    };
    let sub = unit_direction(rng, support.len());
    let mut coeffs = vec![0.0; top];
    for (i, &k) in support.iter().enumerate() {
        coeffs[k - 1] = sub.coeffs()[i];
    }
    HVector::new(coeffs).expect("finite")
}

/// Uniform point in the open ball, by direction and radius `R u^(1/d)`.
pub fn uniform_in_ball(rng: &mut impl Rng, center: &HVector, radius: f64, dim: usize) -> HVector {
    let dim = dim.max(center.dim());
    let dir = unit_direction(rng, dim);
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / dim as f64) * (1.0 - 1e-12);
    center.padded(dim).add(&dir.scale(r))
}

fn rel_scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0, |m, v| m.max(v.abs()))
}

fn sample_dim(cfg: &CheckConfig, f: &SmoothExpr) -> usize {
    cfg.dims.max(f.max_coord())
}

/// `|f(a) + <g(x), x - a> - f(x)|` at sampled `x ∈ U`, against
/// `abs_tol + rel_tol |f(x)|`.
pub fn check_hadamard_identity(
    f: &SmoothExpr,
    a: &HVector,
    domain: &StarDomain,
    cfg: &CheckConfig,
) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let fact = decompose(f, a, domain, cfg.quad())?;
    let name = format!("hadamard_identity[{f}]");
    let mut rng = stream(cfg, &name);
    let (center, radius) = match domain {
        StarDomain::WholeSpace => (a.clone(), SAMPLE_RADIUS),
        StarDomain::Ball { center, radius } => (center.clone(), *radius),
    };
    let dim = sample_dim(cfg, f).max(a.dim());
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &center, radius, dim);
        let fx = f.eval(&x);
        let rec = fact.reconstruct(&x)?;
        worst.observe((rec - fx).abs(), cfg.abs_tol + cfg.rel_tol * fx.abs(), || {
            CounterInput {
                function: f.to_string(),
                anchor: Some(a.clone()),
                point: Some(x.clone()),
                ..Default::default()
            }
        });
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// `g_k(a) = ∂_k f(a)` for every `k` in the support.
pub fn check_anchor_gradient(f: &SmoothExpr, a: &HVector, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let fact = decompose(f, a, &StarDomain::WholeSpace, cfg.quad())?;
    let g = fact.eval_g(a)?;
    let grad = gradient(f, a);
    let mut worst = Worst::new(format!("anchor_gradient[{f}]"));
    worst.observe(0.0, ANCHOR_GRADIENT_TOL, CounterInput::default);
    for k in f.support() {
        let (gk, dk) = (g.coord(k), grad.coord(k));
        worst.observe((gk - dk).abs() / rel_scale(&[dk]), ANCHOR_GRADIENT_TOL, || CounterInput {
            function: f.to_string(),
            anchor: Some(a.clone()),
            note: Some(format!("k={k} g_k(a)={gk} grad_k={dk}")),
            ..Default::default()
        });
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// `2 g_{kj}(a) = ∇²f(a)(u_k, u_j)` for every pair in the support.
pub fn check_anchor_hessian(f: &SmoothExpr, a: &HVector, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let fact = decompose(f, a, &StarDomain::WholeSpace, cfg.quad())?;
    let mut worst = Worst::new(format!("anchor_hessian[{f}]"));
    worst.observe(0.0, ANCHOR_HESSIAN_TOL, CounterInput::default);
    for &k in fact.support() {
        let nested = fact.refactor(k)?;
        for &j in fact.support() {
            let twice = 2.0 * nested.eval_gk(j, a)?;
            let hess = nth_directional(f, a, &[HVector::unit(k), HVector::unit(j)])
                .expect("two directions");
            worst.observe((twice - hess).abs() / rel_scale(&[hess]), ANCHOR_HESSIAN_TOL, || {
                CounterInput {
                    function: f.to_string(),
                    anchor: Some(a.clone()),
                    note: Some(format!("k={k} j={j} 2g_kj(a)={twice} hess={hess}")),
                    ..Default::default()
                }
            });
            worst.sample_done();
        }
    }
    Ok(worst.finish())
}

fn central_difference(f: &SmoothExpr, x: &HVector, v: &HVector, step: f64) -> f64 {
    let plus = f.eval(&x.add(&v.scale(step)));
    let minus = f.eval(&x.sub(&v.scale(step)));
    (plus - minus) / (2.0 * step)
}

/// Symbolic directional derivatives against central differences.
pub fn check_gateaux_frechet(f: &SmoothExpr, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let name = format!("gateaux_frechet[{f}]");
    let mut rng = stream(cfg, &name);
    let dim = sample_dim(cfg, f);
    let origin = HVector::zeros(dim);
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let v = unit_direction(&mut rng, dim);
        let dd = directional_derivative(f, &x, &v);
        let fd = central_difference(f, &x, &v, cfg.fd_step);
        worst.observe((dd - fd).abs() / rel_scale(&[dd]), FD_REL_TOL, || CounterInput {
            function: f.to_string(),
            point: Some(x.clone()),
            direction: Some(v.clone()),
            note: Some(format!("symbolic={dd} central_difference={fd}")),
            ..Default::default()
        });
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// `Ψ(f)(x + εy)`: standard part equals `f(x)` exactly; the ε part matches
/// `<∇f(x), y>` and a central difference along `y`.
pub fn check_psi_consistency(f: &SmoothExpr, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let name = format!("psi_consistency[{f}]");
    let mut rng = stream(cfg, &name);
    let dim = sample_dim(cfg, f);
    let origin = HVector::zeros(dim);
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let y = unit_direction(&mut rng, dim);
        let out = psi_eval(f, &DualVector::new(x.clone(), y.clone()));
        let input = || CounterInput {
            function: f.to_string(),
            point: Some(x.clone()),
            direction: Some(y.clone()),
            ..Default::default()
        };
        let fx = f.eval(&x);
        let standard = if out.re == fx { 0.0 } else { f64::INFINITY };
        worst.observe(standard, ALGEBRA_REL_TOL, input);
        let dd = directional_derivative(f, &x, &y);
        worst.observe((out.eps - dd).abs() / rel_scale(&[dd, out.eps]), ALGEBRA_REL_TOL, input);
        let fd = central_difference(f, &x, &y, cfg.fd_step);
        worst.observe((out.eps - fd).abs() / rel_scale(&[out.eps]), FD_REL_TOL, input);
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// Constant, scalar-multiple, sum and product rules on ε parts.
pub fn check_rules(f: &SmoothExpr, g: &SmoothExpr, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let name = format!("rules[{f} ; {g}]");
    let mut rng = stream(cfg, &name);
    let dim = sample_dim(cfg, f).max(g.max_coord());
    let origin = HVector::zeros(dim);
    let sum = f.clone() + g.clone();
    let product = f.clone() * g.clone();
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let y = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let c: f64 = rng.random_range(-3.0..3.0);
        let w = DualVector::new(x.clone(), y.clone());
        let pf = psi_eval(f, &w);
        let pg = psi_eval(g, &w);
        let input = |rule: &str| CounterInput {
            function: f.to_string(),
            other: Some(g.to_string()),
            point: Some(x.clone()),
            direction: Some(y.clone()),
            note: Some(format!("{rule} rule, c={c}")),
            ..Default::default()
        };

        let constant = psi_eval(&SmoothExpr::Const(c), &w).eps;
        worst.observe(constant.abs(), ALGEBRA_REL_TOL, || input("constant"));

        let scaled = psi_eval(&SmoothExpr::scale(c, f.clone()), &w).eps;
        let want = c * pf.eps;
        worst.observe((scaled - want).abs() / rel_scale(&[scaled, want]), ALGEBRA_REL_TOL, || {
            input("scalar")
        });

        let s = psi_eval(&sum, &w).eps;
        worst.observe(
            (s - (pf.eps + pg.eps)).abs() / rel_scale(&[s, pf.eps, pg.eps]),
            ALGEBRA_REL_TOL,
            || input("sum"),
        );

        let p = psi_eval(&product, &w).eps;
        let (left, right) = (pf.eps * pg.re, pf.re * pg.eps);
        worst.observe(
            (p - (left + right)).abs() / rel_scale(&[p, left, right]),
            ALGEBRA_REL_TOL,
            || input("product"),
        );
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// `Ψ(f·g) = Ψ(f)·Ψ(g)` at sampled arguments, and `Ψ(1) = 1` exactly.
pub fn check_psi_homomorphism(
    f: &SmoothExpr,
    g: &SmoothExpr,
    cfg: &CheckConfig,
) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let name = format!("psi_homomorphism[{f} ; {g}]");
    let mut rng = stream(cfg, &name);
    let dim = sample_dim(cfg, f).max(g.max_coord());
    let origin = HVector::zeros(dim);
    let product = f.clone() * g.clone();
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let y = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let w = DualVector::new(x.clone(), y.clone());
        let input = || CounterInput {
            function: f.to_string(),
            other: Some(g.to_string()),
            point: Some(x.clone()),
            direction: Some(y.clone()),
            ..Default::default()
        };
        let one = psi_eval(&SmoothExpr::one(), &w);
        worst.observe(if one == DualScalar::ONE { 0.0 } else { f64::INFINITY }, ALGEBRA_REL_TOL, input);
        let lhs = psi_eval(&product, &w);
        let rhs = dual_mul(psi_eval(f, &w), psi_eval(g, &w));
        worst.observe((lhs.re - rhs.re).abs() / rel_scale(&[lhs.re, rhs.re]), ALGEBRA_REL_TOL, input);
        worst.observe((lhs.eps - rhs.eps).abs() / rel_scale(&[lhs.eps, rhs.eps]), ALGEBRA_REL_TOL, input);
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// Least-squares decay exponent of `|R(a + 2^{-m} v)|` over the halvings,
/// ignoring values under the rounding floor. `None` when fewer than two
/// values remain.
pub fn fit_decay_exponent(remainders: &[(i32, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = remainders
        .iter()
        .filter(|(_, r)| r.abs() >= ROUNDING_FLOOR)
        .map(|&(m, r)| (f64::from(m), r.abs().log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(-sxy / sxx)
}

/// Remainders `R(2^{-m})` over a window of [`TAYLOR_HALVINGS`] consecutive
/// steps, the first one on which `R` keeps one sign and the local decay
/// rates `log2 |R_m / R_{m+1}|` agree to within [`SLOPE_SPREAD`].
///
/// Along a direction where the leading remainder coefficient is small,
/// higher-order terms dominate at moderate steps and the asymptotic rate
/// only shows at smaller ones, so the window slides toward zero until it
/// settles. It never extends past the rounding floor; if the floor comes
/// first the last sign-stable window is returned.
pub fn halving_window(remainder: impl Fn(f64) -> f64) -> Vec<(i32, f64)> {
    let mut window: Vec<(i32, f64)> = Vec::new();
    for m in 1..=TAYLOR_MAX_HALVINGS {
        let r = remainder(0.5f64.powi(m));
        if r.abs() < ROUNDING_FLOOR || !r.is_finite() {
            break;
        }
        if let Some(&(_, prev)) = window.last() {
            if prev.is_sign_negative() != r.is_sign_negative() {
                // |R| near a zero crossing says nothing about the order
                window.clear();
                continue;
            }
        }
        window.push((m, r));
        if window.len() > TAYLOR_HALVINGS as usize {
            window.remove(0);
        }
        if window.len() == TAYLOR_HALVINGS as usize && settled(&window) {
            break;
        }
    }
    window
}

fn settled(window: &[(i32, f64)]) -> bool {
    let rates: Vec<f64> = window
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).abs().log2())
        .collect();
    let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo <= SLOPE_SPREAD
}

/// Fitted remainder decay exponent of the order-`n` expansion is at least
/// `n + 1 - 0.1` along sampled directions.
pub fn check_taylor_order(
    f: &SmoothExpr,
    a: &HVector,
    n: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let expansion = taylor(f, a, n);
    let name = format!("taylor_order[{f} ; n={n}]");
    let mut rng = stream(cfg, &name);
    let support: Vec<usize> = f.support().into_iter().collect();
    let target = (n + 1) as f64;
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        // directions outside the support leave R unchanged and only
        // shorten the effective step
        let v = support_direction(&mut rng, &support).scale(TAYLOR_BASE_STEP);
        let remainders = halving_window(|t| expansion.remainder(&a.add(&v.scale(t))));
        let fitted = fit_decay_exponent(&remainders);
        let deficit = fitted.map_or(0.0, |p| (target - p).max(0.0));
        worst.observe(deficit, EXPONENT_SLACK, || CounterInput {
            function: f.to_string(),
            anchor: Some(a.clone()),
            direction: Some(v.clone()),
            note: Some(match fitted {
                Some(p) => format!("order {n}, fitted exponent {p}"),
                None => format!("order {n}, remainder below rounding floor"),
            }),
            ..Default::default()
        });
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// `Σ_α (x-a)^α g_α(x)` against the direct Taylor remainder.
pub fn check_remainder_factors(
    f: &SmoothExpr,
    a: &HVector,
    n: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let expansion = taylor(f, a, n);
    let factors = remainder_factors(f, a, n, cfg.quad())?;
    let name = format!("remainder_factors[{f} ; n={n}]");
    let mut rng = stream(cfg, &name);
    let dim = f.max_coord().max(a.dim());
    let mut worst = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, a, SAMPLE_RADIUS, dim);
        let direct = expansion.remainder(&x);
        let factored = factors.reconstruct(&x);
        worst.observe(
            (direct - factored).abs(),
            FACTOR_TOL * (1.0 + f.eval(&x).abs()),
            || CounterInput {
                function: f.to_string(),
                anchor: Some(a.clone()),
                point: Some(x.clone()),
                note: Some(format!("order {n}")),
                ..Default::default()
            },
        );
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// Three stages: `∇^j f` vanishes on sampled points of each
/// `span{u_{n_1}, ..., u_{n_j}}` (`j ≤ k`); every derivative tensor of order
/// `≤ k` vanishes at the origin; and `f = Σ_{|α|=k+1} x^α g_α` holds.
pub fn check_subspace_vanishing(
    f: &SmoothExpr,
    k: usize,
    cfg: &CheckConfig,
) -> Result<Vec<CheckReport>, VerifyError> {
    cfg.validate()?;
    if k == 0 {
        return Err(VerifyError::Config("subspace order k must be at least 1"));
    }
    let support = f.support();
    let indices: Vec<usize> = support.iter().copied().collect();
    let dim = f.max_coord().max(1);
    let input = |point: &HVector, note: String| CounterInput {
        function: f.to_string(),
        point: Some(point.clone()),
        note: Some(note),
        ..Default::default()
    };

    let name = format!("subspace_probe[{f} ; k={k}]");
    let mut rng = stream(cfg, &name);
    let mut probe = Worst::new(name);
    probe.observe(0.0, VANISH_TOL, CounterInput::default);
    for j in 1..=k {
        let tensors: Vec<_> = multi_indices(&support, j)
            .into_iter()
            .map(|alpha| {
                let d = f.mixed_partial(&alpha.indices());
                (alpha, d)
            })
            .collect();
        for subset in subsets(&indices, j.min(indices.len())) {
            for _ in 0..cfg.samples {
                let mut coeffs = vec![0.0; dim];
                for &i in &subset {
                    coeffs[i - 1] = rng.random_range(-SAMPLE_RADIUS..SAMPLE_RADIUS);
                }
                let p = HVector::new(coeffs).expect("finite");
                for (alpha, d) in &tensors {
                    let value = d.eval(&p);
                    probe.observe(value.abs(), VANISH_TOL, || {
                        input(&p, format!("order {j} derivative {alpha} on span{subset:?} = {value}"))
                    });
                }
                probe.sample_done();
            }
        }
    }

    let origin = HVector::zeros(dim);
    let mut at_origin = Worst::new(format!("subspace_origin[{f} ; k={k}]"));
    let f0 = f.eval(&origin);
    at_origin.observe(f0.abs(), VANISH_TOL, || input(&origin, format!("f(0) = {f0}")));
    at_origin.sample_done();
    for j in 1..=k {
        for alpha in multi_indices(&support, j) {
            let value = f.mixed_partial(&alpha.indices()).eval(&origin);
            at_origin.observe(value.abs(), VANISH_TOL, || {
                input(&origin, format!("derivative {alpha} at 0 = {value}"))
            });
            at_origin.sample_done();
        }
    }

    let name = format!("subspace_reconstruction[{f} ; k={k}]");
    let mut rng = stream(cfg, &name);
    let factors = remainder_factors(f, &origin, k, cfg.quad())?;
    let mut rebuild = Worst::new(name);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let fx = f.eval(&x);
        let r = factors.reconstruct(&x);
        rebuild.observe((r - fx).abs(), FACTOR_TOL * (1.0 + fx.abs()), || {
            input(&x, format!("sum over |alpha|={} = {r}", k + 1))
        });
        rebuild.sample_done();
    }
    Ok(vec![probe.finish(), at_origin.finish(), rebuild.finish()])
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], start: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size > 0 {
        rec(items, 0, size, &mut Vec::new(), &mut out);
    }
    out
}

/// `f = Σ x_k x_j g_{kj}` for a function vanishing on every axis.
pub fn check_axes_factorization(f: &SmoothExpr, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let name = format!("axes_factorization[{f}]");
    let mut worst = Worst::new(name.clone());
    let axes = match axes_vanishing_factor(f, cfg.quad()) {
        Ok(axes) => axes,
        Err(HadamardError::AxesPrecondition { axis, delta, value }) => {
            let point = HVector::unit(axis).scale(delta);
            worst.observe(value.abs(), crate::hadamard::ZERO_TOL, || CounterInput {
                function: f.to_string(),
                point: Some(point),
                note: Some(format!("f does not vanish on span{{u_{axis}}}")),
                ..Default::default()
            });
            worst.sample_done();
            return Ok(worst.finish());
        }
        Err(e) => return Err(e.into()),
    };
    let mut rng = stream(cfg, &name);
    let dim = f.max_coord().max(1);
    let origin = HVector::zeros(dim);
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, &origin, SAMPLE_RADIUS, dim);
        let fx = f.eval(&x);
        worst.observe((axes.reconstruct(&x) - fx).abs(), FACTOR_TOL * (1.0 + fx.abs()), || {
            CounterInput {
                function: f.to_string(),
                point: Some(x.clone()),
                ..Default::default()
            }
        });
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// `f = Σ g_k h_k` with `g_k(y) = 0 = h_k(z)`.
pub fn check_two_point(
    f: &SmoothExpr,
    y: &HVector,
    z: &HVector,
    cfg: &CheckConfig,
) -> Result<CheckReport, VerifyError> {
    cfg.validate()?;
    let tp = two_point_factor(f, y, z, cfg.quad())?;
    let name = format!("two_point[{f}]");
    let mut rng = stream(cfg, &name);
    let dim = tp.reduction().dim.max(f.max_coord());
    let mut worst = Worst::new(name);
    let input = |point: Option<HVector>, note: String| CounterInput {
        function: f.to_string(),
        anchor: Some(z.clone()),
        point,
        direction: Some(y.clone()),
        note: Some(note),
        ..Default::default()
    };
    let (gy, hz) = tp.endpoint_residuals(y, z);
    worst.observe(gy, ENDPOINT_TOL, || input(Some(y.clone()), format!("max |g_k(y)| = {gy}")));
    worst.observe(hz, ENDPOINT_TOL, || input(Some(z.clone()), format!("max |h_k(z)| = {hz}")));
    for _ in 0..cfg.samples {
        let x = uniform_in_ball(&mut rng, z, SAMPLE_RADIUS, dim);
        let fx = f.eval(&x);
        worst.observe(
            (tp.reconstruct(&x) - fx).abs(),
            FACTOR_TOL * (1.0 + fx.abs()),
            || input(Some(x.clone()), "sum g_k h_k".into()),
        );
        worst.sample_done();
    }
    Ok(worst.finish())
}

/// Built-in family: constants, coordinates, linear functionals, quadratic
/// sums, mixed monomials, sin/cos/exp compositions and products, in at
/// most eight coordinates.
pub const STANDARD_FAMILY: &[&str] = &[
    "3.5",
    "x3",
    "2*x1 - x2 + 0.5*x4 + 3*x8",
    "x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2",
    "x1*x2*x3 - 2*x4^2*x5 + x6",
    "x1^6 - 3*x2^3*x3^2 + x7*x8",
    "sin(x1)",
    "cos(0.5*x2*x3)",
    "exp(0.5*x1 - 0.25*x5)",
    "sin(x1)*exp(x2/4)",
    "x1*cos(x2) + x3^2*sin(x4)",
    "exp(sin(x1))*(1 + x2^2)",
    "(x1 + x2)^3*cos(x3)",
    "x1*x2*(1 + x3^2)",
];

pub fn standard_family() -> Vec<SmoothExpr> {
    STANDARD_FAMILY
        .iter()
        .map(|s| parse(s).expect("family members parse"))
        .collect()
}

/// Functions whose remainder decay exponent is fitted at two anchors.
pub const TAYLOR_ORDER_CASES: &[&str] = &[
    "sin(x1)",
    "exp(x1)",
    "cos(x2)",
    "exp(0.5*x1 - 0.25*x3)",
    "sin(x1 - 2*x2)",
    "(x1 - x2)^5 + (x1 - x2)^2",
];

fn expr(s: &str) -> SmoothExpr {
    parse(s).expect("built-in expressions parse")
}

fn hv(c: &[f64]) -> HVector {
    HVector::new(c.to_vec()).expect("finite")
}

/// Every check over the built-in family, in a fixed order.
pub fn run_suite(cfg: &CheckConfig) -> Result<Vec<CheckReport>, VerifyError> {
    cfg.validate()?;
    let family = standard_family();
    let mut reports = Vec::new();
    let mut anchor_rng = stream(cfg, "suite-anchors");
    let anchors: Vec<HVector> = family
        .iter()
        .map(|f| uniform_in_ball(&mut anchor_rng, &HVector::zeros(1), 1.0, sample_dim(cfg, f)))
        .collect();

    for (f, a) in family.iter().zip(&anchors) {
        reports.push(check_hadamard_identity(f, a, &StarDomain::WholeSpace, cfg)?);
        if f.polynomial_degree().is_some() {
            let exact = CheckConfig {
                abs_tol: 1e-13,
                rel_tol: 1e-13,
                ..cfg.clone()
            };
            let mut r = check_hadamard_identity(f, a, &StarDomain::WholeSpace, &exact)?;
            r.name = format!("hadamard_identity_exact[{f}]");
            reports.push(r);
        }
        reports.push(check_anchor_gradient(f, a, cfg)?);
        reports.push(check_anchor_hessian(f, a, cfg)?);
        reports.push(check_gateaux_frechet(f, cfg)?);
        reports.push(check_psi_consistency(f, cfg)?);
    }

    let ball_center = hv(&[0.5, -0.5]);
    let ball = StarDomain::ball(ball_center.clone(), 2.0).expect("positive radius");
    reports.push(check_hadamard_identity(
        &expr("sin(x1)*exp(x2/4)"),
        &hv(&[1.0, 0.0]),
        &ball,
        cfg,
    )?);

    for i in 0..family.len() {
        let (f, g) = (&family[i], &family[(i + 1) % family.len()]);
        reports.push(check_rules(f, g, cfg)?);
        reports.push(check_psi_homomorphism(f, g, cfg)?);
    }

    // Fitted exponents need directions along which the order-(n+1) term of
    // the remainder is not nearly degenerate; ridge functions and
    // homogeneous polynomials have no such directions.
    for src in TAYLOR_ORDER_CASES {
        let f = expr(src);
        for a in [HVector::zeros(1), hv(&[0.3, -0.2, 0.1])] {
            for n in 1..=3 {
                reports.push(check_taylor_order(&f, &a, n, cfg)?);
            }
        }
    }
    for (src, n) in [("x1^3", 2), ("x1*x2", 2), ("2*x1 - x2", 1)] {
        reports.push(check_taylor_order(&expr(src), &HVector::zeros(1), n, cfg)?);
    }
    for src in ["x1^2*x2 - x3^3", "x1^4 - 2*x1*x2^3 + x3^2*x4^2"] {
        for n in 1..=3 {
            reports.push(check_taylor_order(&expr(src), &HVector::zeros(1), n, cfg)?);
        }
    }

    for (f, a) in family.iter().zip(&anchors) {
        if f.support().len() <= 4 {
            for n in 0..=2 {
                reports.push(check_remainder_factors(f, a, n, cfg)?);
            }
        }
    }

    for (src, k) in [("x1^2*x2^2", 1), ("x1*x2*x3", 1), ("0", 2)] {
        reports.extend(check_subspace_vanishing(&expr(src), k, cfg)?);
    }

    reports.push(check_axes_factorization(&expr("x1*x2*(1 + x3^2)"), cfg)?);

    for (src, y, z) in two_point_cases() {
        reports.push(check_two_point(&expr(src), &y, &z, cfg)?);
    }
    Ok(reports)
}

/// Functions with two prescribed zeros `(f, y, z)`.
pub fn two_point_cases() -> Vec<(&'static str, HVector, HVector)> {
    vec![
        ("x1*(x1 - 1)", HVector::unit(1), HVector::zeros(1)),
        (
            "(x1 - 0.5)*(x2 - 0.7) + (x3 - 1)*(x3 - 0.2)",
            hv(&[-0.3, 0.7, 0.2]),
            hv(&[0.5, -0.25, 1.0]),
        ),
        ("sin(x1 - x2)*cos(x3)", hv(&[1.0, 1.0, 0.0]), hv(&[-2.0, -2.0, 5.0])),
        (
            "exp(x2)*(x1 - 2) - (x1 - 2)*(1 + x3)",
            hv(&[2.0, 1.5, -0.5]),
            hv(&[-1.0, 0.0, 0.0]),
        ),
    ]
}
