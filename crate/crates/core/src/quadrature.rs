//! Fixed-node Gauss–Legendre rules on `[0, 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a quadrature rule needs at least one node")]
pub struct ZeroNodes;

/// How nested factor integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nesting {
    /// The `m`-fold nested integral with weights `t_0^m t_1^(m-1) ... t_m^0`
    /// depends on the nodes only through `τ = t_0 ⋯ t_m`; it is evaluated as
    /// one integral against the kernel `(1-τ)^m / m!`.
    #[default]
    Collapsed,
    /// Explicit tensor-product grid, one rule per nesting level.
    /// Cost grows as `nodes^(m+1)`.
    ProductGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes: usize,
    #[serde(default)]
    pub nesting: Nesting,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            nesting: Nesting::Collapsed,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Result<Self, ZeroNodes> {
        if nodes == 0 {
            return Err(ZeroNodes);
        }
        Ok(Self {
            nodes,
            nesting: Nesting::Collapsed,
        })
    }

    pub fn with_nesting(mut self, nesting: Nesting) -> Self {
        self.nesting = nesting;
        self
    }

    pub fn rule(&self) -> GaussLegendre {
        GaussLegendre::new(self.nodes)
    }
}

/// Nodes and weights of an `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
/// Exact for polynomials of degree `2n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        // roots are symmetric; solve for the upper half with Newton's method
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.5;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫₀¹ g(t) dt`.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(t, w)| w * g(t)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 3, 7, 16, 32, 33, 64] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() <= 1e-14, "n = {n}: {total}");
            assert!(rule.nodes().iter().all(|&t| t > 0.0 && t < 1.0));
        }
    }

    #[test]
    fn known_small_rules() {
        let one = GaussLegendre::new(1);
        assert_eq!(one.nodes(), &[0.5]);
        assert_eq!(one.weights(), &[1.0]);
        let two = GaussLegendre::new(2);
        let off = 0.5 / 3f64.sqrt();
        assert!((two.nodes()[0] - (0.5 - off)).abs() < 1e-15);
        assert!((two.nodes()[1] - (0.5 + off)).abs() < 1e-15);
        assert!((two.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_up_to_degree_2n_minus_1() {
        for n in [1usize, 3, 8, 32] {
            let rule = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got = rule.integrate(|t| t.powi(deg as i32));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() <= 1e-14, "n={n} deg={deg}: {got} vs {want}");
            }
        }
        // first degree that is not integrated exactly
        for n in [1usize, 2, 3] {
            let deg = 2 * n as i32;
            let got = GaussLegendre::new(n).integrate(|t| t.powi(deg));
            assert!((got - 1.0 / (f64::from(deg) + 1.0)).abs() > 1e-6);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert_eq!(QuadratureSpec::new(0), Err(ZeroNodes));
        assert_eq!(QuadratureSpec::default().nodes, 32);
    }
}
