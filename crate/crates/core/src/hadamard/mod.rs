//! Hadamard factorization of smooth functionals and its consequences.
//!
//! For `f` smooth on a star-convex `U ∋ a`,
//!
//! ```text
//! f(x) = f(a) + <g(x), x - a>,    g_k(x) = ∫₀¹ ∂_k f(a + t(x - a)) dt
//! ```
//!
//! Re-factorizing the `g_k` at the same anchor gives nested families
//! `g_{kj}`, `g_{kji}`, ... which carry Taylor remainders in factored form.
//! All integrals are fixed-node Gauss–Legendre sums.

mod factor;
mod representations;
mod taylor;

use thiserror::Error;

pub use factor::{decompose, decompose_with_limits, Factor, HadamardFactorization};
pub use representations::{
    axes_vanishing_factor, probe_axes, two_point_factor, AxesFactorization, TwoPointFactorization,
    AXIS_PROBE_RADIUS, ZERO_TOL,
};
pub use taylor::{
    multi_indices, remainder_factors, remainder_factors_with_limits, taylor, MultiIndex,
    RemainderFactors, TaylorExpansion,
};

use crate::space::DEFAULT_MAX_DIM;

/// Cost guards for factorizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest coordinate index a factorized function may read.
    pub max_dim: usize,
    /// Largest number of `(n+1)`-fold refactor chains `|support|^(n+1)`.
    pub max_chains: usize,
}

pub const DEFAULT_MAX_CHAINS: usize = 4096;

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            max_chains: DEFAULT_MAX_CHAINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HadamardError {
    #[error("anchor lies outside the domain")]
    AnchorOutsideDomain,
    #[error("point lies outside the domain")]
    PointOutsideDomain,
    #[error("index {index} is not in the support {support:?}")]
    IndexOutOfSupport { index: usize, support: Vec<usize> },
    #[error("function reads coordinate {dim}, above the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("{chains} refactor chains needed, above the cap of {cap}")]
    ResourceLimit { chains: u128, cap: usize },
    #[error("function does not vanish on span{{u_{axis}}}: f({delta}·u_{axis}) = {value}")]
    AxesPrecondition { axis: usize, delta: f64, value: f64 },
    #[error("the two prescribed zeros coincide")]
    CoincidentPoints,
    #[error("f({point}) = {value} is not zero")]
    NotAZero { point: &'static str, value: f64 },
}
