//! Hadamard factorization of smooth functionals on a truncated separable
//! Hilbert space.
//!
//! A smooth `f` on a star-convex neighbourhood of `a` splits as
//! `f(x) = f(a) + <g(x), x - a>` with `g_k(x) = ∫₀¹ ∂_k f(a + t(x - a)) dt`.
//! This crate makes that construction concrete for functions of finitely
//! many coordinates:
//!
//! - [`space`]: vectors in a finite basis prefix of `l2`, star-convex domains
//! - [`expr`]: differentiation-closed expression trees and the text DSL
//! - [`dual`]: dual numbers `a + εb` with `ε² = 0` and evaluation at `x + εy`
//! - [`hadamard`]: quadrature-backed factors, nested factors, Taylor
//!   expansions with factored remainders, and the axis-vanishing and
//!   two-point product representations
//! - [`verify`]: seeded property checks with JSON-lines reports
//!
//! ```
//! use hilbert_hadamard::prelude::*;
//!
//! let f: SmoothExpr = "x1^2".parse().unwrap();
//! let a = HVector::zeros(1);
//! let fact = decompose(&f, &a, &StarDomain::WholeSpace, QuadratureSpec::default()).unwrap();
//! let x = HVector::new(vec![3.0]).unwrap();
//! assert!((fact.eval_gk(1, &x).unwrap() - 3.0).abs() < 1e-13);
//! assert!((fact.reconstruct(&x).unwrap() - 9.0).abs() < 1e-13);
//! ```

pub mod cli;
pub mod dual;
pub mod expr;
pub mod hadamard;
pub mod quadrature;
pub mod reflect;
pub mod space;
pub mod verify;

pub mod prelude {
    pub use crate::dual::{dual_add, dual_mul, dual_prim, psi_eval, DualScalar, DualVector};
    pub use crate::expr::{
        directional_derivative, gradient, nth_directional, parse, Prim, SmoothExpr,
    };
    pub use crate::hadamard::{
        axes_vanishing_factor, decompose, remainder_factors, taylor, two_point_factor,
        HadamardFactorization, MultiIndex, TaylorExpansion,
    };
    pub use crate::quadrature::{Nesting, QuadratureSpec};
    pub use crate::space::{inner, norm, segment_point, HVector, StarDomain};
}
