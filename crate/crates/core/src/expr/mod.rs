//! Smooth functionals `f: H -> R` that depend on finitely many coordinates.
//!
//! [`SmoothExpr`] is an expression tree whose node set is closed under
//! partial differentiation, so every mixed partial of a tree is again a
//! tree of the same kinds. Constructors apply light simplification only
//! (constant folding, dropping zero and unit terms).

mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{inner, HVector};

pub use parser::{parse, ParseError, ParseErrorKind};

/// Primitive smooth functions of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prim {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown primitive `{0}` (expected sin, cos or exp)")]
pub struct UnknownPrim(pub String);

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::Sin => "sin",
            Prim::Cos => "cos",
            Prim::Exp => "exp",
        }
    }
}

impl FromStr for Prim {
    type Err = UnknownPrim;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sin" => Ok(Prim::Sin),
            "cos" => Ok(Prim::Cos),
            "exp" => Ok(Prim::Exp),
            other => Err(UnknownPrim(other.to_string())),
        }
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Number type an expression can be evaluated over.
///
/// Implemented for `f64` and for [`crate::dual::DualScalar`], which is how
/// the same tree yields both plain values and first-order jets.
pub trait Scalar: Copy {
    fn constant(c: f64) -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn powi(self, p: u32) -> Self;
    fn prim(self, prim: Prim) -> Self;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn scale(self, c: f64) -> Self {
        c * self
    }
    fn powi(self, p: u32) -> Self {
        pow_f64(self, p)
    }
    fn prim(self, prim: Prim) -> Self {
        match prim {
            Prim::Sin => self.sin(),
            Prim::Cos => self.cos(),
            Prim::Exp => self.exp(),
        }
    }
}

/// Repeated multiplication, so results do not depend on the platform `powi`.
pub(crate) fn pow_f64(base: f64, p: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..p {
        acc *= base;
    }
    acc
}

/// Expression tree for a smooth functional. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothExpr {
    Const(f64),
    /// `x_k = <x, u_k>`
    Coord(usize),
    Add(Vec<SmoothExpr>),
    Mul(Vec<SmoothExpr>),
    Scale(f64, Box<SmoothExpr>),
    IntPow(Box<SmoothExpr>, u32),
    Prim(Prim, Box<SmoothExpr>),
}

/// Sorted set of coordinate indices a tree reads.
pub type Support = BTreeSet<usize>;

impl SmoothExpr {
    pub fn constant(c: f64) -> Self {
        SmoothExpr::Const(c)
    }

    pub fn coord(k: usize) -> Self {
        assert!(k >= 1, "coordinates are 1-based");
        SmoothExpr::Coord(k)
    }

    pub fn zero() -> Self {
        SmoothExpr::Const(0.0)
    }

    pub fn one() -> Self {
        SmoothExpr::Const(1.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SmoothExpr::Const(c) if *c == 0.0)
    }

    /// Sum with flattening, constant folding and zero dropping.
    pub fn add(terms: Vec<SmoothExpr>) -> Self {
        let mut out = Vec::with_capacity(terms.len());
        let mut constant = 0.0;
        let mut saw_constant = false;
        let mut pending: Vec<SmoothExpr> = terms.into_iter().rev().collect();
        while let Some(term) = pending.pop() {
            match term {
                SmoothExpr::Const(c) => {
                    constant += c;
                    saw_constant = true;
                }
                SmoothExpr::Add(inner) => pending.extend(inner.into_iter().rev()),
                other => out.push(other),
            }
        }
        if saw_constant && constant != 0.0 {
            out.push(SmoothExpr::Const(constant));
        }
        match out.len() {
            0 => SmoothExpr::Const(if saw_constant { constant } else { 0.0 }),
            1 => out.pop().unwrap(),
            _ => SmoothExpr::Add(out),
        }
    }

    /// Product with flattening; constant factors are pulled into a `Scale`.
    pub fn mul(factors: Vec<SmoothExpr>) -> Self {
        let mut out = Vec::with_capacity(factors.len());
        let mut coefficient = 1.0;
        for factor in factors {
            match factor {
                SmoothExpr::Const(c) => coefficient *= c,
                SmoothExpr::Scale(c, inner) => {
                    coefficient *= c;
                    match *inner {
                        SmoothExpr::Mul(fs) => out.extend(fs),
                        other => out.push(other),
                    }
                }
                SmoothExpr::Mul(fs) => out.extend(fs),
                other => out.push(other),
            }
        }
        if coefficient == 0.0 {
            return SmoothExpr::zero();
        }
        let body = match out.len() {
            0 => return SmoothExpr::Const(coefficient),
            1 => out.pop().unwrap(),
            _ => SmoothExpr::Mul(out),
        };
        SmoothExpr::scale(coefficient, body)
    }

    pub fn scale(c: f64, e: SmoothExpr) -> Self {
        if c == 0.0 {
            return SmoothExpr::zero();
        }
        if c == 1.0 {
            return e;
        }
        match e {
            SmoothExpr::Const(v) => SmoothExpr::Const(c * v),
            SmoothExpr::Scale(c2, inner) => SmoothExpr::scale(c * c2, *inner),
            other => SmoothExpr::Scale(c, Box::new(other)),
        }
    }

    pub fn pow(e: SmoothExpr, p: u32) -> Self {
        match (e, p) {
            (_, 0) => SmoothExpr::one(),
            (e, 1) => e,
            (SmoothExpr::Const(c), p) => SmoothExpr::Const(pow_f64(c, p)),
            (e, p) => SmoothExpr::IntPow(Box::new(e), p),
        }
    }

    pub fn prim(prim: Prim, e: SmoothExpr) -> Self {
        match e {
            SmoothExpr::Const(c) => SmoothExpr::Const(c.prim(prim)),
            other => SmoothExpr::Prim(prim, Box::new(other)),
        }
    }

    /// The linear functional `<v, x>`.
    pub fn linear(v: &HVector) -> Self {
        SmoothExpr::add(
            v.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, &c)| SmoothExpr::scale(c, SmoothExpr::Coord(i + 1)))
                .collect(),
        )
    }

    /// Coordinate indices that appear in the tree.
    pub fn support(&self) -> Support {
        let mut set = Support::new();
        self.collect_support(&mut set);
        set
    }

    fn collect_support(&self, set: &mut Support) {
        match self {
            SmoothExpr::Const(_) => {}
            SmoothExpr::Coord(k) => {
                set.insert(*k);
            }
            SmoothExpr::Add(cs) | SmoothExpr::Mul(cs) => {
                cs.iter().for_each(|c| c.collect_support(set))
            }
            SmoothExpr::Scale(_, c) | SmoothExpr::IntPow(c, _) | SmoothExpr::Prim(_, c) => {
                c.collect_support(set)
            }
        }
    }

    /// Largest coordinate index read by the tree, 0 for constants.
    pub fn max_coord(&self) -> usize {
        self.support().last().copied().unwrap_or(0)
    }

    fn depends_on(&self, k: usize) -> bool {
        match self {
            SmoothExpr::Const(_) => false,
            SmoothExpr::Coord(j) => *j == k,
            SmoothExpr::Add(cs) | SmoothExpr::Mul(cs) => cs.iter().any(|c| c.depends_on(k)),
            SmoothExpr::Scale(_, c) | SmoothExpr::IntPow(c, _) | SmoothExpr::Prim(_, c) => {
                c.depends_on(k)
            }
        }
    }

    /// Evaluates the tree over any [`Scalar`], reading coordinates through `coord`.
    pub fn eval_with<T: Scalar>(&self, coord: &impl Fn(usize) -> T) -> T {
        match self {
            SmoothExpr::Const(c) => T::constant(*c),
            SmoothExpr::Coord(k) => coord(*k),
            SmoothExpr::Add(cs) => {
                let mut it = cs.iter();
                let first = it.next().map_or(T::constant(0.0), |c| c.eval_with(coord));
                it.fold(first, |acc, c| acc.add(c.eval_with(coord)))
            }
            SmoothExpr::Mul(cs) => {
                let mut it = cs.iter();
                let first = it.next().map_or(T::constant(1.0), |c| c.eval_with(coord));
                it.fold(first, |acc, c| acc.mul(c.eval_with(coord)))
            }
            SmoothExpr::Scale(c, e) => e.eval_with(coord).scale(*c),
            SmoothExpr::IntPow(e, p) => e.eval_with(coord).powi(*p),
            SmoothExpr::Prim(p, e) => e.eval_with(coord).prim(*p),
        }
    }

    /// Value at `x`; coordinates beyond `x.dim()` read as zero.
    pub fn eval(&self, x: &HVector) -> f64 {
        self.eval_with(&|k| x.coord(k))
    }

    /// Symbolic `∂f/∂x_k`.
    pub fn partial(&self, k: usize) -> SmoothExpr {
        if !self.depends_on(k) {
            return SmoothExpr::zero();
        }
        match self {
            SmoothExpr::Const(_) => SmoothExpr::zero(),
            SmoothExpr::Coord(j) => SmoothExpr::Const(if *j == k { 1.0 } else { 0.0 }),
            SmoothExpr::Add(cs) => SmoothExpr::add(cs.iter().map(|c| c.partial(k)).collect()),
            SmoothExpr::Mul(cs) => {
                let terms = (0..cs.len())
                    .filter(|&i| cs[i].depends_on(k))
                    .map(|i| {
                        let factors = cs
                            .iter()
                            .enumerate()
                            .map(|(j, c)| if i == j { c.partial(k) } else { c.clone() })
                            .collect();
                        SmoothExpr::mul(factors)
                    })
                    .collect();
                SmoothExpr::add(terms)
            }
            SmoothExpr::Scale(c, e) => SmoothExpr::scale(*c, e.partial(k)),
            SmoothExpr::IntPow(e, p) => SmoothExpr::scale(
                f64::from(*p),
                SmoothExpr::mul(vec![SmoothExpr::pow((**e).clone(), p - 1), e.partial(k)]),
            ),
            SmoothExpr::Prim(prim, e) => {
                let inner = (**e).clone();
                let outer = match prim {
                    Prim::Sin => SmoothExpr::prim(Prim::Cos, inner),
                    Prim::Cos => SmoothExpr::scale(-1.0, SmoothExpr::prim(Prim::Sin, inner)),
                    Prim::Exp => SmoothExpr::prim(Prim::Exp, inner),
                };
                SmoothExpr::mul(vec![outer, e.partial(k)])
            }
        }
    }

    /// `∂_{k_m} ... ∂_{k_1} f` for `indices = [k_1, ..., k_m]`.
    pub fn mixed_partial(&self, indices: &[usize]) -> SmoothExpr {
        indices
            .iter()
            .fold(self.clone(), |acc, &k| acc.partial(k))
    }

    /// Replaces every coordinate `x_k` by `map(k)`.
    pub fn substitute(&self, map: &impl Fn(usize) -> SmoothExpr) -> SmoothExpr {
        match self {
            SmoothExpr::Const(c) => SmoothExpr::Const(*c),
            SmoothExpr::Coord(k) => map(*k),
            SmoothExpr::Add(cs) => SmoothExpr::add(cs.iter().map(|c| c.substitute(map)).collect()),
            SmoothExpr::Mul(cs) => SmoothExpr::mul(cs.iter().map(|c| c.substitute(map)).collect()),
            SmoothExpr::Scale(c, e) => SmoothExpr::scale(*c, e.substitute(map)),
            SmoothExpr::IntPow(e, p) => SmoothExpr::pow(e.substitute(map), *p),
            SmoothExpr::Prim(p, e) => SmoothExpr::prim(*p, e.substitute(map)),
        }
    }

    /// Total polynomial degree, or `None` when a primitive occurs.
    pub fn polynomial_degree(&self) -> Option<u32> {
        match self {
            SmoothExpr::Const(_) => Some(0),
            SmoothExpr::Coord(_) => Some(1),
            SmoothExpr::Add(cs) => cs
                .iter()
                .try_fold(0, |acc, c| c.polynomial_degree().map(|d| acc.max(d))),
            SmoothExpr::Mul(cs) => cs
                .iter()
                .try_fold(0, |acc, c| c.polynomial_degree().map(|d| acc + d)),
            SmoothExpr::Scale(_, e) => e.polynomial_degree(),
            SmoothExpr::IntPow(e, p) => e.polynomial_degree().map(|d| d * p),
            SmoothExpr::Prim(_, e) => match e.polynomial_degree() {
                Some(0) => Some(0),
                _ => None,
            },
        }
    }
}

impl std::ops::Add for SmoothExpr {
    type Output = SmoothExpr;
    fn add(self, rhs: SmoothExpr) -> SmoothExpr {
        SmoothExpr::add(vec![self, rhs])
    }
}

impl std::ops::Sub for SmoothExpr {
    type Output = SmoothExpr;
    fn sub(self, rhs: SmoothExpr) -> SmoothExpr {
        SmoothExpr::add(vec![self, SmoothExpr::scale(-1.0, rhs)])
    }
}

impl std::ops::Mul for SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, rhs: SmoothExpr) -> SmoothExpr {
        SmoothExpr::mul(vec![self, rhs])
    }
}

impl FromStr for SmoothExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("at least one direction is required")]
    NoDirections,
}

/// `∇f(x)` with `coeffs[k-1] = ∂_k f(x)` up to the largest support index.
pub fn gradient(f: &SmoothExpr, x: &HVector) -> HVector {
    let dim = f.max_coord();
    let mut g = vec![0.0; dim.max(1)];
    for k in f.support() {
        g[k - 1] = f.partial(k).eval(x);
    }
    HVector::new(g).expect("finite gradient")
}

/// Gateaux derivative `<∇f(x), v>`.
pub fn directional_derivative(f: &SmoothExpr, x: &HVector, v: &HVector) -> f64 {
    inner(&gradient(f, x), v)
}

/// `∇ⁿf(x)(h_1, ..., h_n)` by contracting symbolic mixed partials with the
/// basis expansions of the directions.
pub fn nth_directional(f: &SmoothExpr, x: &HVector, dirs: &[HVector]) -> Result<f64, ExprError> {
    if dirs.is_empty() {
        return Err(ExprError::NoDirections);
    }
    Ok(contract(f, x, dirs))
}

fn contract(f: &SmoothExpr, x: &HVector, dirs: &[HVector]) -> f64 {
    let Some((dir, rest)) = dirs.split_first() else {
        return f.eval(x);
    };
    f.support()
        .into_iter()
        .filter(|&k| dir.coord(k) != 0.0)
        .map(|k| dir.coord(k) * contract(&f.partial(k), x, rest))
        .sum()
}
