use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::factor::{decompose_with_limits, Factor};
use super::{HadamardError, Limits};
use crate::expr::{nth_directional, pow_f64, SmoothExpr, Support};
use crate::quadrature::QuadratureSpec;
use crate::space::{HVector, StarDomain};

/// Multi-index `α` stored as strictly increasing `(k, α_k)` pairs with `α_k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, u32)>", into = "Vec<(usize, u32)>")]
pub struct MultiIndex {
    entries: Vec<(usize, u32)>,
}

impl MultiIndex {
    /// Builds the multi-index counting repeated basis indices.
    pub fn from_indices(indices: &[usize]) -> Self {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        let mut entries: Vec<(usize, u32)> = Vec::new();
        for k in sorted {
            match entries.last_mut() {
                Some((last, count)) if *last == k => *count += 1,
                _ => entries.push((k, 1)),
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().map(|&(_, e)| e).sum()
    }

    /// Indices repeated by multiplicity, in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .flat_map(|&(k, e)| std::iter::repeat_n(k, e as usize))
            .collect()
    }

    /// `α! = Π α_k!`.
    pub fn factorial(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, e)| factorial(e as usize))
            .product()
    }

    /// `(x - a)^α`.
    pub fn monomial(&self, x: &HVector, a: &HVector) -> f64 {
        self.entries
            .iter()
            .map(|&(k, e)| pow_f64(x.coord(k) - a.coord(k), e))
            .product()
    }

    /// Number of ordered index tuples with this multiset, `|α|! / α!`.
    pub fn orderings(&self) -> f64 {
        factorial(self.degree() as usize) / self.factorial()
    }
}

impl TryFrom<Vec<(usize, u32)>> for MultiIndex {
    type Error = String;

    fn try_from(entries: Vec<(usize, u32)>) -> Result<Self, Self::Error> {
        let increasing = entries.windows(2).all(|w| w[0].0 < w[1].0);
        if !increasing || entries.iter().any(|&(k, e)| k == 0 || e == 0) {
            return Err("multi-index entries must have increasing indices >= 1 and exponents >= 1".into());
        }
        Ok(Self { entries })
    }
}

impl From<MultiIndex> for Vec<(usize, u32)> {
    fn from(m: MultiIndex) -> Self {
        m.entries
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (k, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{e}")?;
        }
        f.write_str(")")
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// All multi-indices of the given degree over `support`, in increasing order.
pub fn multi_indices(support: &Support, degree: usize) -> Vec<MultiIndex> {
    let idx: Vec<usize> = support.iter().copied().collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(degree);
    fn rec(idx: &[usize], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if left == 0 {
            out.push(MultiIndex::from_indices(cur));
            return;
        }
        for i in start..idx.len() {
            cur.push(idx[i]);
            rec(idx, i, left - 1, cur, out);
            cur.pop();
        }
    }
    if degree == 0 || !idx.is_empty() {
        rec(&idx, 0, degree, &mut current, &mut out);
    }
    out
}

/// Taylor polynomial of order `n` at `a` with an exact remainder evaluator.
///
/// `coeff[α] = ∂^α f(a) / α!`, so the degree-`m` term
/// `Σ_{|α|=m} coeff[α] (x-a)^α` is `(1/m!) ∇^m f(a)(x-a, ..., x-a)`.
#[derive(Debug, Clone)]
pub struct TaylorExpansion {
    f: SmoothExpr,
    anchor: HVector,
    order: usize,
    coeff: BTreeMap<MultiIndex, f64>,
}

pub fn taylor(f: &SmoothExpr, a: &HVector, n: usize) -> TaylorExpansion {
    let support = f.support();
    let mut coeff = BTreeMap::new();
    coeff.insert(MultiIndex::from_indices(&[]), f.eval(a));
    for m in 1..=n {
        for alpha in multi_indices(&support, m) {
            let dirs: Vec<HVector> = alpha.indices().into_iter().map(HVector::unit).collect();
            let d = nth_directional(f, a, &dirs).expect("non-empty directions");
            coeff.insert(alpha.clone(), d / alpha.factorial());
        }
    }
    TaylorExpansion {
        f: f.clone(),
        anchor: a.clone(),
        order: n,
        coeff,
    }
}

impl TaylorExpansion {
    pub fn anchor(&self) -> &HVector {
        &self.anchor
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn function(&self) -> &SmoothExpr {
        &self.f
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.coeff
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.coeff.get(alpha).copied().unwrap_or(0.0)
    }

    /// The homogeneous degree-`m` term at `x`.
    pub fn term(&self, m: usize, x: &HVector) -> f64 {
        self.coeff
            .iter()
            .filter(|(alpha, _)| alpha.degree() as usize == m)
            .map(|(alpha, c)| c * alpha.monomial(x, &self.anchor))
            .sum()
    }

    pub fn partial_sum(&self, x: &HVector) -> f64 {
        (0..=self.order).map(|m| self.term(m, x)).sum()
    }

    /// `f(x)` minus the partial sum.
    pub fn remainder(&self, x: &HVector) -> f64 {
        self.f.eval(x) - self.partial_sum(x)
    }
}

/// Degree-`(n+1)` remainder factors keyed by multi-index.
#[derive(Debug, Clone)]
pub struct RemainderFactors {
    anchor: HVector,
    factors: BTreeMap<MultiIndex, Factor>,
}

impl RemainderFactors {
    pub fn anchor(&self) -> &HVector {
        &self.anchor
    }

    pub fn factors(&self) -> &BTreeMap<MultiIndex, Factor> {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&Factor> {
        self.factors.get(alpha)
    }

    /// `Σ_α (x - a)^α g_α(x)`.
    pub fn reconstruct(&self, x: &HVector) -> f64 {
        self.factors
            .iter()
            .map(|(alpha, g)| alpha.monomial(x, &self.anchor) * g.eval(x))
            .sum()
    }
}

pub fn remainder_factors(
    f: &SmoothExpr,
    a: &HVector,
    n: usize,
    quad: QuadratureSpec,
) -> Result<RemainderFactors, HadamardError> {
    remainder_factors_with_limits(f, a, n, quad, &Limits::default())
}

/// Builds `g_α` from `(n+1)`-fold refactor chains at `a`.
///
/// Chains that are permutations of one another share the multi-index `α`
/// and, since mixed partials commute, the same integrand; their sum is the
/// chain value times `|α|!/α!`.
pub fn remainder_factors_with_limits(
    f: &SmoothExpr,
    a: &HVector,
    n: usize,
    quad: QuadratureSpec,
    limits: &Limits,
) -> Result<RemainderFactors, HadamardError> {
    let base = decompose_with_limits(f, a, &StarDomain::WholeSpace, quad, limits)?;
    let support = base.support().clone();
    let chains = (support.len() as u128).saturating_pow(n as u32 + 1);
    if chains > limits.max_chains as u128 {
        return Err(HadamardError::ResourceLimit {
            chains,
            cap: limits.max_chains,
        });
    }
    let mut factors = BTreeMap::new();
    for alpha in multi_indices(&support, n + 1) {
        let chain = alpha.indices();
        let (last, prefix) = chain.split_last().expect("degree at least one");
        let mut nested = base.clone();
        for &k in prefix {
            nested = nested.refactor(k)?;
        }
        let nested = Arc::new(nested);
        let multiplicity = alpha.orderings();
        let last = *last;
        let label = format!("g_{alpha}");
        factors.insert(
            alpha,
            Factor::new(label, move |x| multiplicity * nested.eval_gk_unchecked(last, x)),
        );
    }
    Ok(RemainderFactors {
        anchor: a.clone(),
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::hadamard::decompose;

    fn v(c: &[f64]) -> HVector {
        HVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn multi_index_basics() {
        let m = MultiIndex::from_indices(&[3, 1, 3]);
        assert_eq!(m.entries(), &[(1, 1), (3, 2)]);
        assert_eq!(m.degree(), 3);
        assert_eq!(m.factorial(), 2.0);
        assert_eq!(m.orderings(), 3.0);
        assert_eq!(m.indices(), vec![1, 3, 3]);
        assert_eq!(m.monomial(&v(&[2.0, 0.0, 3.0]), &v(&[1.0])), 9.0);
        assert_eq!(m.to_string(), "(1↦1, 3↦2)");
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1,1],[3,2]]");
        assert!(serde_json::from_str::<MultiIndex>("[[3,1],[1,1]]").is_err());
        assert!(serde_json::from_str::<MultiIndex>("[[1,0]]").is_err());
    }

    #[test]
    fn enumerates_multisets() {
        let s: Support = [1, 2, 4].into_iter().collect();
        assert_eq!(multi_indices(&s, 0).len(), 1);
        assert_eq!(multi_indices(&s, 2).len(), 6);
        assert_eq!(multi_indices(&s, 3).len(), 10);
        assert!(multi_indices(&Support::new(), 2).is_empty());
    }

    #[test]
    fn exp_series() {
        let t = taylor(&parse("exp(x1)").unwrap(), &v(&[0.0]), 2);
        assert_eq!(t.coefficient(&MultiIndex::from_indices(&[])), 1.0);
        assert_eq!(t.coefficient(&MultiIndex::from_indices(&[1])), 1.0);
        assert_eq!(t.coefficient(&MultiIndex::from_indices(&[1, 1])), 0.5);
        assert_eq!(t.coefficients().len(), 3);
    }

    #[test]
    fn degree_two_polynomial_is_exact() {
        let t = taylor(&parse("x1*x2").unwrap(), &v(&[0.0, 0.0]), 2);
        for x in [[1.0, 2.0], [-3.5, 0.25], [4.0, -4.0]] {
            assert!(t.remainder(&v(&x)).abs() <= 1e-13);
        }
    }

    #[test]
    fn sin_remainder_is_fourth_order() {
        let t = taylor(&parse("sin(x1)").unwrap(), &v(&[0.0]), 3);
        let ratios: Vec<f64> = (1..10)
            .map(|m| {
                let h = 0.5f64.powi(m);
                t.remainder(&v(&[h])).abs() / h.powi(4)
            })
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(max < 0.01, "{ratios:?}");
    }

    #[test]
    fn cube_remainder_factor() {
        // x1^3 = 0 + 0·x1 + x1^2·x1
        let r = remainder_factors(&parse("x1^3").unwrap(), &v(&[0.0]), 1, QuadratureSpec::default())
            .unwrap();
        assert_eq!(r.len(), 1);
        let g = r.get(&MultiIndex::from_indices(&[1, 1])).unwrap();
        for x in [-2.0, 0.5, 3.0] {
            assert!((g.eval(&v(&[x])) - x).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_has_no_remainder_factors() {
        let r = remainder_factors(&SmoothExpr::Const(3.0), &v(&[1.0]), 2, QuadratureSpec::default())
            .unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn order_zero_reproduces_first_family() {
        let f = parse("x1*x2").unwrap();
        let a = v(&[0.0, 0.0]);
        let r = remainder_factors(&f, &a, 0, QuadratureSpec::default()).unwrap();
        let fact = decompose(&f, &a, &StarDomain::WholeSpace, QuadratureSpec::default()).unwrap();
        let x = v(&[1.25, -0.5]);
        for k in [1, 2] {
            let g = r.get(&MultiIndex::from_indices(&[k])).unwrap();
            assert_eq!(g.eval(&x), fact.eval_gk(k, &x).unwrap());
        }
    }

    #[test]
    fn factored_remainder_matches_direct_remainder() {
        let f = parse("sin(x1)*exp(0.5*x2) + cos(x3)*x4^2").unwrap();
        let a = v(&[0.2, -0.1, 0.4, 0.3]);
        for n in 0..=2 {
            let t = taylor(&f, &a, n);
            let r = remainder_factors(&f, &a, n, QuadratureSpec::default()).unwrap();
            for x in [[1.0, 0.5, -0.3, 2.0], [-2.0, 1.5, 0.7, -1.0]] {
                let x = v(&x);
                assert!((r.reconstruct(&x) - t.remainder(&x)).abs() <= 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn chain_cap_is_enforced() {
        let f = parse("x1+x2+x3+x4+x5+x6+x7+x8").unwrap();
        let a = v(&[0.0]);
        // 8^4 sits exactly on the default cap
        assert!(remainder_factors(&f, &a, 3, QuadratureSpec::default()).is_ok());
        assert_eq!(
            remainder_factors(&f, &a, 4, QuadratureSpec::default()).unwrap_err(),
            HadamardError::ResourceLimit { chains: 32768, cap: 4096 }
        );
    }
}
