//! Property tests over random expression trees and points.

use hilbert_hadamard::dual::{dual_mul, psi_eval, DualScalar, DualVector};
use hilbert_hadamard::expr::{directional_derivative, gradient, nth_directional, Prim, SmoothExpr};
use hilbert_hadamard::hadamard::{decompose, taylor, two_point_factor};
use hilbert_hadamard::quadrature::QuadratureSpec;
use hilbert_hadamard::space::{inner, norm, segment_point, HVector, StarDomain};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

const DIM: usize = 4;

fn expr_tree() -> impl Strategy<Value = SmoothExpr> {
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map(SmoothExpr::constant),
        (1..=DIM).prop_map(SmoothExpr::coord),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(SmoothExpr::add),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(SmoothExpr::mul),
            (-2.0..2.0f64, inner.clone()).prop_map(|(c, e)| SmoothExpr::scale(c, e)),
            (inner.clone(), 1u32..=3).prop_map(|(e, p)| SmoothExpr::pow(e, p)),
            (
                prop_oneof![Just(Prim::Sin), Just(Prim::Cos), Just(Prim::Exp)],
                inner
            )
                .prop_map(|(p, e)| SmoothExpr::prim(p, e)),
        ]
    })
}

fn vector(len: usize, r: f64) -> impl Strategy<Value = HVector> {
    prop::collection::vec(-r..r, len).prop_map(|c| HVector::new(c).unwrap())
}

fn close(a: f64, b: f64, rel: f64, scale: &[f64]) -> bool {
    let s = scale.iter().fold(1.0f64.max(a.abs()).max(b.abs()), |m, v| m.max(v.abs()));
    (a - b).abs() <= rel * s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cauchy_schwarz(u in vector(6, 10.0), v in vector(3, 10.0)) {
        let lhs = inner(&u, &v).abs();
        let rhs = norm(&u) * norm(&v);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn zero_padding_is_neutral(u in vector(3, 5.0), v in vector(5, 5.0), extra in 1usize..6, t in 0.0..=1.0f64) {
        let up = u.padded(u.dim() + extra);
        prop_assert_eq!(inner(&u, &v), inner(&up, &v));
        prop_assert_eq!(norm(&u), norm(&up));
        let s = segment_point(&u, &v, t).unwrap();
        let sp = segment_point(&up, &v, t).unwrap();
        prop_assert_eq!(s.padded(sp.dim()), sp);
    }

    #[test]
    fn balls_contain_their_segments(c in vector(3, 2.0), a in vector(3, 1.0), x in vector(3, 1.0)) {
        let radius = 1.0 * 3f64.sqrt() + 1e-9;
        let ball = StarDomain::ball(c.clone(), radius).unwrap();
        let (a, x) = (c.add(&a), c.add(&x));
        prop_assume!(ball.contains(&a) && ball.contains(&x));
        for i in 0..=20 {
            let p = segment_point(&a, &x, f64::from(i) / 20.0).unwrap();
            prop_assert!(ball.contains(&p));
        }
    }

    #[test]
    fn mixed_partials_commute(f in expr_tree(), x in vector(DIM, 1.5), j in 1..=DIM, k in 1..=DIM) {
        let jk = f.partial(j).partial(k).eval(&x);
        let kj = f.partial(k).partial(j).eval(&x);
        prop_assert!(close(jk, kj, 1e-12, &[]), "{jk} vs {kj} for {f}");
    }

    #[test]
    fn off_support_coordinates_do_not_matter(f in expr_tree(), x in vector(DIM + 2, 1.5), bump in -3.0..3.0f64) {
        let support = f.support();
        let mut y = x.coeffs().to_vec();
        for k in 1..=y.len() {
            if !support.contains(&k) {
                y[k - 1] += bump;
            }
        }
        let y = HVector::new(y).unwrap();
        prop_assert_eq!(f.eval(&x).to_bits(), f.eval(&y).to_bits());
    }

    #[test]
    fn nth_directional_is_multilinear(
        f in expr_tree(),
        x in vector(DIM, 1.0),
        u in vector(DIM, 1.0),
        w in vector(DIM, 1.0),
        v in vector(DIM, 1.0),
        c in -3.0..3.0f64,
        slot in 0usize..2,
    ) {
        let with = |d: HVector| {
            let mut dirs = vec![v.clone(), v.clone()];
            dirs[slot] = d;
            nth_directional(&f, &x, &dirs).unwrap()
        };
        let (du, dw) = (with(u.clone()), with(w.clone()));
        let sum = with(u.add(&w));
        prop_assert!(close(sum, du + dw, 1e-12, &[du, dw]), "additivity {sum} vs {du} + {dw}");
        let scaled = with(u.scale(c));
        prop_assert!(close(scaled, c * du, 1e-12, &[du]), "homogeneity {scaled} vs {c}*{du}");
    }

    #[test]
    fn psi_matches_eval_and_directional_derivative(f in expr_tree(), x in vector(DIM, 1.5), y in vector(DIM, 1.5)) {
        let out = psi_eval(&f, &DualVector::new(x.clone(), y.clone()));
        prop_assert_eq!(out.re.to_bits(), f.eval(&x).to_bits());
        let dd = directional_derivative(&f, &x, &y);
        let grad = gradient(&f, &x);
        let scale: Vec<f64> = (1..=DIM).map(|k| grad.coord(k) * y.coord(k)).collect();
        prop_assert!(close(out.eps, dd, 1e-12, &scale), "{} vs {dd}", out.eps);
    }

    #[test]
    fn psi_is_multiplicative_and_unital(f in expr_tree(), g in expr_tree(), x in vector(DIM, 1.5), y in vector(DIM, 1.5)) {
        let w = DualVector::new(x, y);
        prop_assert_eq!(psi_eval(&SmoothExpr::one(), &w), DualScalar::ONE);
        let (pf, pg) = (psi_eval(&f, &w), psi_eval(&g, &w));
        let lhs = psi_eval(&(f.clone() * g.clone()), &w);
        let rhs = dual_mul(pf, pg);
        prop_assert!(close(lhs.re, rhs.re, 1e-12, &[]));
        let parts = [pf.re * pg.eps, pf.eps * pg.re];
        prop_assert!(close(lhs.eps, rhs.eps, 1e-12, &parts), "{lhs} vs {rhs}");
    }

    #[test]
    fn epsilon_rules(f in expr_tree(), g in expr_tree(), x in vector(DIM, 1.5), y in vector(DIM, 1.5), c in -3.0..3.0f64) {
        let w = DualVector::new(x, y);
        let (pf, pg) = (psi_eval(&f, &w), psi_eval(&g, &w));
        prop_assert_eq!(psi_eval(&SmoothExpr::constant(c), &w).eps, 0.0);
        let sum = psi_eval(&(f.clone() + g.clone()), &w).eps;
        prop_assert!(close(sum, pf.eps + pg.eps, 1e-12, &[pf.eps, pg.eps]));
        let scaled = psi_eval(&SmoothExpr::scale(c, f.clone()), &w).eps;
        prop_assert!(close(scaled, c * pf.eps, 1e-12, &[pf.eps]));
        let prod = psi_eval(&(f * g), &w).eps;
        let (l, r) = (pf.eps * pg.re, pf.re * pg.eps);
        prop_assert!(close(prod, l + r, 1e-12, &[l, r]), "{prod} vs {l} + {r}");
    }

    #[test]
    fn hadamard_identity_on_random_trees(f in expr_tree(), a in vector(DIM, 1.0), x in vector(DIM, 1.5)) {
        let fact = decompose(&f, &a, &StarDomain::WholeSpace, QuadratureSpec::default()).unwrap();
        let fx = f.eval(&x);
        let rec = fact.reconstruct(&x).unwrap();
        prop_assert!((rec - fx).abs() <= 1e-9 + 1e-9 * fx.abs(), "{rec} vs {fx} for {f}");
        let g_a = fact.eval_g(&a).unwrap();
        let grad = gradient(&f, &a);
        for k in 1..=DIM {
            prop_assert!(close(g_a.coord(k), grad.coord(k), 1e-12, &[]));
        }
    }

    #[test]
    fn absolute_convergence_bound(f in expr_tree(), a in vector(DIM, 1.0), x in vector(DIM, 1.5)) {
        let rule = QuadratureSpec::default().rule();
        let sup = rule
            .nodes()
            .iter()
            .map(|&t| norm(&gradient(&f, &segment_point(&a, &x, t).unwrap())))
            .fold(0.0, f64::max);
        let lhs = (f.eval(&x) - f.eval(&a)).abs();
        let rhs = norm(&x.sub(&a)) * sup + 1e-9;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs} for {f}");
    }

    #[test]
    fn two_point_on_products_of_vanishing_forms(
        y in vector(3, 2.0),
        z in vector(3, 2.0),
        p in vector(3, 1.0),
        q in vector(3, 1.0),
        x in vector(3, 3.0),
    ) {
        prop_assume!(norm(&y.sub(&z)) > 0.1);
        let at = |v: &HVector, base: &HVector| SmoothExpr::linear(v) - SmoothExpr::constant(inner(v, base));
        let (ly, lz) = (at(&p, &y), at(&q, &z));
        let f = ly.clone() * lz.clone() + SmoothExpr::prim(Prim::Sin, ly) * SmoothExpr::prim(Prim::Cos, lz.clone()) * lz;
        let tp = two_point_factor(&f, &y, &z, QuadratureSpec::default()).unwrap();
        let (gy, hz) = tp.endpoint_residuals(&y, &z);
        prop_assert!(gy <= 1e-10 && hz <= 1e-10, "{gy} {hz}");
        let fx = f.eval(&x);
        prop_assert!((tp.reconstruct(&x) - fx).abs() <= 1e-8 * (1.0 + fx.abs()));
    }
}

/// `|R(a + 2^{-m} v)| / |2^{-m} v|^{n+1}` shows no growth over `m = 3..10`.
#[test]
fn scaled_remainders_stay_bounded() {
    let family = hilbert_hadamard::verify::standard_family();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for f in &family {
        for n in 1..=2usize {
            let (a, v) = (vector(8, 0.5), vector(8, 1.0))
                .new_tree(&mut runner)
                .unwrap()
                .current();
            let expansion = taylor(f, &a, n);
            let ratios: Vec<f64> = (3..=10)
                .map(|m| {
                    let h = v.scale(0.5f64.powi(m));
                    expansion.remainder(&a.add(&h)).abs() / norm(&h).powi(n as i32 + 1)
                })
                .collect();
            let head = ratios[..3].iter().copied().fold(0.0, f64::max);
            let tail = ratios[5..].iter().copied().fold(0.0, f64::max);
            let noise = 1e-14 * (1.0 + f.eval(&a).abs()) / norm(&v.scale(2f64.powi(-10))).powi(n as i32 + 1);
            assert!(tail <= 2.0 * head + noise, "{f} n={n}: {ratios:?}");
        }
    }
}
