//! `f(x) = f(a) + <g(x), x - a>` with quadrature-backed factors, on the
//! whole space and on a ball, plus nested factors at the anchor.

use hilbert_hadamard::prelude::*;

fn main() {
    let f: SmoothExpr = "sin(x1)*exp(x2/4) + x1*x3^2".parse().unwrap();
    let a = HVector::new(vec![0.5, -0.5, 1.0]).unwrap();
    let x = HVector::new(vec![1.5, 0.25, -2.0]).unwrap();

    let fact = decompose(&f, &a, &StarDomain::WholeSpace, QuadratureSpec::default()).unwrap();
    let g = fact.eval_g(&x).unwrap();
    println!("g(x) = {:?}", g.coeffs());
    println!("f(x) = {:.15}", f.eval(&x));
    println!("f(a) + <g(x), x - a> = {:.15}", fact.reconstruct(&x).unwrap());

    // at the anchor the factors are the gradient, and twice the nested
    // factors are the Hessian
    println!("g(a)  = {:?}", fact.eval_g(&a).unwrap().coeffs());
    println!("∇f(a) = {:?}", gradient(&f, &a).coeffs());
    let g3 = fact.refactor(3).unwrap();
    let h33 = nth_directional(&f, &a, &[HVector::unit(3), HVector::unit(3)]).unwrap();
    println!("2 g_33(a) = {}, ∂3∂3 f(a) = {h33}", 2.0 * g3.eval_gk(3, &a).unwrap());

    // the same construction on a ball; points outside are refused
    let ball = StarDomain::ball(HVector::zeros(3), 2.0).unwrap();
    let local = decompose(&f, &a, &ball, QuadratureSpec::new(12).unwrap()).unwrap();
    let inside = HVector::new(vec![1.0, 1.0, 0.5]).unwrap();
    println!("ball, 12 nodes: residual {:.2e}", (local.reconstruct(&inside).unwrap() - f.eval(&inside)).abs());
    println!("outside the ball: {:?}", local.reconstruct(&x).unwrap_err());

    // one node is the midpoint rule, visibly worse
    let coarse = decompose(&f, &a, &StarDomain::WholeSpace, QuadratureSpec::new(1).unwrap()).unwrap();
    println!("1 node residual: {:.2e}", (coarse.reconstruct(&x).unwrap() - f.eval(&x)).abs());
}
