//! With `f(y) = 0 = f(z)`, write `f = Σ g_k h_k` where every `g_k`
//! vanishes at `y` and every `h_k` at `z`.

use hilbert_hadamard::prelude::*;

fn main() {
    let f: SmoothExpr = "(x1 - 0.5)*(x2 - 0.7) + (x3 - 1)*(x3 - 0.2)".parse().unwrap();
    let y = HVector::new(vec![-0.3, 0.7, 0.2]).unwrap();
    let z = HVector::new(vec![0.5, -0.25, 1.0]).unwrap();
    println!("f(y) = {:e}, f(z) = {:e}", f.eval(&y), f.eval(&z));

    let tp = two_point_factor(&f, &y, &z, QuadratureSpec::default()).unwrap();
    let (gy, hz) = tp.endpoint_residuals(&y, &z);
    println!("{} products; max |g_k(y)| = {gy:.1e}, max |h_k(z)| = {hz:.1e}", tp.len());
    println!("reduction maps y - z onto u_1 with scale {}", tp.reduction().scale);

    for x in [[0.0, 0.0, 0.0], [1.0, 2.0, -1.0], [3.0, -2.0, 0.5]] {
        let x = HVector::new(x.to_vec()).unwrap();
        println!("f = {:>10.6}, Σ g_k h_k = {:>10.6}", f.eval(&x), tp.reconstruct(&x));
    }

    // f must vanish at both points
    let err = two_point_factor(&"x1 + 1".parse().unwrap(), &y, &z, QuadratureSpec::default()).unwrap_err();
    println!("x1 + 1: {err}");
}
