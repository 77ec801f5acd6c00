//! A function vanishing on every coordinate axis splits as
//! `Σ x_k x_j g_kj(x)`.

use hilbert_hadamard::hadamard::probe_axes;
use hilbert_hadamard::prelude::*;

fn main() {
    let f: SmoothExpr = "x1*x2*(1 + x3^2) + sin(x2*x3)".parse().unwrap();
    let axes = axes_vanishing_factor(&f, QuadratureSpec::default()).unwrap();
    let pairs: Vec<_> = axes.factors().keys().collect();
    println!("{} factors g_kj over pairs {pairs:?}", pairs.len());

    for x in [[1.0, 2.0, 3.0], [-0.5, 0.25, 4.0], [2.0, -3.0, 0.1]] {
        let x = HVector::new(x.to_vec()).unwrap();
        println!("x = {:?}: f = {:.12}, Σ x_k x_j g_kj = {:.12}", x.coeffs(), f.eval(&x), axes.reconstruct(&x));
    }

    // x1^2 does not vanish on span{u_1}
    match probe_axes(&"x1^2 + x1*x2".parse().unwrap()) {
        Err(e) => println!("rejected: {e}"),
        Ok(()) => unreachable!(),
    }
}
