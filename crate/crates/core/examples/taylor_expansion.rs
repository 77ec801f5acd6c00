//! Taylor expansion with the remainder written as `Σ (x-a)^α g_α(x)`.

use hilbert_hadamard::prelude::*;

fn main() {
    let f: SmoothExpr = "exp(x1)*cos(x2)".parse().unwrap();
    let a = HVector::zeros(2);
    let n = 2;

    let t = taylor(&f, &a, n);
    println!("coefficients of the order-{n} expansion:");
    for (alpha, c) in t.coefficients() {
        if *c != 0.0 {
            println!("  {alpha}: {c}");
        }
    }

    let rf = remainder_factors(&f, &a, n, QuadratureSpec::default()).unwrap();
    println!("{} remainder factors of degree {}", rf.len(), n + 1);

    let v = HVector::new(vec![0.6, -0.8]).unwrap();
    println!("{:>10} {:>14} {:>14} {:>8}", "step", "remainder", "factored", "ratio");
    let mut prev: Option<f64> = None;
    for m in 0..8 {
        let x = v.scale(0.5f64.powi(m));
        let r = t.remainder(&x);
        let ratio = prev.map_or(String::new(), |p| format!("{:.3}", p / r));
        println!("{:>10.6} {:>14.6e} {:>14.6e} {:>8}", 0.5f64.powi(m), r, rf.reconstruct(&x), ratio);
        prev = Some(r);
    }
    println!("ratios approach 2^{} = {}", n + 1, 1 << (n + 1));
}
