//! Forward-mode derivatives from evaluation at `x + εy`.

use hilbert_hadamard::prelude::*;

fn main() {
    // ε² = 0
    let e = DualScalar::EPSILON;
    println!("ε·ε = {}", e * e);

    let p = DualScalar { re: 3.0, eps: 1.0 };
    for name in ["sin", "cos", "exp"] {
        println!("{name}(3 + ε) = {}", dual_prim(name, p).unwrap());
    }

    let f: SmoothExpr = "x1*x2 + sin(x3)*x1".parse().unwrap();
    let x = HVector::new(vec![1.0, 2.0, 0.5]).unwrap();
    let y = HVector::new(vec![3.0, 4.0, -1.0]).unwrap();
    let w = DualVector::new(x.clone(), y.clone());
    let out = psi_eval(&f, &w);
    println!("f(x + εy)       = {out}");
    println!("f(x), <∇f(x),y> = {}, {}", f.eval(&x), directional_derivative(&f, &x, &y));

    // Ψ respects products
    let g: SmoothExpr = "exp(x2) - x3".parse().unwrap();
    let lhs = psi_eval(&(f.clone() * g.clone()), &w);
    let rhs = dual_mul(psi_eval(&f, &w), psi_eval(&g, &w));
    println!("Ψ(fg) = {lhs}\nΨ(f)Ψ(g) = {rhs}");

    println!("as JSON: {}", serde_json::to_string(&w).unwrap());
}
