//! Parse DSL text, inspect the tree, print it back, and show a diagnostic.
//!
//!     cargo run --example parse_and_print -- "x1^2*sin(x2) - 3/x3"

use hilbert_hadamard::prelude::*;

fn main() {
    let src = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "(x1 - 2*x2)^2*cos(0.5*x3) + exp(-x1)/4".to_string());

    let f = match parse(&src) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    println!("parsed:   {f}");
    println!("support:  {:?}", f.support());
    println!("degree:   {:?}", f.polynomial_degree());
    for k in f.support() {
        println!("d/dx{k}:   {}", f.partial(k));
    }

    let again = parse(&f.to_string()).unwrap();
    assert_eq!(again, f);

    // unary minus binds tighter than ^, so this is 4
    println!("-2^2 = {}", parse("-2^2").unwrap().eval(&HVector::zeros(1)));

    if let Err(e) = parse("x1 * (x2 +") {
        println!("malformed input -> {e}");
    }
}
