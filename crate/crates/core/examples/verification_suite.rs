//! Run the seeded checks and summarize them; pass a seed to vary the draw.
//!
//!     cargo run --release --example verification_suite -- 7

use hilbert_hadamard::verify::{run_suite, to_json_lines, CheckConfig};

fn main() {
    let seed = std::env::args().nth(1).map_or(42, |s| s.parse().expect("seed is a u64"));
    let cfg = CheckConfig { seed, ..CheckConfig::default() };
    let reports = run_suite(&cfg).unwrap();

    let mut families: Vec<(String, usize, usize)> = Vec::new();
    for r in &reports {
        let name = r.name.split('[').next().unwrap().to_string();
        match families.iter_mut().find(|f| f.0 == name) {
            Some(f) => {
                f.1 += 1;
                f.2 += usize::from(r.passed);
            }
            None => families.push((name, 1, usize::from(r.passed))),
        }
    }
    for (name, total, passed) in &families {
        println!("{name:<26} {passed:>3}/{total}");
    }

    let worst = reports
        .iter()
        .max_by(|a, b| {
            let q = |r: &hilbert_hadamard::verify::CheckReport| r.worst_case.residual / r.worst_case.tolerance;
            q(a).total_cmp(&q(b))
        })
        .unwrap();
    println!("\nclosest to its tolerance:\n{}", to_json_lines(std::slice::from_ref(worst)));
}
