//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Every tolerance lives in the constants
//! below.

use std::process::{Command, ExitCode};

use hilbert_hadamard::dual::DualScalar;
use hilbert_hadamard::expr::{parse, SmoothExpr};
use hilbert_hadamard::hadamard::{probe_axes, taylor, HadamardError};
use hilbert_hadamard::space::{HVector, StarDomain};
use hilbert_hadamard::verify::{self, CheckConfig, CheckReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const SAMPLES: usize = 200;
const NODES: usize = 32;
const IDENTITY_TOL: f64 = 1e-9;
const POLY_IDENTITY_TOL: f64 = 1e-13;
const ANCHOR_GRADIENT_TOL: f64 = 1e-12;
const ANCHOR_HESSIAN_TOL: f64 = 1e-10;
const PSI_SYMBOLIC_TOL: f64 = 1e-12;
const PSI_FD_TOL: f64 = 1e-6;
const RULE_TOL: f64 = 1e-12;
const EXPONENT_SLACK: f64 = 0.1;
const EXACT_REMAINDER_TOL: f64 = 1e-13;
const FACTOR_TOL: f64 = 1e-8;
const AXES_SAMPLES: usize = 100;
const ENDPOINT_TOL: f64 = 1e-10;
const MIN_FAMILY: usize = 12;
const MIN_TWO_POINT_CASES: usize = 3;
const MIN_ROUND_TRIPS: usize = 20;
const MIN_MALFORMED: usize = 5;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn cfg() -> CheckConfig {
    CheckConfig {
        seed: SEED,
        samples: SAMPLES,
        abs_tol: IDENTITY_TOL,
        rel_tol: IDENTITY_TOL,
        nodes: NODES,
        ..CheckConfig::default()
    }
}

/// Folds reports into one verdict, naming the worst one. Each report's
/// own tolerance must equal `tol` so the criterion cannot drift from the
/// library constants.
fn fold(reports: &[CheckReport], tol: Option<f64>) -> Verdict {
    let mut worst: Option<&CheckReport> = None;
    let mut ratio = 0.0f64;
    for r in reports {
        if let Some(t) = tol {
            if r.worst_case.tolerance != t && r.worst_case.residual != 0.0 {
                return Verdict::new(false, format!("{} checked at {} instead of {t}", r.name, r.worst_case.tolerance));
            }
        }
        let q = r.worst_case.residual / r.worst_case.tolerance;
        if worst.is_none() || q > ratio || !r.passed {
            ratio = q;
            worst = Some(r);
            if !r.passed {
                break;
            }
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    match worst {
        None => Verdict::new(false, "no reports"),
        Some(r) => Verdict::new(
            passed,
            format!(
                "{} reports, worst {} residual {:.3e} (tol {:.0e})",
                reports.len(),
                r.name,
                r.worst_case.residual,
                r.worst_case.tolerance
            ),
        ),
    }
}

fn anchors(family: &[SmoothExpr]) -> Vec<HVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    family
        .iter()
        .map(|f| verify::uniform_in_ball(&mut rng, &HVector::zeros(1), 1.0, f.max_coord().max(1)))
        .collect()
}

fn criterion_1() -> Verdict {
    let family = verify::standard_family();
    if family.len() < MIN_FAMILY || family.iter().any(|f| f.max_coord() > 8) {
        return Verdict::new(false, "standard family too small or too wide");
    }
    let cfg = cfg();
    let exact = CheckConfig {
        abs_tol: POLY_IDENTITY_TOL,
        rel_tol: POLY_IDENTITY_TOL,
        ..cfg.clone()
    };
    let mut general = Vec::new();
    let mut polys = Vec::new();
    for (f, a) in family.iter().zip(anchors(&family)) {
        general.push(verify::check_hadamard_identity(f, &a, &StarDomain::WholeSpace, &cfg).unwrap());
        if f.polynomial_degree().is_some() {
            polys.push(verify::check_hadamard_identity(f, &a, &StarDomain::WholeSpace, &exact).unwrap());
        }
    }
    if general.iter().any(|r| r.samples_run != SAMPLES) {
        return Verdict::new(false, "wrong sample count");
    }
    let g = fold(&general, None);
    let p = fold(&polys, None);
    Verdict::new(
        g.passed && p.passed && polys.len() >= 4,
        format!("{} functions: {}; {} polynomials: {}", family.len(), g.detail, polys.len(), p.detail),
    )
}

fn criterion_2() -> Verdict {
    let family = verify::standard_family();
    let cfg = cfg();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (f, a) in family.iter().zip(anchors(&family)) {
        first.push(verify::check_anchor_gradient(f, &a, &cfg).unwrap());
        second.push(verify::check_anchor_hessian(f, &a, &cfg).unwrap());
    }
    let g = fold(&first, Some(ANCHOR_GRADIENT_TOL));
    let h = fold(&second, Some(ANCHOR_HESSIAN_TOL));
    Verdict::new(g.passed && h.passed, format!("g_k(a): {}; 2g_kj(a): {}", g.detail, h.detail))
}

fn criterion_3() -> Verdict {
    assert_eq!(PSI_SYMBOLIC_TOL, verify::ALGEBRA_REL_TOL);
    assert_eq!(PSI_FD_TOL, verify::FD_REL_TOL);
    let cfg = cfg();
    let reports: Vec<_> = verify::standard_family()
        .iter()
        .map(|f| verify::check_psi_consistency(f, &cfg).unwrap())
        .collect();
    let v = fold(&reports, None);
    let square = DualScalar::EPSILON * DualScalar::EPSILON;
    let nilpotent = square == DualScalar { re: 0.0, eps: 0.0 };
    Verdict::new(
        v.passed && nilpotent,
        format!("{}; (0+e1)^2 = {}+e{}", v.detail, square.re, square.eps),
    )
}

fn criterion_4() -> Verdict {
    let family = verify::standard_family();
    let cfg = cfg();
    let mut reports = Vec::new();
    for i in 0..family.len() {
        let (f, g) = (&family[i], &family[(i + 3) % family.len()]);
        reports.push(verify::check_rules(f, g, &cfg).unwrap());
        reports.push(verify::check_psi_homomorphism(f, g, &cfg).unwrap());
    }
    // Ψ(1) = 1 is part of every homomorphism report and must hold exactly
    fold(&reports, Some(RULE_TOL))
}

fn criterion_5() -> Verdict {
    let cfg = cfg();
    let mut orders = Vec::new();
    for src in verify::TAYLOR_ORDER_CASES {
        let f = parse(src).unwrap();
        for a in [HVector::zeros(1), HVector::new(vec![0.3, -0.2, 0.1]).unwrap()] {
            for n in 1..=3 {
                orders.push(verify::check_taylor_order(&f, &a, n, &cfg).unwrap());
            }
        }
    }
    let o = fold(&orders, Some(EXPONENT_SLACK));

    // polynomials of degree at most n are reproduced by their expansion
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut exact_worst = 0.0f64;
    let mut exact_cases = 0;
    for f in verify::standard_family() {
        let Some(d) = f.polynomial_degree() else { continue };
        for n in (d as usize)..=(d as usize + 1) {
            let a = verify::uniform_in_ball(&mut rng, &HVector::zeros(1), 1.0, f.max_coord().max(1));
            let t = taylor(&f, &a, n);
            for _ in 0..SAMPLES {
                let x = verify::uniform_in_ball(&mut rng, &a, verify::SAMPLE_RADIUS, a.dim());
                // scaled by 1 + |f(x)|: |x1^6| reaches 4e3, where one ulp is 9e-13
                exact_worst = exact_worst.max(t.remainder(&x).abs() / (1.0 + f.eval(&x).abs()));
            }
            exact_cases += 1;
        }
    }
    let exact_ok = exact_worst <= EXACT_REMAINDER_TOL && exact_cases > 0;

    let family = verify::standard_family();
    let mut factored = Vec::new();
    for (f, a) in family.iter().zip(anchors(&family)) {
        if f.support().len() <= 4 {
            for n in 0..=2 {
                factored.push(verify::check_remainder_factors(f, &a, n, &cfg).unwrap());
            }
        }
    }
    let r = fold(&factored, None);
    Verdict::new(
        o.passed && exact_ok && r.passed,
        format!(
            "exponents: {}; exact remainders: {} cases, worst {:.3e}; factored: {}",
            o.detail, exact_cases, exact_worst, r.detail
        ),
    )
}

fn criterion_6() -> Verdict {
    let cfg = CheckConfig {
        samples: AXES_SAMPLES,
        ..cfg()
    };
    let f = parse("x1*x2*(1 + x3^2)").unwrap();
    let ok = verify::check_axes_factorization(&f, &cfg).unwrap();
    assert_eq!(FACTOR_TOL, verify::FACTOR_TOL);
    let rejected = matches!(
        probe_axes(&parse("x1^2").unwrap()),
        Err(HadamardError::AxesPrecondition { axis: 1, .. })
    );
    Verdict::new(
        ok.passed && ok.samples_run == AXES_SAMPLES && rejected,
        format!(
            "{} points, worst residual {:.3e} against {:.0e}*(1+|f|); x1^2 rejected: {rejected}",
            ok.samples_run, ok.worst_case.residual, FACTOR_TOL
        ),
    )
}

fn criterion_7() -> Verdict {
    assert_eq!(ENDPOINT_TOL, verify::ENDPOINT_TOL);
    let cases = verify::two_point_cases();
    let has_unit = cases
        .iter()
        .any(|(f, y, z)| *f == "x1*(x1 - 1)" && *y == HVector::unit(1) && z.is_zero());
    let cfg = cfg();
    let reports: Vec<_> = cases
        .iter()
        .map(|(f, y, z)| verify::check_two_point(&parse(f).unwrap(), y, z, &cfg).unwrap())
        .collect();
    let v = fold(&reports, None);
    Verdict::new(
        v.passed && has_unit && cases.len() >= MIN_TWO_POINT_CASES,
        format!("{} functions; {}", cases.len(), v.detail),
    )
}

fn tool(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert-hadamard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn criterion_8() -> Verdict {
    let args = ["verify", "--seed", "42"];
    let first = tool(&args);
    let second = tool(&args);
    let same = first.stdout == second.stdout && !first.stdout.is_empty();
    let exit = first.status.code();
    let lines = first.stdout.iter().filter(|&&b| b == b'\n').count();
    Verdict::new(
        same && exit == Some(0),
        format!("{lines} report lines, byte-identical: {same}, exit {exit:?}"),
    )
}

const ROUND_TRIPS: &[&str] = &[
    "3.5",
    "x1",
    "x12",
    "-x1",
    "x1 + x2 - x3",
    "2*x1 - 0.5*x2",
    "x1*x2*x3",
    "x1^2 + x2^2",
    "(x1 + x2)^3",
    "x1/4 - x2/0.5",
    "-2^2 + x1",
    "(-x1)^3",
    "sin(x1)",
    "cos(x1*x2 - 1)",
    "exp(-(x1^2)/2)",
    "exp(-x1^2/2)",
    "sin(x1)*exp(x2/4)",
    "exp(sin(cos(x1)))^2",
    "1e-3*x1 + 2.5E2*x2",
    "x1^6 - 3*x2^3*x3^2 + x7*x8",
    "((x1))",
    "x1*(x2 + 3)*(x3 - 1)^2",
    "  x1 +\n  x2 ",
    "cos(0.5*x2*x3) - exp(0.5*x1 - 0.25*x5)",
];

const MALFORMED: &[&str] = &["x(", "x1 +", "x0", "x1^-2", "x1 / x2", "tan(x1)", "x1 $ 2", "(x1", "x1^2.5", "1/0"];

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = Vec::new();
    for src in ROUND_TRIPS {
        let once = parse(src).unwrap();
        let twice = parse(&once.to_string()).unwrap();
        let same_values = (0..20).all(|_| {
            let x = verify::uniform_in_ball(&mut rng, &HVector::zeros(12), 2.0, 12);
            once.eval(&x).to_bits() == twice.eval(&x).to_bits()
        });
        if once != twice || !same_values {
            mismatches.push(*src);
        }
    }
    let mut bad_exits = Vec::new();
    for src in MALFORMED {
        let out = tool(&["eval", "-f", src, "--point", "1,2"]);
        let err = String::from_utf8_lossy(&out.stderr);
        if out.status.code() != Some(2) || !(err.contains("line ") && err.contains("column ")) {
            bad_exits.push(*src);
        }
    }
    Verdict::new(
        mismatches.is_empty()
            && bad_exits.is_empty()
            && ROUND_TRIPS.len() >= MIN_ROUND_TRIPS
            && MALFORMED.len() >= MIN_MALFORMED,
        format!(
            "{} round trips, mismatches {mismatches:?}; {} malformed, wrong exits {bad_exits:?}",
            ROUND_TRIPS.len(),
            MALFORMED.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Hadamard identity", criterion_1),
        ("anchor identities", criterion_2),
        ("dual-number contract", criterion_3),
        ("epsilon rules and multiplicativity", criterion_4),
        ("Taylor remainder order", criterion_5),
        ("axes-vanishing factorization", criterion_6),
        ("two-point representation", criterion_7),
        ("determinism", criterion_8),
        ("parser corpus", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} ({})",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            name,
            v.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria fail", criteria.len());
        ExitCode::FAILURE
    }
}
