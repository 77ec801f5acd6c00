//! Printing back to the DSL. Constants use the shortest round-trip decimal
//! form, so `parse(&f.to_string())` evaluates identically to `f`.

use std::fmt::{self, Display, Formatter, Write};

use super::SmoothExpr;

impl Display for SmoothExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

fn write_num(f: &mut Formatter<'_>, c: f64) -> fmt::Result {
    write!(f, "{c}")
}

fn write_expr(f: &mut Formatter<'_>, e: &SmoothExpr) -> fmt::Result {
    let SmoothExpr::Add(terms) = e else {
        return write_term(f, e);
    };
    for (i, t) in terms.iter().enumerate() {
        if i == 0 {
            write_term(f, t)?;
            continue;
        }
        match t {
            SmoothExpr::Const(c) if c.is_sign_negative() => {
                f.write_str(" - ")?;
                write_num(f, -c)?;
            }
            SmoothExpr::Scale(c, inner) if c.is_sign_negative() => {
                f.write_str(" - ")?;
                if *c == -1.0 {
                    write_term(f, inner)?;
                } else {
                    write_scale(f, -c, inner)?;
                }
            }
            _ => {
                f.write_str(" + ")?;
                write_term(f, t)?;
            }
        }
    }
    Ok(())
}

fn write_scale(f: &mut Formatter<'_>, c: f64, inner: &SmoothExpr) -> fmt::Result {
    write_num(f, c)?;
    f.write_char('*')?;
    match inner {
        SmoothExpr::Mul(_) => write_term(f, inner),
        _ => write_factor(f, inner),
    }
}

fn write_term(f: &mut Formatter<'_>, e: &SmoothExpr) -> fmt::Result {
    match e {
        SmoothExpr::Mul(factors) => {
            for (i, factor) in factors.iter().enumerate() {
                if i > 0 {
                    f.write_char('*')?;
                }
                write_factor(f, factor)?;
            }
            Ok(())
        }
        SmoothExpr::Scale(c, inner) => write_scale(f, *c, inner),
        SmoothExpr::Const(c) => write_num(f, *c),
        SmoothExpr::Add(_) => {
            f.write_char('(')?;
            write_expr(f, e)?;
            f.write_char(')')
        }
        _ => write_factor(f, e),
    }
}

fn write_factor(f: &mut Formatter<'_>, e: &SmoothExpr) -> fmt::Result {
    match e {
        SmoothExpr::IntPow(base, p) => {
            write_atom(f, base)?;
            write!(f, "^{p}")
        }
        _ => write_atom(f, e),
    }
}

fn write_atom(f: &mut Formatter<'_>, e: &SmoothExpr) -> fmt::Result {
    match e {
        SmoothExpr::Const(c) if c.is_sign_negative() => {
            f.write_char('(')?;
            write_num(f, *c)?;
            f.write_char(')')
        }
        SmoothExpr::Const(c) => write_num(f, *c),
        SmoothExpr::Coord(k) => write!(f, "x{k}"),
        SmoothExpr::Prim(p, arg) => {
            write!(f, "{p}(")?;
            write_expr(f, arg)?;
            f.write_char(')')
        }
        _ => {
            f.write_char('(')?;
            write_expr(f, e)?;
            f.write_char(')')
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    #[test]
    fn prints_readably() {
        let cases = [
            ("x1^2 + sin(x2)*x3", "x1^2 + sin(x2)*x3"),
            ("x1 - 2*x2", "x1 - 2*x2"),
            ("x1 - x2^2", "x1 - x2^2"),
            ("3 + x1", "x1 + 3"),
            ("x1 - 3", "x1 - 3"),
            ("-x1", "-1*x1"),
            ("2*(x1 + x2)", "2*(x1 + x2)"),
            ("(x1 + 1)^3", "(x1 + 1)^3"),
            ("exp(-(x1^2)/2)", "exp(-0.5*x1^2)"),
            ("exp(-x1^2/2)", "exp(0.5*(-1*x1)^2)"),
            ("x1*x2*(1 + x3^2)", "x1*x2*(x3^2 + 1)"),
        ];
        for (src, want) in cases {
            assert_eq!(parse(src).unwrap().to_string(), want, "printing {src}");
        }
    }

    #[test]
    fn reparse_is_structurally_identical() {
        for src in [
            "x1^2 + sin(x2)*x3",
            "-(x1 - 3*x2)^2 * cos(0.1*x4)",
            "x1/3 - x2/7 + 1e-20",
            "exp(sin(cos(x1*x2 - 1)))^2",
            "-2^3 + (-x1)^3",
        ] {
            let once = parse(src).unwrap();
            let twice = parse(&once.to_string()).unwrap();
            assert_eq!(once, twice, "{src} -> {once}");
        }
    }
}
