use std::fmt;

use num_complex::Complex64;

use super::Expr;

// binding strength of the printed form
const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADD,
        Expr::Mul(..) | Expr::Div(..) => MUL,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => POW,
        Expr::Const(c) if !is_plain_const(*c) => ATOM - 1,
        _ => ATOM,
    }
}

fn is_plain_const(c: Complex64) -> bool {
    (c.im == 0.0 && c.re >= 0.0 && !c.re.is_sign_negative()) || c == Complex64::new(0.0, 1.0)
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c == Complex64::new(0.0, 1.0) {
        return write!(f, "i");
    }
    if c.im == 0.0 {
        if c.re >= 0.0 && !c.re.is_sign_negative() {
            return write!(f, "{}", c.re);
        }
        return write!(f, "(-{})", -c.re);
    }
    let re = if c.re < 0.0 { format!("-{}", -c.re) } else { format!("{}", c.re) };
    let (op, im) = if c.im < 0.0 { ('-', -c.im) } else { ('+', c.im) };
    write!(f, "({re}{op}{im}*i)")
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(f, *c),
            Expr::Z => write!(f, "z"),
            Expr::T => write!(f, "t"),
            Expr::Param(name) => write!(f, "{name}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                child(f, a, UNARY)
            }
            Expr::Add(a, b) => {
                child(f, a, ADD)?;
                write!(f, " + ")?;
                child(f, b, MUL)
            }
            Expr::Sub(a, b) => {
                child(f, a, ADD)?;
                write!(f, " - ")?;
                child(f, b, MUL)
            }
            Expr::Mul(a, b) => {
                child(f, a, MUL)?;
                write!(f, "*")?;
                child(f, b, UNARY)
            }
            Expr::Div(a, b) => {
                child(f, a, MUL)?;
                write!(f, "/")?;
                child(f, b, UNARY)
            }
            Expr::Pow(a, b) => {
                child(f, a, ATOM)?;
                write!(f, "^")?;
                child(f, b, UNARY)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn prints_minimal_parentheses() {
        let cases = [
            ("z - a/(1+a*z)", "z - a/(1 + a*z)"),
            ("1/z^(1+k)", "1/z^(1 + k)"),
            ("-(z*z)", "-(z*z)"),
            ("(z^2)^3", "(z^2)^3"),
            ("z^2^3", "z^2^3"),
            ("a-(b-c)", "a - (b - c)"),
            ("a/(b*c)", "a/(b*c)"),
        ];
        for (src, expected) in cases {
            assert_eq!(parse(src).unwrap().to_string(), expected);
        }
    }

    #[test]
    fn derived_constants_print() {
        let e = Expr::Const(Complex64::new(-2.5, 0.0));
        assert_eq!(e.to_string(), "(-2.5)");
        let e = Expr::Const(Complex64::new(1.0, -3.0));
        assert_eq!(e.to_string(), "(1-3*i)");
        let v = parse(&e.to_string()).unwrap().eval_zt(Complex64::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!(v, Complex64::new(1.0, -3.0));
    }
}
