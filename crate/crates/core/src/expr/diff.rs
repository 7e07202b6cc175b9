use std::sync::Arc;

use num_complex::Complex64;

use super::{c_pow, Expr, Func, Var};

fn as_const(e: &Expr) -> Option<Complex64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    as_const(e) == Some(Complex64::new(0.0, 0.0))
}

fn is_one(e: &Expr) -> bool {
    as_const(e) == Some(Complex64::new(1.0, 0.0))
}

fn c(v: Complex64) -> Expr {
    Expr::Const(v)
}

fn re(v: f64) -> Expr {
    Expr::constant(v)
}

// Constructors that fold constants and drop 0/1 identities.

fn add(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => c(x + y),
        _ if is_zero(&a) => b,
        _ if is_zero(&b) => a,
        _ => Expr::Add(Arc::new(a), Arc::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => c(x - y),
        _ if is_zero(&b) => a,
        _ if is_zero(&a) => neg(b),
        _ => Expr::Sub(Arc::new(a), Arc::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(x) => c(-x),
        Expr::Neg(inner) => (*inner).clone(),
        other => Expr::Neg(Arc::new(other)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => c(x * y),
        _ if is_zero(&a) || is_zero(&b) => re(0.0),
        _ if is_one(&a) => b,
        _ if is_one(&b) => a,
        _ => Expr::Mul(Arc::new(a), Arc::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) if y != Complex64::new(0.0, 0.0) => c(x / y),
        _ if is_zero(&a) => re(0.0),
        _ if is_one(&b) => a,
        _ => Expr::Div(Arc::new(a), Arc::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        if let Ok(v) = c_pow(x, y) {
            return c(v);
        }
    }
    if is_one(&b) {
        return a;
    }
    if is_zero(&b) {
        return re(1.0);
    }
    Expr::Pow(Arc::new(a), Arc::new(b))
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Arc::new(a))
}

/// Symbolic derivative with respect to `var`.
pub(super) fn differentiate(e: &Expr, var: Var) -> Expr {
    if !e.depends_on(var) {
        return re(0.0);
    }
    let d = |x: &Expr| differentiate(x, var);
    match e {
        Expr::Z | Expr::T => re(1.0),
        Expr::Const(_) | Expr::Param(_) => re(0.0),
        Expr::Neg(a) => neg(d(a)),
        Expr::Add(a, b) => add(d(a), d(b)),
        Expr::Sub(a, b) => sub(d(a), d(b)),
        Expr::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Expr::Div(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            if !b.depends_on(var) {
                return div(d(&a), b);
            }
            // (a'b - ab') / b^2
            div(
                sub(mul(d(&a), b.clone()), mul(a, d(&b))),
                pow(b, re(2.0)),
            )
        }
        Expr::Pow(u, v) => {
            let (u, v) = ((**u).clone(), (**v).clone());
            if !v.depends_on(var) {
                // c·u^(c−1)·u'
                let reduced = match as_const(&v) {
                    Some(x) => c(x - 1.0),
                    None => sub(v.clone(), re(1.0)),
                };
                return mul(mul(v, pow(u.clone(), reduced)), d(&u));
            }
            // u^v · (v' log u + v u'/u)
            let inner = add(
                mul(d(&v), call(Func::Log, u.clone())),
                div(mul(v.clone(), d(&u)), u.clone()),
            );
            mul(Expr::Pow(Arc::new(u), Arc::new(v)), inner)
        }
        Expr::Call(Func::Exp, a) => mul(e.clone(), d(a)),
        Expr::Call(Func::Log, a) => div(d(a), (**a).clone()),
        Expr::Call(Func::Sqrt, a) => div(d(a), mul(re(2.0), e.clone())),
    }
}
