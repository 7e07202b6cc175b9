//! A small language for holomorphic functions of `z` and `t`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | 'i' | 'z' | 't' | ident | func '(' expr ')' | '(' expr ')'
//! func    := 'exp' | 'log' | 'sqrt'
//! ```
//!
//! Any other identifier is a named parameter. `log` and `sqrt` use principal
//! branches. There is deliberately no conjugation.

mod diff;
mod parser;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use parser::{parse, ParseError};

/// Exponents within this distance of an integer in `[-16, 16]` are applied
/// by repeated multiplication.
pub const INTEGER_POWER_TOL: f64 = 1e-12;
const MAX_INTEGER_POWER: i32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        match s {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z,
    T,
}

/// Expression tree. Subtrees are reference-counted so derivatives share
/// structure with their source.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Z,
    T,
    Param(String),
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Call(Func, Arc<Expr>),
}

/// Values for `z`, `t` and named parameters.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub z: Option<Complex64>,
    pub t: Option<Complex64>,
    pub params: BTreeMap<String, Complex64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn z(mut self, z: Complex64) -> Self {
        self.z = Some(z);
        self
    }

    pub fn t(mut self, t: f64) -> Self {
        self.t = Some(Complex64::new(t, 0.0));
        self
    }

    pub fn param(mut self, name: impl Into<String>, value: Complex64) -> Self {
        self.params.insert(name.into(), value);
        self
    }
}

fn singular(function: &'static str) -> Error {
    Error::Singularity { function }
}

pub(crate) fn c_log(w: Complex64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(singular("log"));
    }
    Ok(w.ln())
}

pub(crate) fn c_sqrt(w: Complex64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(singular("sqrt"));
    }
    Ok(w.sqrt())
}

pub(crate) fn c_pow(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    let n = exponent.re.round();
    if exponent.im.abs() <= INTEGER_POWER_TOL
        && (exponent.re - n).abs() <= INTEGER_POWER_TOL
        && n.abs() <= MAX_INTEGER_POWER as f64
    {
        let n = n as i32;
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..n.abs() {
            acc *= base;
        }
        return Ok(if n < 0 { acc.inv() } else { acc });
    }
    if base == Complex64::new(0.0, 0.0) {
        if exponent.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(singular("pow"));
    }
    Ok((exponent * base.ln()).exp())
}

impl Expr {
    pub fn constant(re: f64) -> Expr {
        Expr::Const(Complex64::new(re, 0.0))
    }

    /// Named parameters, sorted.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_params(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Const(_) | Expr::Z | Expr::T => {}
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Z => var == Var::Z,
            Expr::T => var == Var::T,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    /// Substitutes every bound parameter by its value.
    pub fn bind(&self, params: &BTreeMap<String, Complex64>) -> Expr {
        match self {
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::Const(*v),
                None => self.clone(),
            },
            Expr::Const(_) | Expr::Z | Expr::T => self.clone(),
            Expr::Neg(a) => Expr::Neg(Arc::new(a.bind(params))),
            Expr::Call(f, a) => Expr::Call(*f, Arc::new(a.bind(params))),
            Expr::Add(a, b) => Expr::Add(Arc::new(a.bind(params)), Arc::new(b.bind(params))),
            Expr::Sub(a, b) => Expr::Sub(Arc::new(a.bind(params)), Arc::new(b.bind(params))),
            Expr::Mul(a, b) => Expr::Mul(Arc::new(a.bind(params)), Arc::new(b.bind(params))),
            Expr::Div(a, b) => Expr::Div(Arc::new(a.bind(params)), Arc::new(b.bind(params))),
            Expr::Pow(a, b) => Expr::Pow(Arc::new(a.bind(params)), Arc::new(b.bind(params))),
        }
    }

    /// Evaluates under full bindings.
    pub fn eval(&self, bindings: &Bindings) -> Result<Complex64> {
        self.eval_with(&|name| bindings.params.get(name).copied(), bindings.z, bindings.t)
    }

    /// Fast path for closed expressions in `z` and `t`.
    pub fn eval_zt(&self, z: Complex64, t: f64) -> Result<Complex64> {
        self.eval_with(&|_| None, Some(z), Some(Complex64::new(t, 0.0)))
    }

    fn eval_with(
        &self,
        lookup: &dyn Fn(&str) -> Option<Complex64>,
        z: Option<Complex64>,
        t: Option<Complex64>,
    ) -> Result<Complex64> {
        let rec = |e: &Expr| e.eval_with(lookup, z, t);
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Z => z.ok_or_else(|| Error::UnboundParameter("z".into()))?,
            Expr::T => t.ok_or_else(|| Error::UnboundParameter("t".into()))?,
            Expr::Param(name) => lookup(name).ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            Expr::Neg(a) => -rec(a)?,
            Expr::Add(a, b) => rec(a)? + rec(b)?,
            Expr::Sub(a, b) => rec(a)? - rec(b)?,
            Expr::Mul(a, b) => rec(a)? * rec(b)?,
            Expr::Div(a, b) => rec(a)? / rec(b)?,
            Expr::Pow(a, b) => c_pow(rec(a)?, rec(b)?)?,
            Expr::Call(Func::Exp, a) => rec(a)?.exp(),
            Expr::Call(Func::Log, a) => c_log(rec(a)?)?,
            Expr::Call(Func::Sqrt, a) => c_sqrt(rec(a)?)?,
        })
    }

    pub fn differentiate(&self, var: Var) -> Expr {
        diff::differentiate(self, var)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Z | Expr::T | Expr::Param(_) => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_at_one_plus_i() {
        let e = parse("z^2").unwrap();
        let v = e.eval(&Bindings::new().z(c(1.0, 1.0))).unwrap();
        assert_eq!(v, c(0.0, 2.0));
    }

    #[test]
    fn rational_example() {
        let e = parse("z - a/(1+a*z)").unwrap();
        let v = e.eval(&Bindings::new().z(c(1.0, 0.0)).param("a", c(2.0, 0.0))).unwrap();
        // independent arithmetic: 1 - 2/3
        let a = c(2.0, 0.0);
        let z = c(1.0, 0.0);
        let oracle = z - a / (1.0 + a * z);
        assert!((v - oracle).norm() < 1e-15);
        assert!((v - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_log_inverse_pair() {
        let e = parse("exp(log(z))").unwrap();
        let v = e.eval_zt(c(2.0, 1.0), 0.0).unwrap();
        assert!((v - c(2.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn unbound_and_singular() {
        let e = parse("a*z").unwrap();
        assert!(matches!(
            e.eval(&Bindings::new().z(c(1.0, 0.0))),
            Err(Error::UnboundParameter(p)) if p == "a"
        ));
        let l = parse("log(z)").unwrap();
        assert!(matches!(l.eval_zt(c(0.0, 0.0), 0.0), Err(Error::Singularity { function: "log" })));
        let s = parse("sqrt(z)").unwrap();
        assert!(matches!(s.eval_zt(c(0.0, 0.0), 0.0), Err(Error::Singularity { function: "sqrt" })));
    }

    #[test]
    fn integer_powers_avoid_branch_cut() {
        let e = parse("z^2").unwrap();
        let z = c(-1.0, -1e-300);
        assert_eq!(e.eval_zt(z, 0.0).unwrap().im, z.im * z.re * 2.0);
        let e = parse("z^(-3)").unwrap();
        let v = e.eval_zt(c(-2.0, 0.0), 0.0).unwrap();
        assert_eq!(v, c(-0.125, 0.0));
        let frac = parse("z^0.5").unwrap().eval_zt(c(4.0, 0.0), 0.0).unwrap();
        assert!((frac - 2.0).norm() < 1e-15);
    }

    #[test]
    fn binding_and_parameters() {
        let e = parse("sqrt((z+1)^2 + alpha) * beta").unwrap();
        let names: Vec<_> = e.parameters().into_iter().collect();
        assert_eq!(names, vec!["alpha".to_string(), "beta".to_string()]);
        let mut params = BTreeMap::new();
        params.insert("alpha".to_string(), c(1.0, 0.0));
        let bound = e.bind(&params);
        assert_eq!(bound.parameters().len(), 1);
        assert!(e.depends_on(Var::Z) && !e.depends_on(Var::T));
    }
}
