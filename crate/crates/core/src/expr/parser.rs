use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Expr, Func};

/// Syntax error with position information.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    /// 1-based line.
    pub line: usize,
    /// 1-based column (in characters).
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {} (byte {}): expected {}, found {}",
            self.line,
            self.column,
            self.offset,
            self.expected.join(" | "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let ch = bytes[i];
            if ch.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let tok = match ch {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'0'..=b'9' | b'.' => {
                    i = lx.number_end(i);
                    let text = &src[start..i];
                    let v: f64 = text.parse().map_err(|_| {
                        error_at(src, start, vec!["number".into()], format!("`{text}`"))
                    })?;
                    lx.toks.push((Tok::Num(v), start));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    lx.toks.push((Tok::Ident(src[start..i].to_string()), start));
                    continue;
                }
                _ => {
                    let c = src[i..].chars().next().unwrap();
                    return Err(error_at(
                        src,
                        i,
                        vec!["expression".into()],
                        format!("character `{c}`"),
                    ));
                }
            };
            lx.toks.push((tok, start));
            i += 1;
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }

    fn number_end(&self, mut i: usize) -> usize {
        let b = self.src.as_bytes();
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i < b.len() && b[i] == b'.' {
            i += 1;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            if j < b.len() && b[j].is_ascii_digit() {
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        i
    }
}

fn error_at(src: &str, offset: usize, expected: Vec<String>, found: String) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError {
        offset,
        line,
        column,
        expected,
        found,
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail(&self, expected: &[&str]) -> ParseError {
        let (tok, off) = &self.toks[self.pos];
        error_at(
            self.src,
            *off,
            expected.iter().map(|s| s.to_string()).collect(),
            tok.describe(),
        )
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Arc::new(lhs), Arc::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Arc::new(lhs), Arc::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Arc::new(lhs), Arc::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Arc::new(lhs), Arc::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Arc::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Arc::new(base), Arc::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        const START: [&str; 4] = ["number", "identifier", "`(`", "`-`"];
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(Complex64::new(v, 0.0)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.bump();
                    if *self.peek() != Tok::LParen {
                        return Err(self.fail(&["`(`"]));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, Arc::new(arg)));
                }
                self.bump();
                Ok(match name.as_str() {
                    "z" => Expr::Z,
                    "t" => Expr::T,
                    "i" => Expr::Const(Complex64::new(0.0, 1.0)),
                    _ => Expr::Param(name),
                })
            }
            _ => Err(self.fail(&START)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(&["`)`", "operator"]))
        }
    }
}

/// Parses DSL text into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(error_at(text, 0, vec!["expression".into()], "empty input".into()));
    }
    let toks = Lexer::run(text)?;
    let mut p = Parser { src: text, toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.fail(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_detected() {
        let e = parse("z - a/(1+a*z)").unwrap();
        assert!(e.parameters().contains("a"));
        let e = parse("sqrt((z+1)^2 + alpha)").unwrap();
        assert!(e.parameters().contains("alpha"));
    }

    #[test]
    fn precedence() {
        let e = parse("1/z^(1+k)").unwrap();
        match e {
            Expr::Div(num, den) => {
                assert_eq!(*num, Expr::constant(1.0));
                assert!(matches!(*den, Expr::Pow(_, _)));
            }
            other => panic!("unexpected tree {other:?}"),
        }
        // ^ binds tighter than unary minus and is right-associative
        assert!(matches!(parse("-z^2").unwrap(), Expr::Neg(_)));
        match parse("z^2^3").unwrap() {
            Expr::Pow(b, e) => {
                assert_eq!(*b, Expr::Z);
                assert!(matches!(*e, Expr::Pow(_, _)));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("z^-1").unwrap(), Expr::Pow(_, _)));
        match parse("a - b - c").unwrap() {
            Expr::Sub(l, _) => assert!(matches!(*l, Expr::Sub(_, _))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::constant(1.5e-3));
        // a trailing `e` that is not an exponent starts an identifier
        assert!(matches!(parse("2e").unwrap_err().found.as_str(), "identifier `e`"));
    }

    #[test]
    fn error_positions() {
        let err = parse("z + * 2").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!((err.line, err.column), (1, 5));
        assert!(err.expected.iter().any(|s| s == "number"));

        let err = parse("z +\n  (1").unwrap_err();
        assert_eq!((err.line, err.column), (2, 5));
        assert!(err.expected.iter().any(|s| s == "`)`"));

        let err = parse("exp z").unwrap_err();
        assert_eq!(err.expected, vec!["`(`".to_string()]);
        assert!(parse("   ").is_err());
        assert!(parse("z # 1").unwrap_err().found.contains('#'));
    }
}
