//! Arithmetic expressions in one variable `t`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-'? atom
//! atom   := number | 't' | 'pi' | fn '(' expr ')' | '(' expr ')'
//! fn     := sin | cos | exp | ln | sqrt | abs
//! ```
//!
//! Note that unary minus binds tighter than `^`: `-t^2` is `(-t)^2`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Var,
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Expression node. Equality compares structure only, never spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    fn new(kind: ExprKind, start: usize, end: usize) -> Self {
        Expr {
            kind,
            span: Span { start, end },
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match &self.kind {
            ExprKind::Num(x) => *x,
            ExprKind::Var => t,
            ExprKind::Pi => std::f64::consts::PI,
            ExprKind::Neg(e) => -e.eval(t)?,
            ExprKind::Bin(op, l, r) => {
                let a = l.eval(t)?;
                let b = r.eval(t)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.domain_error("division by zero", t));
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            ExprKind::Call(f, e) => {
                let x = e.eval(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(self.domain_error("ln of a non-positive value", t));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(self.domain_error("sqrt of a negative value", t));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                }
            }
        };
        if v.is_nan() {
            return Err(self.domain_error("undefined value", t));
        }
        Ok(v)
    }

    fn domain_error(&self, what: &str, t: f64) -> Error {
        Error::domain(format!(
            "{what} at t = {t} (bytes {}..{})",
            self.span.start, self.span.end
        ))
    }

    /// True if the expression does not reference `t`.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Pi => true,
            ExprKind::Var => false,
            ExprKind::Neg(e) | ExprKind::Call(_, e) => e.is_constant(),
            ExprKind::Bin(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }
}

/// Fully parenthesized; reparses to a structurally identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(x) => write!(f, "{x:?}"),
            ExprKind::Var => f.write_str("t"),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ExprKind::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected {found}, expected one of: {}", expected.join(", "))]
    Unexpected {
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("malformed number '{0}'")]
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

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
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> std::result::Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token {
                tok,
                start,
                end: i + 1,
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only if followed by digits, so "2exp(t)" lexes as 2, exp
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let x: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::BadNumber(text.to_string()),
            })?;
            out.push(Token {
                tok: Tok::Num(x),
                start,
                end: i,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                start,
                end: i,
            });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError {
            offset: start,
            kind: ParseErrorKind::Unexpected {
                found: format!("character '{ch}'"),
                expected: vec!["number", "'t'", "'pi'", "function", "'('", "'-'"],
            },
        });
    }
    out.push(Token {
        tok: Tok::End,
        start: src.len(),
        end: src.len(),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

const ATOM_START: &[&str] = &["number", "'t'", "'pi'", "function", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        let t = self.peek();
        ParseError {
            offset: t.start,
            kind: ParseErrorKind::Unexpected {
                found: t.tok.describe(),
                expected: expected.to_vec(),
            },
        }
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let (s, e) = (lhs.span.start, rhs.span.end);
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), s, e);
        }
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            let (s, e) = (lhs.span.start, rhs.span.end);
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), s, e);
        }
    }

    fn factor(&mut self) -> std::result::Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            let (s, e) = (base.span.start, exp.span.end);
            return Ok(Expr::new(
                ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)),
                s,
                e,
            ));
        }
        Ok(base)
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            let start = self.bump().start;
            let inner = self.atom()?;
            let end = inner.span.end;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), start, end));
        }
        self.atom()
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        let tok = self.peek();
        let (start, end) = (tok.start, tok.end);
        match tok.tok.clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::new(ExprKind::Num(x), start, end))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.unexpected(&["')'", "operator"]));
                }
                let close = self.bump().end;
                // parentheses are not kept as nodes; the span covers them
                Ok(Expr::new(inner.kind, start, close))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "t" => Ok(Expr::new(ExprKind::Var, start, end)),
                    "pi" => Ok(Expr::new(ExprKind::Pi, start, end)),
                    _ => {
                        let Some(func) = Func::from_name(&name) else {
                            return Err(ParseError {
                                offset: start,
                                kind: ParseErrorKind::UnknownIdentifier(name),
                            });
                        };
                        if self.peek().tok != Tok::LParen {
                            return Err(self.unexpected(&["'('"]));
                        }
                        self.bump();
                        let arg = self.expr()?;
                        if self.peek().tok != Tok::RParen {
                            return Err(self.unexpected(&["')'", "operator"]));
                        }
                        let close = self.bump().end;
                        Ok(Expr::new(ExprKind::Call(func, Box::new(arg)), start, close))
                    }
                }
            }
            _ => Err(self.unexpected(ATOM_START)),
        }
    }
}

/// Parses an expression in `t`.
pub fn parse(src: &str) -> std::result::Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.len() == 1 {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

/// Random well-formed expression, for parser corpora.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    let kind = if leaf {
        match rng.gen_range(0..4) {
            0 => ExprKind::Var,
            1 => ExprKind::Pi,
            2 => ExprKind::Num(rng.gen_range(0..100) as f64 / 4.0),
            _ => ExprKind::Num(rng.gen::<f64>() * 10f64.powi(rng.gen_range(-8..8))),
        }
    } else {
        match rng.gen_range(0..8) {
            0 => ExprKind::Neg(Box::new(random_expr(rng, depth - 1))),
            1 => {
                let f = Func::ALL[rng.gen_range(0..Func::ALL.len())];
                ExprKind::Call(f, Box::new(random_expr(rng, depth - 1)))
            }
            n => {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]
                    [(n as usize - 2) % 5];
                ExprKind::Bin(
                    op,
                    Box::new(random_expr(rng, depth - 1)),
                    Box::new(random_expr(rng, depth - 1)),
                )
            }
        }
    };
    Expr::new(kind, 0, 0)
}
