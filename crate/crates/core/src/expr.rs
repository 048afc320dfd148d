//! Scalar expressions over chart coordinates.
//!
//! Grammar (loosest binding first):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := number | coordinate | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sinh | cosh | sqrt
//! ```
//!
//! So `-x1^2` is `-(x1^2)` and `-x1*x2` is `(-x1)*x2`.

use std::fmt;
use std::ops;

use thiserror::Error;

use crate::jet::Jet2;

/// Nesting limit for parsed expressions. Evaluation is recursive, so parsed
/// trees are kept shallow.
pub const MAX_DEPTH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Variables are indices into the coordinate list of the
/// enclosing structure.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainError {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    /// Derivatives of `sqrt` are unbounded at zero.
    SqrtAtZero,
    NegativePowerOfZero,
    NonFinite,
    Arity {
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::DivisionByZero => f.write_str("division by zero"),
            DomainError::LogOfNonPositive => f.write_str("log of non-positive value"),
            DomainError::SqrtOfNegative => f.write_str("sqrt of negative value"),
            DomainError::SqrtAtZero => f.write_str("sqrt is not differentiable at zero"),
            DomainError::NegativePowerOfZero => f.write_str("negative power of zero"),
            DomainError::NonFinite => f.write_str("non-finite result"),
            DomainError::Arity { expected, got } => {
                write!(
                    f,
                    "point has {got} coordinates, expression needs {expected}"
                )
            }
        }
    }
}

/// Evaluation failure together with the point where it happened.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("{kind} at point {point:?}")]
pub struct EvalError {
    pub kind: DomainError,
    pub point: Vec<f64>,
}

/// Parse `text` with the given coordinate names.
pub fn parse<S: AsRef<str>>(text: &str, coords: &[S]) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        coords,
        depth: 0,
    };
    let expr = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != TokenKind::End {
        return Err(ParseError::Syntax {
            offset: tok.offset,
            message: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok(expr)
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn powi(self, k: i32) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Depth of the tree; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// One past the largest variable index used, or 0 for constants.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    /// True if the expression does not mention variable `index`.
    pub fn is_independent_of(&self, index: usize) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(i) => *i != index,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_independent_of(index),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_independent_of(index) && b.is_independent_of(index)
            }
        }
    }

    /// Replace every variable `i` by `values[i]`.
    pub fn substitute(&self, values: &[Expr]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => values[*i].clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(values))),
            Expr::Add(a, b) => Expr::Add(bsub(a, values), bsub(b, values)),
            Expr::Sub(a, b) => Expr::Sub(bsub(a, values), bsub(b, values)),
            Expr::Mul(a, b) => Expr::Mul(bsub(a, values), bsub(b, values)),
            Expr::Div(a, b) => Expr::Div(bsub(a, values), bsub(b, values)),
            Expr::Pow(a, k) => Expr::Pow(bsub(a, values), *k),
            Expr::Call(f, a) => Expr::Call(*f, bsub(a, values)),
        }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        check_arity(self, point)?;
        let v = self.eval_raw(point).map_err(|kind| EvalError {
            kind,
            point: point.to_vec(),
        })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError {
                kind: DomainError::NonFinite,
                point: point.to_vec(),
            })
        }
    }

    fn eval_raw(&self, p: &[f64]) -> Result<f64, DomainError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => p[*i],
            Expr::Neg(a) => -a.eval_raw(p)?,
            Expr::Add(a, b) => a.eval_raw(p)? + b.eval_raw(p)?,
            Expr::Sub(a, b) => a.eval_raw(p)? - b.eval_raw(p)?,
            Expr::Mul(a, b) => a.eval_raw(p)? * b.eval_raw(p)?,
            Expr::Div(a, b) => {
                let num = a.eval_raw(p)?;
                let den = b.eval_raw(p)?;
                if den == 0.0 {
                    return Err(DomainError::DivisionByZero);
                }
                num / den
            }
            Expr::Pow(a, k) => {
                let x = a.eval_raw(p)?;
                if *k < 0 && x == 0.0 {
                    return Err(DomainError::NegativePowerOfZero);
                }
                x.powi(*k)
            }
            Expr::Call(f, a) => {
                let x = a.eval_raw(p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(DomainError::LogOfNonPositive);
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(DomainError::SqrtOfNegative);
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    /// Value, gradient and Hessian at `point`, by second-order forward mode.
    pub fn eval_jet(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        check_arity(self, point)?;
        let jet = self.jet_raw(point).map_err(|kind| EvalError {
            kind,
            point: point.to_vec(),
        })?;
        if jet.is_finite() {
            Ok(jet)
        } else {
            Err(EvalError {
                kind: DomainError::NonFinite,
                point: point.to_vec(),
            })
        }
    }

    fn jet_raw(&self, p: &[f64]) -> Result<Jet2, DomainError> {
        let n = p.len();
        Ok(match self {
            Expr::Const(c) => Jet2::constant(*c, n),
            Expr::Var(i) => Jet2::variable(p[*i], *i, n),
            Expr::Neg(a) => -&a.jet_raw(p)?,
            Expr::Add(a, b) => &a.jet_raw(p)? + &b.jet_raw(p)?,
            Expr::Sub(a, b) => &a.jet_raw(p)? - &b.jet_raw(p)?,
            Expr::Mul(a, b) => &a.jet_raw(p)? * &b.jet_raw(p)?,
            Expr::Div(a, b) => {
                let num = a.jet_raw(p)?;
                let den = b.jet_raw(p)?;
                (&num / &den).ok_or(DomainError::DivisionByZero)?
            }
            Expr::Pow(a, k) => a
                .jet_raw(p)?
                .powi(*k)
                .ok_or(DomainError::NegativePowerOfZero)?,
            Expr::Call(f, a) => {
                let x = a.jet_raw(p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Log => x.ln().ok_or(DomainError::LogOfNonPositive)?,
                    Func::Sqrt => x.sqrt().ok_or(if x.value < 0.0 {
                        DomainError::SqrtOfNegative
                    } else {
                        DomainError::SqrtAtZero
                    })?,
                }
            }
        })
    }

    /// Display with the given coordinate names.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> Display<'a, S> {
        Display { expr: self, names }
    }
}

fn bsub(e: &Expr, values: &[Expr]) -> Box<Expr> {
    Box::new(e.substitute(values))
}

fn check_arity(e: &Expr, point: &[f64]) -> Result<(), EvalError> {
    let need = e.arity();
    if need > point.len() {
        return Err(EvalError {
            kind: DomainError::Arity {
                expected: need,
                got: point.len(),
            },
            point: point.to_vec(),
        });
    }
    Ok(())
}

// Builders with light constant folding, used to assemble derived fields.

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a + b),
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            _ => Expr::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a - b),
            (Some(0.0), _) => -rhs,
            (_, Some(0.0)) => self,
            _ => Expr::Sub(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a * b),
            (Some(0.0), _) | (_, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            _ => Expr::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match rhs.as_const() {
            Some(1.0) => self,
            _ => Expr::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            other => Expr::Neg(Box::new(other)),
        }
    }
}

// Printing. Parenthesization mirrors the grammar, so printing a parsed tree
// and parsing the text again reproduces the same tree.

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

pub struct Display<'a, S> {
    expr: &'a Expr,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for Display<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.names, 0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.arity()).map(|i| format!("x{i}")).collect();
        write_expr(f, self, &names, 0)
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => PREC_UNARY,
        Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => PREC_ATOM,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Add(..) | Expr::Sub(..) => PREC_SUM,
        Expr::Mul(..) | Expr::Div(..) => PREC_PRODUCT,
        Expr::Pow(..) => PREC_POWER,
    }
}

fn write_expr<S: AsRef<str>>(
    f: &mut fmt::Formatter<'_>,
    e: &Expr,
    names: &[S],
    min_prec: u8,
) -> fmt::Result {
    let prec = precedence(e);
    let paren = prec < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match e {
        Expr::Const(c) => write!(f, "{c}")?,
        Expr::Var(i) => match names.get(*i) {
            Some(name) => f.write_str(name.as_ref())?,
            None => write!(f, "x{}", i + 1)?,
        },
        Expr::Neg(a) => {
            f.write_str("-")?;
            write_expr(f, a, names, PREC_UNARY)?;
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(f, a, names, PREC_SUM)?;
            f.write_str(if matches!(e, Expr::Add(..)) {
                " + "
            } else {
                " - "
            })?;
            write_expr(f, b, names, PREC_PRODUCT)?;
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            write_expr(f, a, names, PREC_PRODUCT)?;
            f.write_str(if matches!(e, Expr::Mul(..)) { "*" } else { "/" })?;
            write_expr(f, b, names, PREC_UNARY)?;
        }
        Expr::Pow(a, k) => {
            write_expr(f, a, names, PREC_ATOM)?;
            write!(f, "^{k}")?;
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a, names, 0)?;
            f.write_str(")")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

// Lexer

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
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

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                if !value.is_finite() {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: format!("number `{lit}` is out of range"),
                    });
                }
                tokens.push(Token {
                    kind: TokenKind::Num(value),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        tokens.push(Token {
            kind,
            offset: start,
        });
        i += 1;
    }
    tokens.push(Token {
        kind: TokenKind::End,
        offset: text.len(),
    });
    Ok(tokens)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
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
    i
}

// Parser

struct Parser<'a, S> {
    tokens: Vec<Token>,
    pos: usize,
    coords: &'a [S],
    depth: usize,
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::End {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let tok = self.peek();
        ParseError::Syntax {
            offset: tok.offset,
            message: format!("expected {wanted}, found {}", tok.kind.describe()),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::Syntax {
                offset: self.peek().offset,
                message: format!("expression nested deeper than {MAX_DEPTH}"),
            });
        }
        Ok(())
    }

    fn checked(&self, e: Expr, offset: usize) -> Result<Expr, ParseError> {
        if e.depth() > MAX_DEPTH {
            return Err(ParseError::Syntax {
                offset,
                message: format!("expression nested deeper than {MAX_DEPTH}"),
            });
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let tok = self.peek().clone();
            let add = match tok.kind {
                TokenKind::Plus => true,
                TokenKind::Minus => false,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            let node = if add {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
            lhs = self.checked(node, tok.offset)?;
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let tok = self.peek().clone();
            let mul = match tok.kind {
                TokenKind::Star => true,
                TokenKind::Slash => false,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            let node = if mul {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
            lhs = self.checked(node, tok.offset)?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().kind == TokenKind::Minus {
            self.enter()?;
            self.bump();
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek().kind == TokenKind::Minus {
            self.bump();
            true
        } else {
            false
        };
        let tok = self.peek().clone();
        let k = match tok.kind {
            TokenKind::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => return Err(self.unexpected("integer exponent")),
        };
        self.bump();
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().kind != TokenKind::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.bump();
                if self.peek().kind == TokenKind::LParen {
                    let func = Func::from_name(&name).ok_or(ParseError::UnknownIdentifier {
                        name: name.clone(),
                        offset: tok.offset,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    if self.peek().kind != TokenKind::RParen {
                        return Err(self.unexpected("`)`"));
                    }
                    self.bump();
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match self.coords.iter().position(|c| c.as_ref() == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(ParseError::UnknownIdentifier {
                        name,
                        offset: tok.offset,
                    }),
                }
            }
            _ => Err(self.unexpected("number, coordinate or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C3: [&str; 3] = ["x1", "x2", "x3"];

    #[test]
    fn parses_grammar_examples() {
        let e = parse("sin(x1)+2*x3", &C3).unwrap();
        assert_eq!(e.depth(), 3);
        let p = parse("x1*x1*x3", &C3).unwrap();
        assert!(matches!(p, Expr::Mul(..)));
        assert_eq!(p.eval(&[2.0, 0.0, 5.0]).unwrap(), 20.0);
    }

    #[test]
    fn syntax_error_offset() {
        assert_eq!(
            parse("x1 +", &C3).unwrap_err(),
            ParseError::Syntax {
                offset: 4,
                message: "expected number, coordinate or `(`, found end of input".into()
            }
        );
        assert!(matches!(
            parse("x1 x2", &C3),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse("(x1", &C3),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse("x1 # 2", &C3),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse("x1^1.5", &C3),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert_eq!(parse("  ", &C3), Err(ParseError::Empty));
    }

    #[test]
    fn unknown_identifiers() {
        assert_eq!(
            parse("x1 + y", &C3),
            Err(ParseError::UnknownIdentifier {
                name: "y".into(),
                offset: 5
            })
        );
        assert!(matches!(
            parse("tan(x1)", &C3),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn precedence() {
        let p = [2.0, 3.0, 0.0];
        assert_eq!(parse("-x1^2", &C3).unwrap().eval(&p).unwrap(), -4.0);
        assert_eq!(parse("(-x1)^2", &C3).unwrap().eval(&p).unwrap(), 4.0);
        assert_eq!(parse("x1 - x2 - 1", &C3).unwrap().eval(&p).unwrap(), -2.0);
        assert_eq!(parse("x2/x1/2", &C3).unwrap().eval(&p).unwrap(), 0.75);
        assert_eq!(parse("2*-x1", &C3).unwrap().eval(&p).unwrap(), -4.0);
        assert_eq!(parse("x1^-2", &C3).unwrap().eval(&p).unwrap(), 0.25);
        assert_eq!(parse("1.5e1 + .5", &C3).unwrap().eval(&p).unwrap(), 15.5);
    }

    #[test]
    fn eval_examples_and_domain_errors() {
        let sin = parse("sin(x1)", &C3).unwrap();
        assert_eq!(sin.eval(&[0.0, 9.0, 9.0]).unwrap(), 0.0);
        let inv = parse("1/x2", &C3).unwrap();
        let err = inv.eval(&[1.0, 0.0, 1.0]).unwrap_err();
        assert_eq!(err.kind, DomainError::DivisionByZero);
        assert_eq!(err.point, vec![1.0, 0.0, 1.0]);
        let log = parse("log(x1)", &C3).unwrap();
        assert_eq!(
            log.eval(&[-1.0, 0.0, 0.0]).unwrap_err().kind,
            DomainError::LogOfNonPositive
        );
        let sqrt = parse("sqrt(x1)", &C3).unwrap();
        assert_eq!(sqrt.eval(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(
            sqrt.eval_jet(&[0.0, 0.0, 0.0]).unwrap_err().kind,
            DomainError::SqrtAtZero
        );
        assert_eq!(
            parse("x3", &C3).unwrap().eval(&[1.0]).unwrap_err().kind,
            DomainError::Arity {
                expected: 3,
                got: 1
            }
        );
        assert_eq!(
            parse("exp(exp(x1))", &C3)
                .unwrap()
                .eval(&[10.0, 0.0, 0.0])
                .unwrap_err()
                .kind,
            DomainError::NonFinite
        );
    }

    #[test]
    fn jet_examples() {
        let e = parse("x1*x1*x3", &C3).unwrap();
        let j = e.eval_jet(&[2.0, 0.0, 5.0]).unwrap();
        assert_eq!(j.value, 20.0);
        assert_eq!(j.gradient, vec![20.0, 0.0, 4.0]);
        assert_eq!(
            j.hessian,
            vec![10.0, 0.0, 4.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0]
        );
        let c = parse("7", &C3).unwrap().eval_jet(&[0.3, 0.1, 0.2]).unwrap();
        assert_eq!(c.value, 7.0);
        assert!(c.gradient.iter().chain(&c.hessian).all(|&v| v == 0.0));
    }

    #[test]
    fn exp_jet_matches_central_differences() {
        let e = parse("exp(x3)", &C3).unwrap();
        let p = [0.0, 0.0, 0.1];
        let j = e.eval_jet(&p).unwrap();
        let h = 1e-5;
        let f = |d: f64| e.eval(&[0.0, 0.0, 0.1 + d]).unwrap();
        let fd1 = (f(h) - f(-h)) / (2.0 * h);
        let fd2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        assert!((j.value - 1.105170918).abs() < 1e-9);
        assert!((j.gradient[2] - fd1).abs() < 1e-8);
        // Second difference loses about eps/h^2 to cancellation.
        assert!((j.hess(2, 2) - fd2).abs() < 1e-5);
        assert_eq!(j.value, j.gradient[2]);
        assert_eq!(j.value, j.hess(2, 2));
    }

    #[test]
    fn printing_respects_grammar() {
        for src in [
            "x1 - (x2 - x3)",
            "x1/(x2*x3)",
            "-x1^2",
            "(-x1)^2",
            "--x1",
            "sin(x1 + x2)^3",
            "x1*-x2",
            "2 - -x3",
        ] {
            let e = parse(src, &C3).unwrap();
            let printed = e.display(&C3).to_string();
            assert_eq!(parse(&printed, &C3).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn depth_limit() {
        let deep = "(".repeat(400) + "x1" + &")".repeat(400);
        assert!(matches!(parse(&deep, &C3), Err(ParseError::Syntax { .. })));
        let long = vec!["x1"; 400].join("+");
        assert!(matches!(parse(&long, &C3), Err(ParseError::Syntax { .. })));
        let negs = "-".repeat(400) + "x1";
        assert!(matches!(parse(&negs, &C3), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn builders_fold_constants() {
        let x = Expr::var(0);
        assert_eq!(x.clone() * Expr::constant(0.0), Expr::Const(0.0));
        assert_eq!(x.clone() + Expr::constant(0.0), x);
        assert_eq!(Expr::constant(2.0) * Expr::constant(3.0), Expr::Const(6.0));
        let s = x.substitute(&[Expr::constant(4.0)]);
        assert_eq!(s, Expr::Const(4.0));
    }
}
