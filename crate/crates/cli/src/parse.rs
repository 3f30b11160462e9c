//! The expression DSL and the series literal form.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! atom    := integer | name | name '(' sum ')' | name '^(' int ')(' sum ')' | '(' sum ')'
//! ```
//!
//! In series context `xi` is the symbol of `D_x`, `O(xi^k)` declares every
//! exponent at or below `k` unknown and `*` is composition.

use std::fmt;

use jetcalc::expr::Generator;
use jetcalc::{JetExpr, PsdSeries};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at line {}, column {}: ", self.line, self.column)?;
        match self.expected.len() {
            0 => return f.write_str(&self.found),
            1 => write!(f, "expected {}, ", self.expected[0])?,
            _ => write!(f, "expected one of {}, ", self.expected.join(", "))?,
        }
        write!(f, "found {}", self.found)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Bad(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Name(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Bad(c) => format!("'{c}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
            }
            Tok::Num(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
                // u_{5x}, u_{5}x, u_t{2}x
                if (s == "u_" || s == "u_t") && i < chars.len() && chars[i] == '{' {
                    while i < chars.len() && chars[i] != '}' {
                        s.push(chars[i]);
                        advance(&mut i, &mut line, &mut col);
                    }
                    if i < chars.len() {
                        s.push('}');
                        advance(&mut i, &mut line, &mut col);
                    }
                }
            }
            while i < chars.len() && chars[i] == '\'' {
                s.push('\'');
                advance(&mut i, &mut line, &mut col);
            }
            Tok::Name(s)
        } else {
            advance(&mut i, &mut line, &mut col);
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => Tok::Bad(other),
            }
        };
        out.push(Token { tok, line: l0, column: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    out
}

/// Number of `x` derivatives in a jet suffix: `x`, `xx`, `5x`, `{5x}`, `{5}x`, `{xx}`.
fn x_count(s: &str) -> Option<u32> {
    let s: String = s.chars().filter(|c| *c != '{' && *c != '}').collect();
    if s.is_empty() {
        return Some(0);
    }
    if s.chars().all(|c| c == 'x') {
        return u32::try_from(s.len()).ok();
    }
    let digits = s.strip_suffix('x')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn jet_generator(name: &str) -> Option<Generator> {
    if name == "u" {
        return Some(Generator::Jet(0));
    }
    let rest = name.strip_prefix("u_")?;
    if let Some(tail) = rest.strip_prefix('t') {
        return x_count(tail).map(Generator::JetT);
    }
    match x_count(rest)? {
        0 => None,
        k => Some(Generator::Jet(k)),
    }
}

/// The value domain a parse produces.
trait Value: Sized + Clone {
    fn from_expr(e: JetExpr) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self, prec: usize) -> Self;
    fn div(&self, other: &Self) -> Result<Self, String>;
    fn pow(&self, k: i64, prec: usize) -> Result<Self, String>;
    /// `xi` and `O(...)` in series context.
    fn special(p: &mut Parser, name: &str) -> Result<Option<Self>, SyntaxError>;
    fn as_expr(&self) -> Option<JetExpr>;
}

impl Value for JetExpr {
    fn from_expr(e: JetExpr) -> Self {
        e
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self, _: usize) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Result<Self, String> {
        self.checked_div(other).map_err(|e| e.to_string())
    }
    fn pow(&self, k: i64, _: usize) -> Result<Self, String> {
        let k = i32::try_from(k).map_err(|_| "exponent out of range".to_string())?;
        self.powi(k).map_err(|e| e.to_string())
    }
    fn special(_: &mut Parser, _: &str) -> Result<Option<Self>, SyntaxError> {
        Ok(None)
    }
    fn as_expr(&self) -> Option<JetExpr> {
        Some(self.clone())
    }
}

fn scalar_of(s: &PsdSeries) -> Option<JetExpr> {
    if !s.is_exact() {
        return None;
    }
    let mut terms = s.terms();
    match (terms.next(), terms.next()) {
        (None, _) => Some(JetExpr::zero()),
        (Some((0, c)), None) => Some(c.clone()),
        _ => None,
    }
}

impl Value for PsdSeries {
    fn from_expr(e: JetExpr) -> Self {
        PsdSeries::constant(e)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self, prec: usize) -> Self {
        self.compose_prec(other, prec)
    }
    fn div(&self, other: &Self) -> Result<Self, String> {
        let c = scalar_of(other).ok_or("series can only be divided by a coefficient")?;
        let inv = c.recip().map_err(|e| e.to_string())?;
        Ok(self.scale(&inv))
    }
    fn pow(&self, k: i64, prec: usize) -> Result<Self, String> {
        if *self == PsdSeries::xi(1) {
            return Ok(PsdSeries::xi(k));
        }
        if let Some(c) = scalar_of(self) {
            return <JetExpr as Value>::pow(&c, k, prec).map(PsdSeries::constant);
        }
        let k = u32::try_from(k).map_err(|_| "negative powers are only allowed for xi".to_string())?;
        Ok(self.power_prec(k, prec))
    }
    fn special(p: &mut Parser, name: &str) -> Result<Option<Self>, SyntaxError> {
        match name {
            "xi" => Ok(Some(PsdSeries::xi(1))),
            "O" if p.peek() == &Tok::LParen => {
                let at = p.pos;
                p.bump();
                let inner: PsdSeries = p.sum()?;
                p.expect(Tok::RParen)?;
                let mut terms = inner.terms();
                match (terms.next(), terms.next()) {
                    (Some((k, c)), None) if c.is_one() && inner.is_exact() => {
                        Ok(Some(PsdSeries::zero().truncated(k + 1)))
                    }
                    _ => Err(p.error_at(at, vec!["xi^k inside O(...)".into()])),
                }
            }
            _ => Ok(None),
        }
    }
    fn as_expr(&self) -> Option<JetExpr> {
        scalar_of(self)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    prec: usize,
    depth: usize,
}

/// Bounds on nesting and on `^` so hostile input cannot exhaust the stack or
/// ask for an astronomically large expansion.
const MAX_DEPTH: usize = 200;
const MAX_EXPONENT: i64 = 64;

const OPERAND: [&str; 4] = ["number", "identifier", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, pos: usize, expected: Vec<String>) -> SyntaxError {
        let t = &self.toks[pos];
        SyntaxError { line: t.line, column: t.column, expected, found: t.tok.describe() }
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        self.error_at(self.pos, expected.iter().map(|s| s.to_string()).collect())
    }

    fn message(&self, pos: usize, msg: impl Into<String>) -> SyntaxError {
        let t = &self.toks[pos];
        SyntaxError { line: t.line, column: t.column, expected: vec![], found: msg.into() }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let mut exp = vec![tok.describe()];
            if tok == Tok::RParen {
                exp.extend(["'+'", "'-'", "'*'", "'/'", "'^'"].map(String::from));
            }
            Err(self.error_at(self.pos, exp))
        }
    }

    fn sum<V: Value>(&mut self) -> Result<V, SyntaxError> {
        let mut acc: V = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product<V: Value>(&mut self) -> Result<V, SyntaxError> {
        let mut acc: V = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.unary()?, self.prec);
                }
                Tok::Slash => {
                    let at = self.pos;
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs).map_err(|m| self.message(at, m))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<V: Value>(&mut self) -> Result<V, SyntaxError> {
        if self.depth == MAX_DEPTH {
            return Err(self.message(self.pos, format!("nesting deeper than {MAX_DEPTH}")));
        }
        self.depth += 1;
        let v = if *self.peek() == Tok::Minus {
            self.bump();
            self.unary::<V>().map(|v| v.neg())
        } else {
            self.power()
        };
        self.depth -= 1;
        v
    }

    fn exponent(&mut self) -> Result<i64, SyntaxError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let at = self.pos;
        let Tok::Num(n) = self.bump() else { return Err(self.error_at(at, vec!["integer exponent".into()])) };
        let n = i64::try_from(n).map_err(|_| self.message(at, "exponent out of range"))?;
        if paren {
            self.expect(Tok::RParen)?;
        }
        Ok(if neg { -n } else { n })
    }

    fn power<V: Value>(&mut self) -> Result<V, SyntaxError> {
        let base: V = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let at = self.pos;
        self.bump();
        let k = self.exponent()?;
        if k.abs() > MAX_EXPONENT {
            return Err(self.message(at, format!("exponent beyond {MAX_EXPONENT}")));
        }
        base.pow(k, self.prec).map_err(|m| self.message(at, m))
    }

    /// `name^(k)(` ahead: an explicit derivative order.
    fn derivative_order(&mut self) -> Result<Option<i32>, SyntaxError> {
        let signed = matches!(self.peek_at(2), Tok::Minus);
        let num = if signed { 3 } else { 2 };
        let shape = *self.peek() == Tok::Caret
            && *self.peek_at(1) == Tok::LParen
            && matches!(self.peek_at(num), Tok::Num(_))
            && *self.peek_at(num + 1) == Tok::RParen
            && *self.peek_at(num + 2) == Tok::LParen;
        if !shape {
            return Ok(None);
        }
        self.bump();
        let at = self.pos;
        let k = self.exponent()?;
        i32::try_from(k).map(Some).map_err(|_| self.message(at, "derivative order out of range"))
    }

    fn atom<V: Value>(&mut self) -> Result<V, SyntaxError> {
        let at = self.pos;
        match self.bump() {
            Tok::Num(n) => Ok(V::from_expr(JetExpr::rational(n.into()))),
            Tok::LParen => {
                let v = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            Tok::Name(name) => {
                if let Some(v) = V::special(self, &name)? {
                    return Ok(v);
                }
                self.named(&name, at).map(V::from_expr)
            }
            _ => Err(self.error_at(at, OPERAND.map(String::from).to_vec())),
        }
    }

    fn named(&mut self, raw: &str, at: usize) -> Result<JetExpr, SyntaxError> {
        let primes = raw.chars().rev().take_while(|c| *c == '\'').count();
        let name = &raw[..raw.len() - primes];
        let explicit = self.derivative_order()?;
        if primes > 0 && explicit.is_some() {
            return Err(self.message(at, "both primes and an explicit derivative order"));
        }
        let order = explicit.unwrap_or(primes as i32);
        if *self.peek() == Tok::LParen {
            self.bump();
            let arg_at = self.pos;
            let arg: JetExpr = self.sum()?;
            self.expect(Tok::RParen)?;
            return self.call(name, order, &arg, at, arg_at);
        }
        if order != 0 {
            return Err(self.error_at(self.pos, vec!["'('".into()]));
        }
        if let Some(g) = jet_generator(name) {
            return Ok(JetExpr::gen(g));
        }
        if name.starts_with("u_") {
            return Err(self.message(at, format!("'{name}' is not a jet variable")));
        }
        Ok(match name {
            "x" => JetExpr::x(),
            "t" => JetExpr::t(),
            "xi" | "O" => return Err(self.message(at, format!("'{name}' is only allowed in series"))),
            _ => JetExpr::param(name),
        })
    }

    fn call(&self, name: &str, order: i32, arg: &JetExpr, at: usize, arg_at: usize) -> Result<JetExpr, SyntaxError> {
        let reserved = ["u", "x", "t", "xi", "O"];
        if reserved.contains(&name) || name.starts_with("u_") {
            return Err(self.message(at, format!("'{name}' is not a function")));
        }
        if name == "ln" {
            if order != 0 {
                return Err(self.message(at, "ln cannot carry a derivative order"));
            }
            let shift = (arg - &JetExpr::u()).generators();
            return match shift.iter().next() {
                Some(Generator::Param(c)) if shift.len() == 1 && (arg - &JetExpr::u()) == JetExpr::param(c) => {
                    Ok(JetExpr::gen(Generator::log(c)))
                }
                _ => Err(self.message(arg_at, "ln takes u + <parameter>")),
            };
        }
        if *arg == JetExpr::t() {
            if order < 0 {
                return Err(self.message(at, "functions of t take nonnegative orders"));
            }
            return Ok(JetExpr::unknown_t(name, order as u32));
        }
        if *arg != JetExpr::u() {
            return Err(self.message(arg_at, "function arguments must be u or t"));
        }
        Ok(match name {
            "r" => JetExpr::fn_sym("f", order - 1),
            "rhat" => JetExpr::fn_sym("f", order - 2),
            _ => JetExpr::fn_sym(name, order),
        })
    }

    fn finish<V: Value>(&mut self) -> Result<V, SyntaxError> {
        let v = self.sum()?;
        if *self.peek() != Tok::Eof {
            let exp = ["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"];
            return Err(self.error(&exp));
        }
        Ok(v)
    }
}

fn parser(src: &str, prec: usize) -> Parser {
    Parser { toks: lex(src), pos: 0, prec, depth: 0 }
}

/// Parses a differential function.
pub fn parse_expr(src: &str) -> Result<JetExpr, SyntaxError> {
    parser(src, 0).finish()
}

/// Parses a pseudodifferential series; compositions keep `prec` slots.
pub fn parse_series(src: &str, prec: usize) -> Result<PsdSeries, SyntaxError> {
    parser(src, prec).finish()
}

/// A series literal that must be a plain coefficient, e.g. for `frechet`.
pub fn series_as_expr(s: &PsdSeries) -> Option<JetExpr> {
    s.as_expr()
}
