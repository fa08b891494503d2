//! Expression grammar shared by every command.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? INT)?
//! atom  := INT | IDENT | 'O' '(' INT ')' | 'exp' '(' expr ',' INT ')' | '(' expr ')'
//! ```
//!
//! Identifiers are letters, digits, `_` and `'`, starting with a letter.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Symbol(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// `O(d)`: everything of degree `d` and beyond is unknown.
    BigO(u32),
    /// `exp(e, n)`: the prefix `Σ_{k ≤ n} e^k / k!`.
    Exp(Box<Expr>, u32),
}

impl Expr {
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Symbol(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a, _) => a.symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
            Expr::Int(_) | Expr::BigO(_) => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Symbol(s) => write!(f, "{s}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, k) => match **a {
                Expr::Int(_) | Expr::Symbol(_) => write!(f, "{a}^{k}"),
                _ => write!(f, "({a})^{k}"),
            },
            Expr::BigO(d) => write!(f, "O({d})"),
            Expr::Exp(a, n) => write!(f, "exp({a}, {n})"),
        }
    }
}

/// Names an expression may mention besides `O` and `exp`.
#[derive(Clone, Debug, Default)]
pub struct Symbols(BTreeSet<String>);

impl Symbols {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Symbols(names.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut pos = Pos { line: 1, column: 1 };
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let here = pos;
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                pos.line += 1;
                pos.column = 1;
            } else {
                pos.column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while chars.peek().is_some_and(char::is_ascii_digit) {
                s.push(bump(&mut chars));
            }
            out.push((Tok::Int(s.parse().unwrap()), here));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while chars
                .peek()
                .is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
            {
                s.push(bump(&mut chars));
            }
            out.push((Tok::Ident(s), here));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => return Err(syntax(here, format!("unexpected character `{c}`"))),
        };
        bump(&mut chars);
        out.push((tok, here));
    }
    out.push((Tok::End, pos));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    symbols: &'a Symbols,
    open: Vec<Pos>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self) -> Error {
        match (self.peek(), self.open.last()) {
            (Tok::End, Some(&p)) => syntax(p, "unclosed `(`"),
            (t, _) => syntax(self.pos(), format!("unexpected {t}")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.next();
                    acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn small_int(&mut self, what: &str) -> Result<(BigInt, Pos)> {
        match self.next() {
            (Tok::Int(n), p) => Ok((n, p)),
            (_, _) => {
                self.at -= 1;
                let e = self.unexpected();
                Err(match e {
                    Error::Syntax {
                        line,
                        column,
                        message,
                    } => Error::Syntax {
                        line,
                        column,
                        message: format!("{message}, expected {what}"),
                    },
                    e => e,
                })
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let negative = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let (n, p) = self.small_int("an integer exponent")?;
        let k = n.to_i64().ok_or_else(|| syntax(p, "exponent too large"))?;
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(Expr::Int(n))
            }
            Tok::LParen => {
                self.next();
                self.open.push(pos);
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                self.open.pop();
                Ok(e)
            }
            Tok::Ident(name)
                if (name == "O" || name == "exp") && self.toks[self.at + 1].0 == Tok::LParen =>
            {
                self.next();
                self.next();
                self.open.push(pos);
                let e = if name == "O" {
                    let (d, p) = self.small_int("a truncation degree")?;
                    match d.to_u32() {
                        Some(d) if d >= 1 => Expr::BigO(d),
                        _ => return Err(syntax(p, "O(d) needs 1 <= d < 2^32")),
                    }
                } else {
                    let arg = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let (n, p) = self.small_int("a number of terms")?;
                    let n = n.to_u32().ok_or_else(|| syntax(p, "too many terms"))?;
                    Expr::Exp(Box::new(arg), n)
                };
                self.expect(Tok::RParen)?;
                self.open.pop();
                Ok(e)
            }
            Tok::Ident(name) => {
                if !self.symbols.contains(&name) {
                    return Err(Error::UnknownIdentifier {
                        name,
                        line: pos.line,
                        column: pos.column,
                    });
                }
                self.next();
                Ok(Expr::Symbol(name))
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parse `input`, resolving identifiers against `symbols`.
pub fn parse(input: &str, symbols: &Symbols) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(input)?,
        at: 0,
        symbols,
        open: Vec::new(),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

/// Identifiers of `input` in order of first appearance, except `O` and
/// `exp` used as calls. Lexical errors surface here as well.
pub fn identifiers(input: &str) -> Result<Vec<String>> {
    let toks = lex(input)?;
    let mut out: Vec<String> = Vec::new();
    for (k, (t, _)) in toks.iter().enumerate() {
        if let Tok::Ident(s) = t {
            let call =
                (s == "O" || s == "exp") && toks.get(k + 1).is_some_and(|n| n.0 == Tok::LParen);
            if !call && !out.contains(s) {
                out.push(s.clone());
            }
        }
    }
    Ok(out)
}
