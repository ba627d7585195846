//! Rational expressions in named parameters, as they appear in connection
//! coefficients: `(mu+9)`, `(t+1)/4`, `mu*(2*mu+1)/3`, `t^2`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::linalg::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

pub type Assignment = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("parameter `{0}` has no value")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    /// 1-based character column within the parsed text.
    pub column: usize,
    pub message: String,
}

impl Expr {
    pub fn num(r: Rational) -> Self {
        Expr::Num(r)
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn eval(&self, env: &Assignment) -> Result<Rational, EvalError> {
        Ok(match self {
            Expr::Num(r) => r.clone(),
            Expr::Var(v) => env.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.clone()))?,
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval(env)? / d
            }
            Expr::Pow(a, k) => {
                let base = a.eval(env)?;
                (0..*k).fold(Rational::one(), |acc, _| acc * &base)
            }
        })
    }

    /// Parameter names, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(r) if !r.is_integer() => 2,
            Expr::Num(r) if r < &Rational::zero() => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) => 5,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => f.write_str(&format_rational(r)),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_operand(f, 4)
            }
            Expr::Add(a, b) => {
                a.write_operand(f, 1)?;
                f.write_str("+")?;
                b.write_operand(f, 2)
            }
            Expr::Sub(a, b) => {
                a.write_operand(f, 1)?;
                f.write_str("-")?;
                b.write_operand(f, 2)
            }
            Expr::Mul(a, b) => {
                a.write_operand(f, 2)?;
                f.write_str("*")?;
                b.write_operand(f, 3)
            }
            Expr::Div(a, b) => {
                a.write_operand(f, 2)?;
                f.write_str("/")?;
                b.write_operand(f, 5)
            }
            Expr::Pow(a, k) => {
                a.write_operand(f, 5)?;
                write!(f, "^{k}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Int(num_bigint::BigInt),
    Ident(String),
    Op(char),
    Arrow,
    /// Basis token `e3` (`dual = false`) or `e^3` (`dual = true`), 1-based.
    Basis { index: usize, dual: bool },
}

/// Splits `text` into tokens, each tagged with its 0-based char offset.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |column: usize, message: String| ExprError { column: column + 1, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Token::Int(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "e" && chars.get(i) == Some(&'^') {
                i += 1;
                let d0 = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if d0 == i {
                    return Err(err(start, "expected index after `e^`".into()));
                }
                let s: String = chars[d0..i].iter().collect();
                out.push((start, Token::Basis { index: parse_index(&s, start)?, dual: true }));
            } else if let Some(digits) = word.strip_prefix('e').filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())) {
                out.push((start, Token::Basis { index: parse_index(digits, start)?, dual: false }));
            } else {
                out.push((start, Token::Ident(word)));
            }
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((start, Token::Arrow));
            i += 2;
        } else if "+-*/^()".contains(c) {
            out.push((start, Token::Op(c)));
            i += 1;
        } else {
            return Err(err(start, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

fn parse_index(digits: &str, at: usize) -> Result<usize, ExprError> {
    digits.parse().map_err(|_| ExprError {
        column: at + 1,
        message: format!("index `{digits}` is too large"),
    })
}

/// Recursive-descent parser over a token slice. Stops (without error) at a
/// basis token so callers can read `coef e3` terms.
pub(crate) struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end_column: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [(usize, Token)], text_len: usize) -> Self {
        Parser { tokens, pos: 0, end_column: text_len }
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |(c, _)| *c) + 1
    }

    pub(crate) fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError { column: self.column(), message: message.into() }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = fold(if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            });
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = fold(if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(fold(Expr::Neg(Box::new(self.unary()?))));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let col = self.column();
            return match self.next() {
                Some(Token::Int(k)) => {
                    let k: u32 = k.try_into().map_err(|_| ExprError {
                        column: col,
                        message: "exponent too large".into(),
                    })?;
                    Ok(fold(Expr::Pow(Box::new(base), k)))
                }
                _ => Err(ExprError { column: col, message: "expected integer exponent".into() }),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let col = self.column();
        match self.next() {
            Some(Token::Int(n)) => Ok(Expr::Num(Rational::from_integer(n))),
            Some(Token::Ident(v)) => Ok(Expr::Var(v)),
            Some(Token::Op('(')) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::Op(')')) => Ok(e),
                    _ => Err(ExprError { column: self.column_before(), message: "expected `)`".into() }),
                }
            }
            Some(Token::Basis { .. }) => {
                self.pos -= 1;
                Err(ExprError { column: col, message: "expected coefficient before basis vector".into() })
            }
            Some(Token::Op(c)) => Err(ExprError { column: col, message: format!("unexpected `{c}`") }),
            Some(Token::Arrow) => Err(ExprError { column: col, message: "unexpected `->`".into() }),
            None => Err(ExprError { column: col, message: "unexpected end of expression".into() }),
        }
    }

    fn column_before(&self) -> usize {
        self.tokens
            .get(self.pos.saturating_sub(1))
            .map_or(self.end_column, |(c, _)| *c)
            + 1
    }
}

/// Constant folding, so that `-1/2` parses to a single number.
fn fold(e: Expr) -> Expr {
    use Expr::*;
    match e {
        Neg(a) => match *a {
            Num(r) => Num(-r),
            other => Neg(Box::new(other)),
        },
        Add(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x + y),
            (x, y) => Add(Box::new(x), Box::new(y)),
        },
        Sub(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x - y),
            (x, y) => Sub(Box::new(x), Box::new(y)),
        },
        Mul(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x * y),
            (x, y) => Mul(Box::new(x), Box::new(y)),
        },
        Div(a, b) => match (*a, *b) {
            (Num(x), Num(y)) if !y.is_zero() => Num(x / y),
            (x, y) => Div(Box::new(x), Box::new(y)),
        },
        Pow(a, k) => match *a {
            Num(x) => Num((0..k).fold(Rational::one(), |acc, _| acc * &x)),
            other => Pow(Box::new(other), k),
        },
        other => other,
    }
}

/// Parses a complete expression.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text.chars().count());
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}
