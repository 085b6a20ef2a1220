//! Parser for the textual notation used for scalars, forms and structure
//! equations.
//!
//! Grammar: `+ - * / ^ ( )`, integer literals, parameter identifiers,
//! basis forms `e12` (one digit per index) or `e{1,10}`, and `sqrt(...)`
//! (numeric evaluation only). In structure-equation mode a bare two-digit
//! literal such as `12` that is not a factor of `*`, `/` or `^` denotes the
//! basis 2-form `e^{12}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exterior::KForm;
use crate::scalars::{Assignment, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at position {pos} in `{input}`")]
    UnexpectedChar { ch: char, pos: usize, input: String },
    #[error("unexpected end of input in `{0}`")]
    UnexpectedEnd(String),
    #[error("unexpected token `{token}` in `{input}`")]
    UnexpectedToken { token: String, input: String },
    #[error("unknown parameter `{name}` in `{input}`")]
    UnknownParameter { name: String, input: String },
    #[error("exponent must be an integer literal in `{0}`")]
    BadExponent(String),
    #[error("form atom `{atom}` not valid in dimension {dim}")]
    BadAtom { atom: String, dim: usize },
    #[error("expected a scalar but `{0}` contains forms")]
    NotScalar(String),
    #[error("forms of different degrees added in `{0}`")]
    MixedDegrees(String),
    #[error("forms can only be multiplied by scalars (`{0}`); use wedge explicitly")]
    FormProduct(String),
    #[error("division by a form or by zero in `{0}`")]
    BadDivision(String),
    #[error("sqrt of {0} is not rational")]
    IrrationalRadical(String),
    #[error("sqrt is only allowed in numeric evaluation (`{0}`)")]
    SymbolicSqrt(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Atom(Vec<usize>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Atom(Vec<usize>),
    Sym(char),
}

fn tokenize(input: &str, bare_atoms: bool) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let next_non_space = |mut j: usize| {
        while j < chars.len() && chars[j].is_whitespace() {
            j += 1;
        }
        chars.get(j).copied()
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let follows_op = matches!(next_non_space(i), Some('*' | '/' | '^'));
            let preceded_by_op = matches!(out.last(), Some(Token::Sym('^')));
            if bare_atoms && digits.len() == 2 && !follows_op && !preceded_by_op {
                out.push(Token::Atom(digits.chars().map(|d| d as usize - '0' as usize).collect()));
            } else {
                out.push(Token::Int(digits.parse().expect("digits")));
            }
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "e" && chars.get(i) == Some(&'{') {
                let close = chars[i..]
                    .iter()
                    .position(|&ch| ch == '}')
                    .ok_or_else(|| ParseError::UnexpectedEnd(input.to_string()))?;
                let inner: String = chars[i + 1..i + close].iter().collect();
                let idx = inner
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ParseError::UnexpectedToken {
                        token: format!("e{{{inner}}}"),
                        input: input.to_string(),
                    })?;
                out.push(Token::Atom(idx));
                i += close + 1;
            } else if word.len() > 1
                && word.starts_with('e')
                && word[1..].chars().all(|ch| ch.is_ascii_digit())
            {
                out.push(Token::Atom(word[1..].chars().map(|d| d as usize - '0' as usize).collect()));
            } else {
                out.push(Token::Ident(word));
            }
        } else if "+-*/^()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar { ch: c, pos: i, input: input.to_string() });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    input: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err_token(&self, t: Option<Token>) -> ParseError {
        match t {
            None => ParseError::UnexpectedEnd(self.input.to_string()),
            Some(t) => ParseError::UnexpectedToken {
                token: match t {
                    Token::Int(i) => i.to_string(),
                    Token::Ident(s) => s,
                    Token::Atom(a) => format!("{a:?}"),
                    Token::Sym(c) => c.to_string(),
                },
                input: self.input.to_string(),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.next() {
                Some(Token::Int(n)) => {
                    let e = n.to_i32().ok_or_else(|| ParseError::BadExponent(self.input.to_string()))?;
                    Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
                }
                _ => Err(ParseError::BadExponent(self.input.to_string())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some(Token::Int(n)) => Ok(Expr::Int(n)),
            Some(Token::Atom(a)) => Ok(Expr::Atom(a)),
            Some(Token::Ident(name)) if name == "sqrt" => {
                if !self.eat('(') {
                    let t = self.next();
                    return Err(self.err_token(t));
                }
                let inner = self.expr()?;
                if !self.eat(')') {
                    let t = self.next();
                    return Err(self.err_token(t));
                }
                Ok(Expr::Sqrt(Box::new(inner)))
            }
            Some(Token::Ident(name)) => Ok(Expr::Var(name)),
            Some(Token::Sym('(')) => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    let t = self.next();
                    return Err(self.err_token(t));
                }
                Ok(inner)
            }
            Some(Token::Sym('-')) => Ok(Expr::Neg(Box::new(self.power()?))),
            t => Err(self.err_token(t)),
        }
    }
}

fn parse_with(input: &str, bare_atoms: bool) -> Result<Expr, ParseError> {
    let tokens = tokenize(input, bare_atoms)?;
    let mut p = Parser { tokens, pos: 0, input };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        let t = p.next();
        return Err(p.err_token(t));
    }
    Ok(e)
}

/// Parses an ordinary expression (`e12` style atoms only).
pub fn parse(input: &str) -> Result<Expr, ParseError> {
    parse_with(input, false)
}

/// Parses one component of a structure-equation string, where bare
/// two-digit literals are basis 2-forms.
pub fn parse_structure(input: &str) -> Result<Expr, ParseError> {
    parse_with(input, true)
}

impl Expr {
    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Int(_) | Expr::Atom(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) => a.collect_identifiers(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_identifiers(out);
                b.collect_identifiers(out);
            }
        }
    }
}

/// Value of an expression: a scalar or a homogeneous form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Scalar(Scalar),
    Form(KForm),
}

struct Evaluator<'a> {
    params: &'a [String],
    dim: Option<usize>,
    input: &'a str,
}

impl Evaluator<'_> {
    fn eval(&self, e: &Expr) -> Result<Value, ParseError> {
        Ok(match e {
            Expr::Int(n) => Value::Scalar(Scalar::from_rational(Rational::from_integer(n.clone()))),
            Expr::Var(v) => {
                if !self.params.iter().any(|p| p == v) {
                    return Err(ParseError::UnknownParameter {
                        name: v.clone(),
                        input: self.input.to_string(),
                    });
                }
                Value::Scalar(Scalar::var(v))
            }
            Expr::Atom(idx) => {
                let dim = self.dim.ok_or_else(|| ParseError::NotScalar(self.input.to_string()))?;
                let atom = crate::exterior::format_basis(dim.max(10), idx);
                let f = KForm::basis(dim, idx).map_err(|_| ParseError::BadAtom { atom, dim })?;
                Value::Form(f)
            }
            Expr::Sqrt(_) => return Err(ParseError::SymbolicSqrt(self.input.to_string())),
            Expr::Neg(a) => match self.eval(a)? {
                Value::Scalar(s) => Value::Scalar(-s),
                Value::Form(f) => Value::Form(f.neg()),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                let y = if matches!(e, Expr::Sub(..)) { neg(y) } else { y };
                match (x, y) {
                    (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
                    (Value::Form(x), Value::Form(y)) => Value::Form(
                        x.try_add(&y).map_err(|_| ParseError::MixedDegrees(self.input.to_string()))?,
                    ),
                    (Value::Scalar(s), Value::Form(f)) | (Value::Form(f), Value::Scalar(s)) => {
                        if s.is_zero() {
                            Value::Form(f)
                        } else if f.is_zero() {
                            Value::Scalar(s)
                        } else {
                            return Err(ParseError::MixedDegrees(self.input.to_string()));
                        }
                    }
                }
            }
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x * &y),
                (Value::Scalar(s), Value::Form(f)) | (Value::Form(f), Value::Scalar(s)) => {
                    Value::Form(f.scale(&s))
                }
                (Value::Form(_), Value::Form(_)) => {
                    return Err(ParseError::FormProduct(self.input.to_string()))
                }
            },
            Expr::Div(a, b) => {
                let Value::Scalar(d) = self.eval(b)? else {
                    return Err(ParseError::BadDivision(self.input.to_string()));
                };
                let inv = d.inv().map_err(|_| ParseError::BadDivision(self.input.to_string()))?;
                match self.eval(a)? {
                    Value::Scalar(x) => Value::Scalar(&x * &inv),
                    Value::Form(f) => Value::Form(f.scale(&inv)),
                }
            }
            Expr::Pow(a, k) => match self.eval(a)? {
                Value::Scalar(s) => Value::Scalar(
                    s.pow(*k).map_err(|_| ParseError::BadDivision(self.input.to_string()))?,
                ),
                Value::Form(_) => return Err(ParseError::FormProduct(self.input.to_string())),
            },
        })
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Scalar(s) => Value::Scalar(-s),
        Value::Form(f) => Value::Form(f.neg()),
    }
}

/// Parses a rational function in the given parameters.
pub fn parse_scalar(input: &str, params: &[String]) -> Result<Scalar, ParseError> {
    let e = parse(input)?;
    match (Evaluator { params, dim: None, input }).eval(&e)? {
        Value::Scalar(s) => Ok(s),
        Value::Form(_) => Err(ParseError::NotScalar(input.to_string())),
    }
}

fn value_to_form(v: Value, dim: usize, degree: usize, input: &str) -> Result<KForm, ParseError> {
    match v {
        Value::Form(f) if f.degree() == degree || f.is_zero() => {
            if f.is_zero() {
                Ok(KForm::zero(dim, degree))
            } else {
                Ok(f)
            }
        }
        Value::Scalar(s) if s.is_zero() => Ok(KForm::zero(dim, degree)),
        Value::Scalar(s) if degree == 0 => Ok(KForm::constant(dim, s)),
        _ => Err(ParseError::MixedDegrees(input.to_string())),
    }
}

/// Parses a homogeneous form of the given degree; `0` is the zero form.
pub fn parse_form(input: &str, dim: usize, degree: usize, params: &[String]) -> Result<KForm, ParseError> {
    let e = parse(input)?;
    let v = (Evaluator { params, dim: Some(dim), input }).eval(&e)?;
    value_to_form(v, dim, degree, input)
}

/// Parses one structure equation `de^k` (a 2-form, bare two-digit atoms).
pub fn parse_structure_component(
    input: &str,
    dim: usize,
    params: &[String],
) -> Result<KForm, ParseError> {
    let e = parse_structure(input)?;
    let v = (Evaluator { params, dim: Some(dim), input }).eval(&e)?;
    value_to_form(v, dim, 2, input)
}

/// Evaluates an expression to a rational number; `sqrt` must be exact.
pub fn eval_rational(input: &str, assignment: &Assignment) -> Result<Rational, ParseError> {
    let e = parse(input)?;
    eval_rational_expr(&e, assignment, input)
}

fn eval_rational_expr(e: &Expr, asg: &Assignment, input: &str) -> Result<Rational, ParseError> {
    Ok(match e {
        Expr::Int(n) => Rational::from_integer(n.clone()),
        Expr::Var(v) => asg
            .get(v)
            .cloned()
            .ok_or_else(|| ScalarError::MissingParameter(v.clone()))?,
        Expr::Atom(_) => return Err(ParseError::NotScalar(input.to_string())),
        Expr::Neg(a) => -eval_rational_expr(a, asg, input)?,
        Expr::Add(a, b) => eval_rational_expr(a, asg, input)? + eval_rational_expr(b, asg, input)?,
        Expr::Sub(a, b) => eval_rational_expr(a, asg, input)? - eval_rational_expr(b, asg, input)?,
        Expr::Mul(a, b) => eval_rational_expr(a, asg, input)? * eval_rational_expr(b, asg, input)?,
        Expr::Div(a, b) => {
            let d = eval_rational_expr(b, asg, input)?;
            if d.is_zero() {
                return Err(ParseError::BadDivision(input.to_string()));
            }
            eval_rational_expr(a, asg, input)? / d
        }
        Expr::Pow(a, k) => {
            let b = eval_rational_expr(a, asg, input)?;
            if *k < 0 && b.is_zero() {
                return Err(ParseError::BadDivision(input.to_string()));
            }
            let mut r = Rational::one();
            for _ in 0..k.unsigned_abs() {
                r *= &b;
            }
            if *k < 0 {
                r.recip()
            } else {
                r
            }
        }
        Expr::Sqrt(a) => {
            let v = eval_rational_expr(a, asg, input)?;
            rational_sqrt(&v).ok_or_else(|| ParseError::IrrationalRadical(crate::scalars::format_rational(&v)))?
        }
    })
}

/// Exact square root of a nonnegative rational, if it is rational.
pub fn rational_sqrt(v: &Rational) -> Option<Rational> {
    if v.is_negative() {
        return None;
    }
    let (n, d) = (v.numer(), v.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn scalar_parsing() {
        let p = params(&["a", "b"]);
        let s = parse_scalar("(a^2+1)/b", &p).unwrap();
        assert_eq!(s.to_string(), "(a^2 + 1)/b");
        assert!(matches!(parse_scalar("c", &p), Err(ParseError::UnknownParameter { .. })));
        assert_eq!(parse_scalar("-1/2", &p).unwrap(), Scalar::from_ratio(-1, 2));
        assert_eq!(parse_scalar("a^-1", &p).unwrap(), Scalar::one() / Scalar::var("a"));
    }

    #[test]
    fn form_parsing() {
        let p = params(&["s"]);
        let f = parse_form("s*(e12+e34) - e13", 4, 2, &p).unwrap();
        assert_eq!(f.coeff(&[1, 3]), Scalar::from_int(-1));
        assert_eq!(f.coeff(&[3, 4]), Scalar::var("s"));
        assert!(parse_form("0", 4, 2, &p).unwrap().is_zero());
        assert!(matches!(parse_form("e12+e1", 4, 2, &p), Err(ParseError::MixedDegrees(_))));
        let big = parse_form("e{1,10}", 10, 2, &p).unwrap();
        assert_eq!(big.coeff(&[1, 10]), Scalar::one());
    }

    #[test]
    fn structure_mode_literals() {
        let p = params(&["l"]);
        let f = parse_structure_component("-2*12", 4, &p).unwrap();
        assert_eq!(f.coeff(&[1, 2]), Scalar::from_int(-2));
        let g = parse_structure_component("1/2*14+24", 4, &p).unwrap();
        assert_eq!(g.coeff(&[1, 4]), Scalar::from_ratio(1, 2));
        assert_eq!(g.coeff(&[2, 4]), Scalar::one());
        let h = parse_structure_component("(1-l)*24", 4, &p).unwrap();
        assert_eq!(h.coeff(&[2, 4]), &Scalar::one() - &Scalar::var("l"));
        assert!(parse_structure_component("0", 4, &p).unwrap().is_zero());
    }

    #[test]
    fn numeric_sqrt() {
        let mut asg = Assignment::new();
        asg.insert("t".into(), Rational::from_integer((-4).into()));
        assert_eq!(eval_rational("sqrt(-1/t)", &asg).unwrap(), Rational::new(1.into(), 2.into()));
        assert!(matches!(eval_rational("sqrt(2)", &asg), Err(ParseError::IrrationalRadical(_))));
    }
}
