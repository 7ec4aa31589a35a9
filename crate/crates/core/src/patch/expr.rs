//! Closed-form numeric coefficient fields.
//!
//! An [`Expr`] is an immutable shared tree built from the coordinates,
//! constants, sums, products, real powers, square and cube roots. Field
//! derivatives ([`Expr::partial`]) are exact for the linear nodes and become
//! central finite-difference nodes otherwise. Pointwise Taylor data
//! ([`Expr::jet`]) is propagated through the tree by the chain rule.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::exterior::DIM;
use crate::scalar::{Rational, Ring};

use super::jet::Jet;
use super::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Neg(Expr),
    Pow(Expr, f64),
    Sqrt(Expr),
    Cbrt(Expr),
    /// Central difference of `inner` along `axis` with step `h`.
    Diff { inner: Expr, axis: usize, h: f64 },
}

#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names()))
    }
}

fn default_names() -> [String; DIM] {
    std::array::from_fn(|i| format!("u{}", i + 1))
}

impl Expr {
    fn node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::node(Node::Const(c))
    }

    pub fn var(axis: usize) -> Expr {
        assert!(axis < DIM);
        Expr::node(Node::Var(axis))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn powf(&self, e: f64) -> Expr {
        if e == 1.0 {
            return self.clone();
        }
        if e == 0.0 {
            return Expr::constant(1.0);
        }
        match self.as_constant() {
            Some(c) => Expr::constant(c.powf(e)),
            None => Expr::node(Node::Pow(self.clone(), e)),
        }
    }

    pub fn sqrt(&self) -> Expr {
        match self.as_constant() {
            Some(c) => Expr::constant(c.sqrt()),
            None => Expr::node(Node::Sqrt(self.clone())),
        }
    }

    pub fn cbrt(&self) -> Expr {
        match self.as_constant() {
            Some(c) => Expr::constant(c.cbrt()),
            None => Expr::node(Node::Cbrt(self.clone())),
        }
    }

    pub fn from_poly(p: &Poly) -> Expr {
        let mut acc = Expr::constant(0.0);
        for (m, c) in p.terms() {
            let mut t = Expr::constant(c.to_f64().unwrap_or(f64::NAN));
            for (axis, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t * Expr::var(axis);
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval(&self, p: &[f64; DIM]) -> f64 {
        match &*self.0 {
            Node::Const(c) => *c,
            Node::Var(i) => p[*i],
            Node::Add(a, b) => a.eval(p) + b.eval(p),
            Node::Mul(a, b) => a.eval(p) * b.eval(p),
            Node::Neg(a) => -a.eval(p),
            Node::Pow(a, e) => a.eval(p).powf(*e),
            Node::Sqrt(a) => a.eval(p).sqrt(),
            Node::Cbrt(a) => a.eval(p).cbrt(),
            Node::Diff { inner, axis, h } => {
                let (mut lo, mut hi) = (*p, *p);
                lo[*axis] -= h;
                hi[*axis] += h;
                (inner.eval(&hi) - inner.eval(&lo)) / (2.0 * h)
            }
        }
    }

    /// Taylor data at `p`. Finite-difference nodes difference the jets of
    /// their argument.
    pub fn jet(&self, p: &[f64; DIM], second_order: bool) -> Jet<f64> {
        match &*self.0 {
            Node::Const(c) => Jet::constant(*c),
            Node::Var(i) => Jet::variable(p[*i], *i, second_order),
            Node::Add(a, b) => a.jet(p, second_order) + b.jet(p, second_order),
            Node::Mul(a, b) => a.jet(p, second_order) * b.jet(p, second_order),
            Node::Neg(a) => -a.jet(p, second_order),
            Node::Pow(a, e) => a.jet(p, second_order).powf(*e),
            Node::Sqrt(a) => a.jet(p, second_order).powf(0.5),
            Node::Cbrt(a) => a.jet(p, second_order).cbrt(),
            Node::Diff { inner, axis, h } => {
                let (mut lo, mut hi) = (*p, *p);
                lo[*axis] -= h;
                hi[*axis] += h;
                (inner.jet(&hi, second_order) - inner.jet(&lo, second_order)).scale(&(1.0 / (2.0 * h)))
            }
        }
    }

    /// Field derivative along `axis`; `h` is the finite-difference step used
    /// for nonlinear nodes.
    pub fn partial(&self, axis: usize, h: f64) -> Expr {
        match &*self.0 {
            Node::Const(_) => Expr::constant(0.0),
            Node::Var(i) => Expr::constant(if *i == axis { 1.0 } else { 0.0 }),
            Node::Add(a, b) => a.partial(axis, h) + b.partial(axis, h),
            Node::Neg(a) => -a.partial(axis, h),
            Node::Mul(a, b) if a.as_constant().is_some() => a.clone() * b.partial(axis, h),
            Node::Mul(a, b) if b.as_constant().is_some() => a.partial(axis, h) * b.clone(),
            _ if !self.depends_on(axis) => Expr::constant(0.0),
            _ => Expr::node(Node::Diff { inner: self.clone(), axis, h }),
        }
    }

    pub fn depends_on(&self, axis: usize) -> bool {
        match &*self.0 {
            Node::Const(_) => false,
            Node::Var(i) => *i == axis,
            Node::Add(a, b) | Node::Mul(a, b) => a.depends_on(axis) || b.depends_on(axis),
            Node::Neg(a) | Node::Pow(a, _) | Node::Sqrt(a) | Node::Cbrt(a) => a.depends_on(axis),
            Node::Diff { inner, .. } => inner.depends_on(axis),
        }
    }

    /// Infix rendering with the given coordinate names.
    pub fn render(&self, names: &[String; DIM]) -> String {
        match &*self.0 {
            Node::Const(c) => format!("{c}"),
            Node::Var(i) => names[*i].clone(),
            Node::Add(a, b) => format!("({} + {})", a.render(names), b.render(names)),
            Node::Mul(a, b) => format!("{}*{}", a.render(names), b.render(names)),
            Node::Neg(a) => format!("-({})", a.render(names)),
            Node::Pow(a, e) => format!("({})^({e})", a.render(names)),
            Node::Sqrt(a) => format!("sqrt({})", a.render(names)),
            Node::Cbrt(a) => format!("cbrt({})", a.render(names)),
            Node::Diff { inner, axis, .. } => format!("d/d{}[{}]", names[*axis], inner.render(names)),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            _ => Expr::node(Node::Add(self, rhs)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match &*self.0 {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => Expr::node(Node::Neg(self)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Expr::constant(0.0),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            (_, Some(_)) => Expr::node(Node::Mul(rhs, self)),
            _ => Expr::node(Node::Mul(self, rhs)),
        }
    }
}

impl Ring for Expr {
    fn zero() -> Self {
        Expr::constant(0.0)
    }

    fn one() -> Self {
        Expr::constant(1.0)
    }

    fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    fn from_i64(n: i64) -> Self {
        Expr::constant(n as f64)
    }

    fn from_rational(q: &Rational) -> Self {
        Expr::constant(q.to_f64().unwrap_or(f64::NAN))
    }

    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.powf(-1.0))
    }
}

/// Parsed closed-form expression, convertible to an exact polynomial when
/// it only uses polynomial operations.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Rational),
    Var(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Call(Function, Box<Ast>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Function {
    Sqrt,
    Cbrt,
}

impl Ast {
    pub fn to_expr(&self) -> Expr {
        match self {
            Ast::Num(q) => Expr::from_rational(q),
            Ast::Var(i) => Expr::var(*i),
            Ast::Add(a, b) => a.to_expr() + b.to_expr(),
            Ast::Sub(a, b) => a.to_expr() - b.to_expr(),
            Ast::Mul(a, b) => a.to_expr() * b.to_expr(),
            Ast::Div(a, b) => a.to_expr() * b.to_expr().powf(-1.0),
            Ast::Neg(a) => -a.to_expr(),
            Ast::Pow(a, b) => {
                let base = a.to_expr();
                match b.to_expr().as_constant() {
                    Some(e) => base.powf(e),
                    // non-constant exponents are rejected by the parser
                    None => unreachable!("exponent must be constant"),
                }
            }
            Ast::Call(Function::Sqrt, a) => a.to_expr().sqrt(),
            Ast::Call(Function::Cbrt, a) => a.to_expr().cbrt(),
        }
    }

    pub fn to_poly(&self) -> Option<Poly> {
        Some(match self {
            Ast::Num(q) => Poly::constant(q.clone()),
            Ast::Var(i) => Poly::var(*i),
            Ast::Add(a, b) => a.to_poly()? + b.to_poly()?,
            Ast::Sub(a, b) => a.to_poly()? - b.to_poly()?,
            Ast::Mul(a, b) => a.to_poly()? * b.to_poly()?,
            Ast::Div(a, b) => a.to_poly()? * b.to_poly()?.inverse()?,
            Ast::Neg(a) => -a.to_poly()?,
            Ast::Pow(a, b) => {
                let e = b.to_poly()?;
                if !e.is_constant() {
                    return None;
                }
                let e = e.constant_term();
                if !e.is_integer() || e.is_negative() {
                    return None;
                }
                let n = e.to_integer().to_u32()?;
                let base = a.to_poly()?;
                (0..n).fold(Poly::one(), |acc, _| acc * base.clone())
            }
            Ast::Call(..) => return None,
        })
    }

    fn is_constant(&self) -> bool {
        match self {
            Ast::Num(_) => true,
            Ast::Var(_) => false,
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) | Ast::Pow(a, b) => a.is_constant() && b.is_constant(),
            Ast::Neg(a) | Ast::Call(_, a) => a.is_constant(),
        }
    }
}

/// Parses infix text such as `1 + (x2^2 + y2^2)/4` or `sqrt(t1^2 + 1)`
/// over the given coordinate names.
pub fn parse(text: &str, names: &[String; DIM]) -> Result<Ast> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, names };
    let ast = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("unexpected trailing input in {text:?}")));
    }
    Ok(ast)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(parse_decimal(&lit)?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad number {lit:?}"));
    let (int, frac) = lit.split_once('.').unwrap_or((lit, ""));
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Rational::new(n, d))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String; DIM],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            if !exp.is_constant() {
                return Err(Error::Parse("exponents must be constant".into()));
            }
            return Ok(Ast::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek().cloned() {
            Some(Token::Num(q)) => {
                self.pos += 1;
                Ok(Ast::Num(q))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "sqrt" => Some(Function::Sqrt),
                    "cbrt" => Some(Function::Cbrt),
                    _ => None,
                };
                if let Some(func) = func {
                    if !self.eat('(') {
                        return Err(Error::Parse(format!("{name} needs an argument")));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::Parse("missing ')'".into()));
                    }
                    return Ok(Ast::Call(func, Box::new(arg)));
                }
                self.names
                    .iter()
                    .position(|n| *n == name)
                    .map(Ast::Var)
                    .ok_or_else(|| Error::Parse(format!("unknown coordinate {name:?}")))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn names() -> [String; DIM] {
        ["x1", "y1", "x2", "y2", "x", "y"].map(String::from)
    }

    #[test]
    fn parses_polynomials_exactly() {
        let ast = parse("1+ (x2^2+y2^2)/4", &names()).unwrap();
        let p = ast.to_poly().unwrap();
        let pt = [0, 0, 2, 1, 0, 0].map(|v| rational(v, 1));
        assert_eq!(p.eval(&pt), rational(9, 4));
        let e = ast.to_expr();
        assert!((e.eval(&[0.0, 0.0, 2.0, 1.0, 0.0, 0.0]) - 2.25).abs() < 1e-15);
        assert_eq!(parse("0.25*x", &names()).unwrap().to_poly().unwrap(), Poly::var(4) * Poly::constant(rational(1, 4)));
    }

    #[test]
    fn non_polynomial_forms() {
        let ast = parse("sqrt(x1^2 + 1) * cbrt(y) - x^(-1/2)", &names()).unwrap();
        assert!(ast.to_poly().is_none());
        let e = ast.to_expr();
        let v = e.eval(&[1.0, 0.0, 0.0, 0.0, 4.0, -8.0]);
        assert!((v - (2.0_f64.sqrt() * -2.0 - 0.5)).abs() < 1e-14);
        assert!(parse("x1^y", &names()).is_err());
        assert!(parse("z + 1", &names()).is_err());
        assert!(parse("(x1", &names()).is_err());
    }

    #[test]
    fn jets_match_finite_differences() {
        let e = parse("sqrt(x1^2 + y1^2 + 1) * cbrt(x + 2)", &names()).unwrap().to_expr();
        let p = [0.3, -0.7, 0.0, 0.0, 0.4, 0.0];
        let j = e.jet(&p, true);
        for axis in [0, 1, 4] {
            let fd = e.partial(axis, 1e-5).eval(&p);
            assert!((j.grad[axis] - fd).abs() < 1e-8, "axis {axis}");
            let fd2 = e.partial(axis, 1e-4).partial(0, 1e-4).eval(&p);
            assert!((j.hess_entry(axis, 0) - fd2).abs() < 1e-5);
        }
        assert_eq!(e.partial(2, 1e-5), Expr::constant(0.0));
    }
}
