//! Exact polynomial coefficient fields in the six patch coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::DIM;
use crate::scalar::{format_rational, parse_rational, Field, Rational, Ring};

use super::jet::Jet;

pub type Monomial = [u8; DIM];

/// Polynomial with rational coefficients, stored sparsely by exponent
/// vector. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", format_rational(c))?;
            for (i, e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*u{}", i + 1)?,
                    _ => write!(f, "*u{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn constant(c: Rational) -> Poly {
        Poly::monomial([0; DIM], c)
    }

    /// The coordinate function of axis `i` (0-based).
    pub fn var(i: usize) -> Poly {
        let mut m = [0; DIM];
        m[i] = 1;
        Poly::monomial(m, <Rational as Ring>::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.iter().map(|&e| e as usize).sum()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&[0; DIM]).cloned().unwrap_or_else(<Rational as Ring>::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(<Rational as Ring>::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn partial(&self, axis: usize) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            if m[axis] == 0 {
                continue;
            }
            let mut m2 = *m;
            m2[axis] -= 1;
            out.add_term(m2, c * Rational::from_integer(m[axis].into()));
        }
        out
    }

    /// Evaluation in any field the rationals embed into.
    pub fn eval<S: Ring>(&self, p: &[S; DIM]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (x, &e) in p.iter().zip(m) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Exact Taylor data at `p` to first or second order.
    pub fn jet<S: Field>(&self, p: &[S; DIM], second_order: bool) -> Jet<S> {
        let value = self.eval(p);
        let grad = std::array::from_fn(|i| self.partial(i).eval(p));
        let mut jet = Jet { value, grad, hess: None };
        if second_order {
            jet = jet.with_second_order();
            if let Some(h) = jet.hess.as_mut() {
                for i in 0..DIM {
                    let di = self.partial(i);
                    for j in i..DIM {
                        let v = di.partial(j).eval(p);
                        h[i][j] = v.clone();
                        h[j][i] = v;
                    }
                }
            }
        }
        jet
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| PolyTermJson { monomial: *m, coeff: format_rational(c) })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Poly> {
        let mut out = Poly::default();
        for t in &j.terms {
            let c = parse_rational(&t.coeff).ok_or_else(|| Error::Parse(format!("bad rational coefficient {:?}", t.coeff)))?;
            out.add_term(t.monomial, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub monomial: Monomial,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<PolyTermJson>,
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    // monomial exponents add
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = std::array::from_fn(|i| ma[i] + mb[i]);
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn one() -> Self {
        Poly::constant(<Rational as Ring>::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn from_i64(n: i64) -> Self {
        Poly::constant(Rational::from_integer(n.into()))
    }

    fn from_rational(q: &Rational) -> Self {
        Poly::constant(q.clone())
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_constant() && !self.is_zero() {
            Some(Poly::constant(self.constant_term().recip()))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, rational_int};

    #[test]
    fn arithmetic_and_derivatives() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.clone() * x.clone() * y.clone() + Poly::from_i64(3);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.partial(0), Poly::from_i64(2) * x.clone() * y.clone());
        assert_eq!(p.partial(2), Poly::zero());
        let pt = [rational_int(2), rational(1, 2), rational_int(0), rational_int(0), rational_int(0), rational_int(0)];
        assert_eq!(p.eval(&pt), rational_int(5));
        let j = p.jet(&pt, true);
        assert_eq!(j.grad[0], rational_int(2));
        assert_eq!(j.hess_entry(0, 1), rational_int(4));
        assert!((x.clone() - x).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let p = Poly::var(2) * Poly::constant(rational(-3, 7)) + Poly::one();
        let back = Poly::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let text = serde_json::to_string(&p.to_json()).unwrap();
        assert!(text.contains("\"monomial\":[0,0,1,0,0,0]"));
        assert!(text.contains("\"coeff\":\"-3/7\""));
    }
}
