//! Truncated Taylor expansions at a point.
//!
//! A [`Jet`] carries a value, its gradient and optionally its Hessian with
//! respect to the six patch coordinates. Jets form a ring, so the generic
//! exterior-algebra code (`K`, `F`, wedge, interior) runs on them directly
//! and yields derivatives of the invariants without building field-level
//! expressions. A missing Hessian means the jet is only tracked to first
//! order; mixing the two keeps the second-order part of whichever operand
//! has one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::exterior::DIM;
use crate::scalar::{Field, Rational, Ring};

type Hess<T> = Box<[[T; DIM]; DIM]>;

#[derive(Clone, PartialEq)]
pub struct Jet<T> {
    pub value: T,
    pub grad: [T; DIM],
    pub hess: Option<Hess<T>>,
}

impl<T: fmt::Debug> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet({:?}; {:?})", self.value, self.grad)
    }
}

fn zero_hess<T: Ring>() -> Hess<T> {
    Box::new(std::array::from_fn(|_| std::array::from_fn(|_| T::zero())))
}

impl<T: Field> Jet<T> {
    pub fn constant(value: T) -> Self {
        Jet { value, grad: std::array::from_fn(|_| T::zero()), hess: None }
    }

    /// The coordinate function `x_axis` at a point with that coordinate
    /// equal to `value`.
    pub fn variable(value: T, axis: usize, second_order: bool) -> Self {
        let mut grad: [T; DIM] = std::array::from_fn(|_| T::zero());
        grad[axis] = T::one();
        Jet { value, grad, hess: second_order.then(zero_hess) }
    }

    pub fn with_second_order(mut self) -> Self {
        if self.hess.is_none() {
            self.hess = Some(zero_hess());
        }
        self
    }

    pub fn hess_entry(&self, i: usize, j: usize) -> T {
        self.hess.as_ref().map_or_else(T::zero, |h| h[i][j].clone())
    }

    /// The same jet with the second-order part dropped.
    pub fn first_order(&self) -> Jet<T> {
        Jet { value: self.value.clone(), grad: self.grad.clone(), hess: None }
    }

    /// `∂_axis` of the jet, one order lower.
    pub fn partial(&self, axis: usize) -> Jet<T> {
        Jet {
            value: self.grad[axis].clone(),
            grad: std::array::from_fn(|j| self.hess_entry(axis, j)),
            hess: None,
        }
    }

    /// Directional derivative `Σ v_i ∂_i` of the value.
    pub fn derivative_along(&self, v: &[T]) -> T {
        let mut acc = T::zero();
        for (g, c) in self.grad.iter().zip(v) {
            acc = acc + g.clone() * c.clone();
        }
        acc
    }

    /// Chain rule for `g(self)` given `g`, `g'`, `g''` at the value.
    pub fn compose(&self, g0: T, g1: T, g2: T) -> Jet<T> {
        let grad = std::array::from_fn(|i| g1.clone() * self.grad[i].clone());
        let hess = self.hess.as_ref().map(|h| {
            Box::new(std::array::from_fn(|i| {
                std::array::from_fn(|j| g1.clone() * h[i][j].clone() + g2.clone() * self.grad[i].clone() * self.grad[j].clone())
            }))
        });
        Jet { value: g0, grad, hess }
    }

    fn zip(&self, other: &Jet<T>, f: impl Fn(&T, &T) -> T) -> Jet<T> {
        let hess = match (&self.hess, &other.hess) {
            (None, None) => None,
            (a, b) => Some(Box::new(std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let x = a.as_ref().map_or_else(T::zero, |h| h[i][j].clone());
                    let y = b.as_ref().map_or_else(T::zero, |h| h[i][j].clone());
                    f(&x, &y)
                })
            }))),
        };
        Jet { value: f(&self.value, &other.value), grad: std::array::from_fn(|i| f(&self.grad[i], &other.grad[i])), hess }
    }
}

impl Jet<f64> {
    pub fn powf(&self, e: f64) -> Jet<f64> {
        let u = self.value;
        self.compose(u.powf(e), e * u.powf(e - 1.0), e * (e - 1.0) * u.powf(e - 2.0))
    }

    pub fn cbrt(&self) -> Jet<f64> {
        let c = self.value.cbrt();
        self.compose(c, 1.0 / (3.0 * c * c), -2.0 / (9.0 * c.powi(5)))
    }
}

impl<T: Field> Add for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Jet<T>) -> Jet<T> {
        self.zip(&rhs, |a, b| a.clone() + b.clone())
    }
}

impl<T: Field> Sub for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Jet<T>) -> Jet<T> {
        self.zip(&rhs, |a, b| a.clone() - b.clone())
    }
}

impl<T: Field> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet {
            value: -self.value,
            grad: self.grad.map(|g| -g),
            hess: self.hess.map(|h| Box::new(h.map(|row| row.map(|x| -x)))),
        }
    }
}

impl<T: Field> Mul for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Jet<T>) -> Jet<T> {
        let (a, b) = (&self, &rhs);
        if a.grad.iter().all(Ring::is_zero) && a.hess.is_none() {
            return b.scale(&a.value);
        }
        if b.grad.iter().all(Ring::is_zero) && b.hess.is_none() {
            return a.scale(&b.value);
        }
        let grad = std::array::from_fn(|i| a.value.clone() * b.grad[i].clone() + b.value.clone() * a.grad[i].clone());
        let hess = match (&a.hess, &b.hess) {
            (None, None) => None,
            _ => Some(Box::new(std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    a.value.clone() * b.hess_entry(i, j)
                        + b.value.clone() * a.hess_entry(i, j)
                        + a.grad[i].clone() * b.grad[j].clone()
                        + a.grad[j].clone() * b.grad[i].clone()
                })
            }))),
        };
        Jet { value: a.value.clone() * b.value.clone(), grad, hess }
    }
}

impl<T: Field> Jet<T> {
    pub fn scale(&self, s: &T) -> Jet<T> {
        if s.is_zero() {
            return Jet::constant(T::zero());
        }
        Jet {
            value: self.value.clone() * s.clone(),
            grad: std::array::from_fn(|i| self.grad[i].clone() * s.clone()),
            hess: self.hess.as_ref().map(|h| Box::new(std::array::from_fn(|i| std::array::from_fn(|j| h[i][j].clone() * s.clone())))),
        }
    }
}

impl<T: Field> Ring for Jet<T> {
    fn zero() -> Self {
        Jet::constant(T::zero())
    }

    fn one() -> Self {
        Jet::constant(T::one())
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
            && self.grad.iter().all(Ring::is_zero)
            && self.hess.as_ref().is_none_or(|h| h.iter().flatten().all(Ring::is_zero))
    }

    fn from_i64(n: i64) -> Self {
        Jet::constant(T::from_i64(n))
    }

    fn from_rational(q: &Rational) -> Self {
        Jet::constant(T::from_rational(q))
    }

    fn inverse(&self) -> Option<Self> {
        if self.value.is_zero() {
            return None;
        }
        let inv = T::one() / self.value.clone();
        let d1 = -(inv.clone() * inv.clone());
        let d2 = T::from_i64(2) * inv.clone() * inv.clone() * inv;
        Some(self.compose(T::one() / self.value.clone(), d1, d2))
    }
}
