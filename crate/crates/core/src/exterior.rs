//! Exterior algebra of a fixed six-dimensional real vector space.
//!
//! Basis covectors are `e^1..e^6`; a [`Blade`] is a set of distinct indices
//! stored as a bitmask, and a [`Form`] is a sparse combination of blades of
//! one grade. Indices are 0-based internally and 1-based in every
//! user-facing constructor and serialization.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{LinearAlgebra, Mat};
use crate::scalar::{Field, Ring};

pub const DIM: usize = 6;

/// Strictly increasing index tuple, stored as a bitmask over `0..6`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u8);

impl Blade {
    pub const EMPTY: Blade = Blade(0);
    pub const VOLUME: Blade = Blade(0b11_1111);

    /// Blade from 0-based indices. Returns `None` on repeated or
    /// out-of-range indices.
    pub fn from_indices(idx: &[usize]) -> Option<Blade> {
        let mut mask = 0u8;
        for &i in idx {
            if i >= DIM || mask & (1 << i) != 0 {
                return None;
            }
            mask |= 1 << i;
        }
        Some(Blade(mask))
    }

    pub fn single(i: usize) -> Blade {
        assert!(i < DIM);
        Blade(1 << i)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// 0-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..DIM).filter(|&i| self.contains(i)).collect()
    }

    pub fn complement(self) -> Blade {
        Blade(!self.0 & Self::VOLUME.0)
    }

    /// All blades of the given grade in lexicographic order.
    pub fn all_of_grade(grade: usize) -> Vec<Blade> {
        let mut out: Vec<Blade> = (0u8..64).map(Blade).filter(|b| b.grade() == grade).collect();
        out.sort();
        out
    }

    /// Sign of `e^self ∧ e^other`, or `None` if the blades overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<i64> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Count pairs (i in self, j in other) with i > j.
        let mut swaps = 0;
        for j in other.indices() {
            swaps += (self.0 >> (j + 1)).count_ones();
        }
        Some(if swaps % 2 == 0 { 1 } else { -1 })
    }

    /// Sign picked up when contracting the index `i` out of the blade:
    /// `ι_{e_i} e^self = sign · e^{self \ i}`.
    pub fn interior_sign(self, i: usize) -> Option<i64> {
        if !self.contains(i) {
            return None;
        }
        let before = (self.0 & ((1u8 << i) - 1)).count_ones();
        Some(if before.is_multiple_of(2) { 1 } else { -1 })
    }

    pub fn without(self, i: usize) -> Blade {
        Blade(self.0 & !(1 << i))
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(&other.indices())
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e")?;
        for i in self.indices() {
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// Sign of the permutation that sorts `idx`, together with the sorted
/// blade; `None` on repeated indices.
pub fn sort_sign(idx: &[usize]) -> Option<(i64, Blade)> {
    let blade = Blade::from_indices(idx)?;
    let mut inversions = 0;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] > idx[b] {
                inversions += 1;
            }
        }
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, blade))
}

/// Vector in `V` in the basis `e_1..e_6` dual to the covectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<S>(pub [S; DIM]);

impl<S: Ring> Vector<S> {
    pub fn zero() -> Self {
        Vector(std::array::from_fn(|_| S::zero()))
    }

    /// Basis vector `e_{i+1}` (0-based `i`).
    pub fn basis(i: usize) -> Self {
        Vector(std::array::from_fn(|k| if k == i { S::one() } else { S::zero() }))
    }

    pub fn from_slice(v: &[S]) -> Self {
        assert_eq!(v.len(), DIM);
        Vector(std::array::from_fn(|k| v[k].clone()))
    }

    pub fn components(&self) -> &[S; DIM] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<S> {
        self.0.to_vec()
    }

    pub fn scale(&self, s: &S) -> Self {
        Vector(std::array::from_fn(|k| self.0[k].clone() * s.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Ring::is_zero)
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Vector<T> {
        Vector(std::array::from_fn(|k| f(&self.0[k])))
    }

    pub fn apply(m: &Mat<S>, v: &Vector<S>) -> Vector<S> {
        Vector::from_slice(&m.apply(&v.0))
    }
}

impl<S: Ring> Add for Vector<S> {
    type Output = Vector<S>;
    fn add(self, rhs: Self) -> Self {
        Vector(std::array::from_fn(|k| self.0[k].clone() + rhs.0[k].clone()))
    }
}

impl<S: Ring> Sub for Vector<S> {
    type Output = Vector<S>;
    fn sub(self, rhs: Self) -> Self {
        Vector(std::array::from_fn(|k| self.0[k].clone() - rhs.0[k].clone()))
    }
}

impl<S: Ring> Neg for Vector<S> {
    type Output = Vector<S>;
    fn neg(self) -> Self {
        Vector(self.0.map(|x| -x))
    }
}

/// Alternating form of fixed grade with sparse coefficients.
#[derive(Clone, PartialEq)]
pub struct Form<S> {
    grade: usize,
    terms: BTreeMap<Blade, S>,
}

impl<S: fmt::Debug> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0[grade {}]", self.grade);
        }
        let mut first = true;
        for (b, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?}){b:?}")?;
        }
        Ok(())
    }
}

impl<S: Ring> Form<S> {
    pub fn zero(grade: usize) -> Self {
        assert!(grade <= DIM, "grade above 6");
        Form { grade, terms: BTreeMap::new() }
    }

    pub fn scalar(s: S) -> Self {
        Form::from_terms(0, [(Blade::EMPTY, s)])
    }

    /// `e^{i1 i2 ...}` with 1-based indices in any order; the permutation
    /// sign is applied. Panics on repeated indices.
    pub fn e(idx: &[usize]) -> Self {
        Form::term(S::one(), idx)
    }

    /// `coeff · e^{idx}` with 1-based indices.
    pub fn term(coeff: S, idx: &[usize]) -> Self {
        let zero_based: Vec<usize> = idx.iter().map(|i| i.checked_sub(1).expect("indices are 1-based")).collect();
        let (sign, blade) = sort_sign(&zero_based).expect("repeated or out-of-range index");
        let c = if sign < 0 { -coeff } else { coeff };
        Form::from_terms(idx.len(), [(blade, c)])
    }

    /// Accumulates terms, pruning zeros. All blades must have `grade`.
    pub fn from_terms(grade: usize, terms: impl IntoIterator<Item = (Blade, S)>) -> Self {
        let mut out = Form::zero(grade);
        for (b, c) in terms {
            out.add_term(b, c);
        }
        out
    }

    /// One-form `Σ c_i e^i` from components.
    pub fn one_form(c: &[S]) -> Self {
        Form::from_terms(1, c.iter().enumerate().map(|(i, x)| (Blade::single(i), x.clone())))
    }

    pub fn add_term(&mut self, blade: Blade, c: S) {
        assert_eq!(blade.grade(), self.grade, "blade grade mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&blade) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(blade, s);
                }
            }
            None => {
                self.terms.insert(blade, c);
            }
        }
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: Blade) -> S {
        self.terms.get(&b).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient at 1-based indices in any order (with permutation sign).
    pub fn coeff_at(&self, idx: &[usize]) -> S {
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        match sort_sign(&zero_based) {
            Some((sign, b)) if b.grade() == self.grade => {
                let c = self.coeff(b);
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
            _ => S::zero(),
        }
    }

    /// Coefficients in the order of [`Blade::all_of_grade`].
    pub fn dense(&self) -> Vec<S> {
        Blade::all_of_grade(self.grade).into_iter().map(|b| self.coeff(b)).collect()
    }

    pub fn scale(&self, s: &S) -> Self {
        Form::from_terms(self.grade, self.terms.iter().map(|(b, c)| (*b, c.clone() * s.clone())))
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Form<T> {
        Form::from_terms(self.grade, self.terms.iter().map(|(b, c)| (*b, f(c))))
    }

    pub fn try_map<T: Ring, E>(&self, f: impl Fn(&S) -> std::result::Result<T, E>) -> std::result::Result<Form<T>, E> {
        let mut out = Form::zero(self.grade);
        for (b, c) in &self.terms {
            out.add_term(*b, f(c)?);
        }
        Ok(out)
    }

    /// Exterior product. Grades summing past 6 give the zero 6-form.
    pub fn wedge(&self, other: &Form<S>) -> Form<S> {
        let grade = self.grade + other.grade;
        if grade > DIM {
            return Form::zero(DIM);
        }
        let mut out = Form::zero(grade);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(sign) = a.wedge_sign(*b) {
                    let prod = ca.clone() * cb.clone();
                    out.add_term(Blade(a.0 | b.0), if sign < 0 { -prod } else { prod });
                }
            }
        }
        out
    }

    /// Interior product `ι_v self`.
    pub fn interior(&self, v: &Vector<S>) -> Result<Form<S>> {
        if self.grade == 0 {
            return Err(Error::Grade { expected: 1, got: 0 });
        }
        let mut out = Form::zero(self.grade - 1);
        for (b, c) in &self.terms {
            for i in b.indices() {
                let vi = &v.0[i];
                if vi.is_zero() {
                    continue;
                }
                let sign = b.interior_sign(i).expect("index present");
                let prod = c.clone() * vi.clone();
                out.add_term(b.without(i), if sign < 0 { -prod } else { prod });
            }
        }
        Ok(out)
    }

    /// Interior product with a basis vector `e_{i+1}`.
    pub fn interior_basis(&self, i: usize) -> Form<S> {
        let mut out = Form::zero(self.grade.saturating_sub(1));
        if self.grade == 0 {
            return out;
        }
        for (b, c) in &self.terms {
            if let Some(sign) = b.interior_sign(i) {
                out.add_term(b.without(i), if sign < 0 { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    /// Pullback by the linear map with matrix `m` acting on `V`:
    /// `(m*a)(v_1, ..) = a(m v_1, ..)`.
    pub fn pullback(&self, m: &Mat<S>) -> Form<S> {
        assert_eq!((m.rows(), m.cols()), (DIM, DIM));
        let images: Vec<Form<S>> = (0..DIM).map(|i| Form::one_form(m.row_vec(i))).collect();
        let mut out = Form::zero(self.grade);
        for (b, c) in &self.terms {
            let mut prod = Form::scalar(c.clone());
            for i in b.indices() {
                prod = prod.wedge(&images[i]);
            }
            out = out + prod;
        }
        out
    }

    /// Evaluates the form on `grade` vectors.
    pub fn evaluate(&self, vs: &[Vector<S>]) -> Result<S> {
        if vs.len() != self.grade {
            return Err(Error::Grade { expected: self.grade, got: vs.len() });
        }
        let mut acc = S::zero();
        for (b, c) in &self.terms {
            let idx = b.indices();
            let m = Mat::from_fn(self.grade, self.grade, |r, s| vs[r].0[idx[s]].clone());
            acc = acc + c.clone() * m.det_cofactor();
        }
        Ok(acc)
    }

    /// Coefficient of the top form `e^{123456}`; zero for other grades.
    pub fn top_coeff(&self) -> S {
        if self.grade == DIM {
            self.coeff(Blade::VOLUME)
        } else {
            S::zero()
        }
    }
}

impl<S: Ring> Add for Form<S> {
    type Output = Form<S>;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.grade, rhs.grade, "adding forms of different grade");
        let mut out = self;
        for (b, c) in rhs.terms {
            out.add_term(b, c);
        }
        out
    }
}

impl<S: Ring> Sub for Form<S> {
    type Output = Form<S>;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Ring> Neg for Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Self {
        Form { grade: self.grade, terms: self.terms.into_iter().map(|(b, c)| (b, -c)).collect() }
    }
}

/// The reference volume form `e^{123456}`.
pub fn volume<S: Ring>() -> Form<S> {
    Form::from_terms(DIM, [(Blade::VOLUME, S::one())])
}

/// The unique `v` with `ι_v e^{123456} = a` for a 5-form `a`.
pub fn five_to_vector<S: Ring>(a: &Form<S>) -> Result<Vector<S>> {
    if a.grade() != 5 {
        return Err(Error::Grade { expected: 5, got: a.grade() });
    }
    let mut v = Vector::zero();
    for (b, c) in a.terms() {
        let missing = b.complement().indices()[0];
        // ι_{e_k} e^{123456} = (-1)^k e^{...without k}, k 0-based.
        v.0[missing] = if missing % 2 == 0 { c.clone() } else { -c.clone() };
    }
    Ok(v)
}

/// Matrix of `v ↦ ι_v a`, rows indexed by blades of grade `k-1`.
pub fn interior_matrix<S: Ring>(a: &Form<S>) -> Mat<S> {
    if a.grade() == 0 {
        return Mat::zeros(1, DIM);
    }
    let rows = Blade::all_of_grade(a.grade() - 1);
    let cols: Vec<Form<S>> = (0..DIM).map(|j| a.interior_basis(j)).collect();
    Mat::from_fn(rows.len(), DIM, |r, c| cols[c].coeff(rows[r]))
}

/// Basis of `ker a = {v : ι_v a = 0}`.
pub fn kernel<S: LinearAlgebra>(a: &Form<S>) -> Vec<Vector<S>> {
    if a.grade() == 0 {
        return (0..DIM).map(Vector::basis).collect();
    }
    S::null_space(&interior_matrix(a)).into_iter().map(|v| Vector::from_slice(&v)).collect()
}

/// `Ann a = {α ∈ V* : α ∧ a = 0}` together with its perp in `V`.
#[derive(Clone, Debug)]
pub struct Annihilator<S> {
    pub covectors: Vec<Vec<S>>,
    pub perp: Vec<Vector<S>>,
}

pub fn annihilator<S: LinearAlgebra>(a: &Form<S>) -> Annihilator<S> {
    let target_grade = (a.grade() + 1).min(DIM);
    let rows = Blade::all_of_grade(target_grade);
    let images: Vec<Form<S>> = (0..DIM).map(|i| Form::from_terms(1, [(Blade::single(i), S::one())]).wedge(a)).collect();
    let m = Mat::from_fn(rows.len(), DIM, |r, c| images[c].coeff(rows[r]));
    let covectors = S::null_space(&m);
    let perp = if covectors.is_empty() {
        (0..DIM).map(Vector::basis).collect()
    } else {
        S::null_space(&Mat::from_rows(covectors.clone())).into_iter().map(|v| Vector::from_slice(&v)).collect()
    };
    Annihilator { covectors, perp }
}

/// Linear automorphism of `V` with its determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<S> {
    matrix: Mat<S>,
    det: S,
}

impl<S: LinearAlgebra> LinearMap<S> {
    pub fn new(matrix: Mat<S>) -> Self {
        assert_eq!((matrix.rows(), matrix.cols()), (DIM, DIM));
        let det = matrix.det();
        LinearMap { matrix, det }
    }

    pub fn identity() -> Self {
        LinearMap::new(Mat::identity(DIM))
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.matrix
    }

    pub fn det(&self) -> &S {
        &self.det
    }

    pub fn is_invertible(&self) -> bool {
        self.det.sign_tol(crate::linalg::RANK_TOL) != Ordering::Equal
    }

    pub fn compose(&self, other: &LinearMap<S>) -> LinearMap<S> {
        LinearMap::new(self.matrix.mul(&other.matrix))
    }

    pub fn pullback(&self, a: &Form<S>) -> Form<S> {
        a.pullback(&self.matrix)
    }

    pub fn apply(&self, v: &Vector<S>) -> Vector<S> {
        Vector::apply(&self.matrix, v)
    }
}

/// Basis labels of `V*` and the fixed reference volume.
#[derive(Clone, Debug)]
pub struct ExteriorContext {
    labels: [String; DIM],
}

impl ExteriorContext {
    /// Labels `e1..e6`.
    pub fn standard() -> Self {
        ExteriorContext { labels: std::array::from_fn(|i| format!("e{}", i + 1)) }
    }

    /// Darboux labels: `dx^j = e^{2j-1}`, `dy^j = e^{2j}`.
    pub fn darboux() -> Self {
        ExteriorContext { labels: ["x1", "y1", "x2", "y2", "x3", "y3"].map(String::from) }
    }

    pub fn with_labels(labels: [&str; DIM]) -> Self {
        ExteriorContext { labels: labels.map(String::from) }
    }

    pub fn labels(&self) -> &[String; DIM] {
        &self.labels
    }

    /// 0-based index of a label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn reference_volume<S: Ring>(&self) -> Form<S> {
        volume()
    }

    /// Human-readable rendering, e.g. `dx1^dy2^dy3`.
    pub fn render<S: Field>(&self, a: &Form<S>) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = a
            .terms()
            .map(|(b, c)| {
                let names: Vec<String> = b.indices().iter().map(|&i| format!("d{}", self.labels[i])).collect();
                format!("({:?})*{}", c, names.join("^"))
            })
            .collect();
        parts.join(" + ")
    }
}

impl Default for ExteriorContext {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_int, Rational};

    type F = Form<Rational>;

    fn q(n: i64) -> Rational {
        rational_int(n)
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(F::e(&[1]).wedge(&F::e(&[2])), F::e(&[1, 2]));
        assert!(F::e(&[1, 2]).wedge(&F::e(&[1, 2])).is_zero());
        assert_eq!(F::e(&[1, 3, 5]).wedge(&F::e(&[2, 4, 6])), -F::e(&[1, 2, 3, 4, 5, 6]));
        let over = F::e(&[1, 2, 3, 4]).wedge(&F::e(&[5, 6, 1]));
        assert_eq!(over.grade(), 6);
        assert!(over.is_zero());
    }

    #[test]
    fn interior_examples() {
        let e1 = Vector::<Rational>::basis(0);
        let e2 = Vector::<Rational>::basis(1);
        assert_eq!(F::e(&[1, 2, 3]).interior(&e1).unwrap(), F::e(&[2, 3]));
        assert_eq!(F::e(&[1, 2, 3]).interior(&e2).unwrap(), -F::e(&[1, 3]));
        assert!(F::scalar(q(1)).interior(&e1).is_err());
    }

    #[test]
    fn pullback_examples() {
        let a = F::e(&[1, 2, 3]) + F::e(&[2, 4, 6]);
        assert_eq!(a.pullback(&Mat::identity(6)), a);
        let mut d = Mat::<Rational>::identity(6);
        d.set(0, 0, q(2));
        assert_eq!(F::e(&[1, 2, 3]).pullback(&d), F::e(&[1, 2, 3]).scale(&q(2)));
        let m = Mat::from_fn(6, 6, |r, c| q(((r * 7 + c * 3) % 5) as i64 - 2 + if r == c { 3 } else { 0 }));
        let det = m.det();
        assert_eq!(volume::<Rational>().pullback(&m), volume::<Rational>().scale(&det));
    }

    #[test]
    fn five_to_vector_examples() {
        assert_eq!(five_to_vector(&F::e(&[2, 3, 4, 5, 6])).unwrap(), Vector::basis(0));
        assert_eq!(five_to_vector(&F::e(&[1, 2, 3, 5, 6])).unwrap(), -Vector::<Rational>::basis(3));
        assert!(five_to_vector(&F::zero(5)).unwrap().is_zero());
        assert!(five_to_vector(&F::e(&[1])).is_err());
    }

    #[test]
    fn kernel_and_annihilator_examples() {
        let a = F::e(&[1, 3, 5]);
        let k = kernel(&a);
        assert_eq!(k.len(), 3);
        for v in &k {
            assert!(v.0[0] == q(0) && v.0[2] == q(0) && v.0[4] == q(0));
        }
        assert_eq!(kernel(&(F::e(&[1, 2, 3]) + F::e(&[4, 5, 6]))).len(), 0);
        assert_eq!(kernel(&F::zero(3)).len(), 6);

        let ann = annihilator(&a);
        assert_eq!((ann.covectors.len(), ann.perp.len()), (3, 3));
        let ann = annihilator(&(F::e(&[1, 2, 3]) + F::e(&[4, 5, 6])));
        assert_eq!((ann.covectors.len(), ann.perp.len()), (0, 6));
        let ann = annihilator(&F::zero(3));
        assert_eq!((ann.covectors.len(), ann.perp.len()), (6, 0));
    }

    #[test]
    fn evaluate_matches_coefficients() {
        let a = F::e(&[1, 3, 5]).scale(&q(3)) - F::e(&[2, 4, 6]);
        let v = |i| Vector::<Rational>::basis(i);
        assert_eq!(a.evaluate(&[v(0), v(2), v(4)]).unwrap(), q(3));
        assert_eq!(a.evaluate(&[v(2), v(0), v(4)]).unwrap(), q(-3));
        assert_eq!(a.evaluate(&[v(1), v(3), v(5)]).unwrap(), q(-1));
    }

    #[test]
    fn blade_order_is_lexicographic() {
        let g2 = Blade::all_of_grade(2);
        assert_eq!(format!("{:?}", g2[0]), "e12");
        assert_eq!(format!("{:?}", g2[5]), "e23");
        assert_eq!(g2.len(), 15);
    }
}
