//! The equivariant polynomials `K`, `F`, `Q` of a 3-form, primitivity, the
//! bilinear form `q(ω, φ)` and the four natural subspaces of `V`.
//!
//! `K`, `F` and `Q` take values in tensor powers of the line `Λ⁶V*`. The
//! plain functions ([`k_of`], [`f_of`], [`q_scalar`]) return coefficients
//! against the reference volume `e^{123456}`; the `Density*` wrappers carry
//! the power explicitly so identities such as `K(F(φ)) = −K(φ)Q(φ)` can be
//! checked with consistent bookkeeping.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{five_to_vector, kernel, annihilator, Blade, Form, Vector, DIM};
use crate::linalg::{same_span, LinearAlgebra, Mat};
use crate::scalar::{Field, Ring};

/// Matrix of `K(φ)`: column `j` is the vector of `−ι_{e_j}φ ∧ φ`.
///
/// Only ring operations are used, so this also runs on coefficient fields.
pub fn k_of<S: Ring>(phi: &Form<S>) -> Mat<S> {
    assert_eq!(phi.grade(), 3, "K is defined on 3-forms");
    let cols: Vec<Vec<S>> = (0..DIM)
        .map(|j| {
            let five = -phi.interior_basis(j).wedge(phi);
            five_to_vector(&five).expect("grade 5").to_vec()
        })
        .collect();
    Mat::from_columns(&cols)
}

/// `F(φ)(v1,v2,v3) = −2 φ(K(φ)v1, v2, v3)`.
pub fn f_of<S: Ring>(phi: &Form<S>) -> Form<S> {
    f_with_k(phi, &k_of(phi))
}

/// `F(φ)` from a precomputed `K(φ)`.
pub fn f_with_k<S: Ring>(phi: &Form<S>, k: &Mat<S>) -> Form<S> {
    let mut out = Form::zero(3);
    for blade in Blade::all_of_grade(3) {
        let idx = blade.indices();
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let mut acc = S::zero();
        for j in 0..DIM {
            let kja = k.get(j, a);
            if kja.is_zero() {
                continue;
            }
            let phi_jbc = coeff3(phi, j, b, c);
            if phi_jbc.is_zero() {
                continue;
            }
            acc = acc + kja.clone() * phi_jbc;
        }
        out.add_term(blade, acc.scale_i64(-2));
    }
    out
}

/// `φ(e_i, e_j, e_k)` for 0-based indices in any order.
pub fn coeff3<S: Ring>(phi: &Form<S>, i: usize, j: usize, k: usize) -> S {
    match crate::exterior::sort_sign(&[i, j, k]) {
        Some((sign, b)) => {
            let c = phi.coeff(b);
            if sign < 0 {
                -c
            } else {
                c
            }
        }
        None => S::zero(),
    }
}

/// `Q(φ) = −φ ∧ F(φ)` as a coefficient of `e^{123456}`.
pub fn q_scalar<S: Ring>(phi: &Form<S>) -> S {
    q_with_f(phi, &f_of(phi))
}

pub fn q_with_f<S: Ring>(phi: &Form<S>, f: &Form<S>) -> S {
    -phi.wedge(f).top_coeff()
}

/// Endomorphism of `V` twisted by `(Λ⁶V*)^{⊗density}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityEndo<S> {
    pub matrix: Mat<S>,
    pub density: i32,
}

/// Form twisted by `(Λ⁶V*)^{⊗density}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityForm<S> {
    pub form: Form<S>,
    pub density: i32,
}

/// Scalar twisted by `(Λ⁶V*)^{⊗density}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityScalar<S> {
    pub value: S,
    pub density: i32,
}

impl<S: Ring> DensityEndo<S> {
    pub fn compose(&self, other: &DensityEndo<S>) -> DensityEndo<S> {
        DensityEndo { matrix: self.matrix.mul(&other.matrix), density: self.density + other.density }
    }

    pub fn scale(&self, s: &DensityScalar<S>) -> DensityEndo<S> {
        DensityEndo { matrix: self.matrix.scale(&s.value), density: self.density + s.density }
    }
}

impl<S: Ring> DensityForm<S> {
    pub fn plain(form: Form<S>) -> Self {
        DensityForm { form, density: 0 }
    }

    /// `K` of a twisted 3-form: quadratic, plus one volume from `Λ⁵ ≅ V⊗Λ⁶`.
    pub fn k(&self) -> DensityEndo<S> {
        DensityEndo { matrix: k_of(&self.form), density: 2 * self.density + 1 }
    }

    pub fn f(&self) -> DensityForm<S> {
        DensityForm { form: f_of(&self.form), density: 3 * self.density + 1 }
    }

    pub fn q(&self) -> DensityScalar<S> {
        DensityScalar { value: q_scalar(&self.form), density: 4 * self.density + 2 }
    }

    pub fn scale(&self, s: &DensityScalar<S>) -> DensityForm<S> {
        DensityForm { form: self.form.scale(&s.value), density: self.density + s.density }
    }
}

impl<S: Ring> DensityScalar<S> {
    pub fn mul(&self, other: &DensityScalar<S>) -> DensityScalar<S> {
        DensityScalar { value: self.value.clone() * other.value.clone(), density: self.density + other.density }
    }
}

impl<S: Field> DensityScalar<S> {
    /// Value in units of `(ω³/3!)^{density}`.
    pub fn trivialize(&self, frame: &SymplecticFrame<S>) -> S {
        let mut v = self.value.clone();
        for _ in 0..self.density {
            v = v / frame.trivialization().clone();
        }
        v
    }
}

pub fn k_density<S: Ring>(phi: &Form<S>) -> DensityEndo<S> {
    DensityForm::plain(phi.clone()).k()
}

pub fn f_density<S: Ring>(phi: &Form<S>) -> DensityForm<S> {
    DensityForm::plain(phi.clone()).f()
}

pub fn q_density<S: Ring>(phi: &Form<S>) -> DensityScalar<S> {
    DensityForm::plain(phi.clone()).q()
}

/// A symplectic form together with `ω³/3! = c · e^{123456}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticFrame<S> {
    omega: Form<S>,
    matrix: Mat<S>,
    trivialization: S,
}

impl<S: Field> SymplecticFrame<S> {
    pub fn new(omega: Form<S>) -> Result<Self> {
        if omega.grade() != 2 {
            return Err(Error::Grade { expected: 2, got: omega.grade() });
        }
        let cube = omega.wedge(&omega).wedge(&omega).top_coeff();
        let trivialization = cube / S::from_i64(6);
        if trivialization.sign_tol(0.0) == std::cmp::Ordering::Equal {
            return Err(Error::Domain("omega is degenerate".into()));
        }
        let matrix = two_form_matrix(&omega);
        Ok(SymplecticFrame { omega, matrix, trivialization })
    }

    /// `ω = e^{12} + e^{34} + e^{56}`.
    pub fn standard() -> Self {
        Self::new(standard_omega()).expect("standard omega is nondegenerate")
    }

    pub fn omega(&self) -> &Form<S> {
        &self.omega
    }

    /// `Ω_ab = ω(e_a, e_b)`.
    pub fn matrix(&self) -> &Mat<S> {
        &self.matrix
    }

    pub fn trivialization(&self) -> &S {
        &self.trivialization
    }

    pub fn pair(&self, u: &Vector<S>, v: &Vector<S>) -> S {
        bilinear(&self.matrix, u, v)
    }
}

pub fn standard_omega<S: Ring>() -> Form<S> {
    Form::e(&[1, 2]) + Form::e(&[3, 4]) + Form::e(&[5, 6])
}

/// Antisymmetric matrix `ω(e_a, e_b)` of a 2-form.
pub fn two_form_matrix<S: Ring>(omega: &Form<S>) -> Mat<S> {
    let mut m = Mat::zeros(DIM, DIM);
    for (b, c) in omega.terms() {
        let idx = b.indices();
        m.set(idx[0], idx[1], c.clone());
        m.set(idx[1], idx[0], -c.clone());
    }
    m
}

pub fn bilinear<S: Ring>(m: &Mat<S>, u: &Vector<S>, v: &Vector<S>) -> S {
    let mv = m.apply(&v.0);
    u.0.iter().zip(mv).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b)
}

/// Result of the Lefschetz test.
#[derive(Clone, Debug, PartialEq)]
pub struct Lefschetz<S> {
    /// Contraction `Λφ` with the Poisson bivector of `ω`.
    pub contraction: Form<S>,
    pub is_primitive: bool,
}

/// Computes `Λφ` and `ω ∧ φ` independently; they must agree on whether `φ`
/// is primitive.
pub fn lefschetz<S: LinearAlgebra>(frame: &SymplecticFrame<S>, phi: &Form<S>) -> Result<Lefschetz<S>> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    let p = frame.matrix().inverse().expect("nondegenerate omega");
    let mut contraction = Form::zero(1);
    for a in 0..DIM {
        for b in a + 1..DIM {
            let pab = p.get(a, b);
            if pab.is_zero() {
                continue;
            }
            let term = phi.interior_basis(a).interior_basis(b).scale(pab);
            contraction = contraction + term;
        }
    }
    let wedge_zero = frame.omega().wedge(phi).is_zero();
    let contraction_zero = contraction.is_zero();
    if wedge_zero != contraction_zero {
        return Err(Error::Inconsistent("ω∧φ and Λφ disagree on primitivity".into()));
    }
    Ok(Lefschetz { contraction, is_primitive: wedge_zero })
}

pub fn is_primitive<S: Ring>(omega: &Form<S>, phi: &Form<S>) -> bool {
    omega.wedge(phi).is_zero()
}

/// Symmetric bilinear form with its signature `(n0, n+, n-)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymBilinear<S> {
    pub matrix: Mat<S>,
    pub signature: (usize, usize, usize),
}

impl<S: Serialize> Serialize for Mat<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.rows()))?;
        for r in 0..self.rows() {
            seq.serialize_element(self.row_vec(r))?;
        }
        seq.end()
    }
}

/// The three matrices of `q(ω, φ)` computed by independent formulas.
#[derive(Clone, Debug)]
pub struct QFormulas<S> {
    /// `ω(v1, K v2)`.
    pub via_k: Mat<S>,
    /// `(ι_{v1}φ ∧ ι_{v2}φ ∧ ω) / (ω³/3!)`.
    pub via_wedge: Mat<S>,
    /// `−⟨ι_{v1}φ, ι_{v2}φ⟩_ω`.
    pub via_pairing: Mat<S>,
}

/// Pairing of 2-forms induced by raising both indices with `P = Ω^{-1}`:
/// `⟨e^{ab}, e^{cd}⟩ = P^{ac}P^{bd} − P^{ad}P^{bc}`.
pub fn two_form_pairing<S: Ring>(p: &Mat<S>, a: &Form<S>, b: &Form<S>) -> S {
    let mut acc = S::zero();
    for (ba, ca) in a.terms() {
        let i = ba.indices();
        for (bb, cb) in b.terms() {
            let j = bb.indices();
            let g = p.get(i[0], j[0]).clone() * p.get(i[1], j[1]).clone()
                - p.get(i[0], j[1]).clone() * p.get(i[1], j[0]).clone();
            if !g.is_zero() {
                acc = acc + ca.clone() * cb.clone() * g;
            }
        }
    }
    acc
}

pub fn q_formulas<S: LinearAlgebra>(frame: &SymplecticFrame<S>, phi: &Form<S>) -> QFormulas<S> {
    let c = frame.trivialization().clone();
    let k = k_of(phi);
    let via_k = frame.matrix().mul(&k).scale(&(S::one() / c.clone()));
    let contractions: Vec<Form<S>> = (0..DIM).map(|i| phi.interior_basis(i)).collect();
    let via_wedge = Mat::from_fn(DIM, DIM, |i, j| {
        contractions[i].wedge(&contractions[j]).wedge(frame.omega()).top_coeff() / c.clone()
    });
    let p = frame.matrix().inverse().expect("nondegenerate omega");
    let via_pairing = Mat::from_fn(DIM, DIM, |i, j| -two_form_pairing(&p, &contractions[i], &contractions[j]));
    QFormulas { via_k, via_wedge, via_pairing }
}

/// `q(ω, φ)` for primitive `φ`. All three formulas are computed and must
/// agree (exactly for rationals, within `tol` for floats).
pub fn q_of<S: LinearAlgebra>(frame: &SymplecticFrame<S>, phi: &Form<S>, tol: f64) -> Result<SymBilinear<S>> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    if !primitive_tol(frame, phi, tol) {
        return Err(Error::NotPrimitive);
    }
    let qf = q_formulas(frame, phi);
    let scale = qf.via_k.entries().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
    let agree = |a: &Mat<S>, b: &Mat<S>| {
        a.entries().zip(b.entries()).all(|(x, y)| x.close_to(y, tol * scale))
    };
    if !agree(&qf.via_k, &qf.via_wedge) || !agree(&qf.via_k, &qf.via_pairing) {
        return Err(Error::Inconsistent("the three formulas for q disagree".into()));
    }
    let sym = qf.via_k.transpose();
    if !agree(&qf.via_k, &sym) {
        return Err(Error::Inconsistent("q is not symmetric".into()));
    }
    let signature = S::signature(&qf.via_k);
    Ok(SymBilinear { matrix: qf.via_k, signature })
}

/// Primitivity test with a float tolerance on the coefficients of `ω∧φ`.
pub fn primitive_tol<S: Field>(frame: &SymplecticFrame<S>, phi: &Form<S>, tol: f64) -> bool {
    let scale = phi.terms().map(|(_, c)| c.to_f64().abs()).fold(1.0, f64::max);
    frame
        .omega()
        .wedge(phi)
        .terms()
        .all(|(_, c)| c.sign_tol(tol * scale) == std::cmp::Ordering::Equal)
}

/// Dimensions of `ker φ`, `ker K`, `Im K`, `(Ann φ)^⊥` and which pairs of
/// these subspaces coincide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceProfile {
    pub dims: [usize; 4],
    /// `(i, j)` pairs (indices into `dims`) whose subspaces are equal.
    pub equal_pairs: Vec<(usize, usize)>,
}

pub fn subspace_profile<S: LinearAlgebra>(phi: &Form<S>) -> SubspaceProfile {
    let k = k_of(phi);
    let spaces: [Vec<Vec<S>>; 4] = [
        kernel(phi).into_iter().map(|v| v.to_vec()).collect(),
        S::null_space(&k),
        column_space(&k),
        annihilator(phi).perp.into_iter().map(|v| v.to_vec()).collect(),
    ];
    let dims = [0, 1, 2, 3].map(|i| spaces[i].len());
    let mut equal_pairs = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            if dims[i] == dims[j] && same_span(&spaces[i], &spaces[j]) {
                equal_pairs.push((i, j));
            }
        }
    }
    SubspaceProfile { dims, equal_pairs }
}

/// Basis of the column space of `m`.
pub fn column_space<S: LinearAlgebra>(m: &Mat<S>) -> Vec<Vec<S>> {
    // Columns of m span Im m; the perp of the left kernel is the same space.
    let left = S::null_space(&m.transpose());
    if left.is_empty() {
        return (0..m.rows()).map(|i| Vector::<S>::basis(i).to_vec()).collect();
    }
    S::null_space(&Mat::from_rows(left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_int, Rational};

    type F = Form<Rational>;

    fn q(n: i64) -> Rational {
        rational_int(n)
    }

    fn o_minus() -> F {
        F::e(&[1, 3, 5]) - F::e(&[1, 4, 6]) - F::e(&[2, 3, 6]) - F::e(&[2, 4, 5])
    }

    fn o_zero() -> F {
        F::e(&[1, 4, 6]) + F::e(&[2, 3, 6]) + F::e(&[2, 4, 5])
    }

    #[test]
    fn q_values() {
        assert_eq!(q_scalar(&(F::e(&[1, 2, 3]) + F::e(&[4, 5, 6]))), q(4));
        assert_eq!(q_scalar(&o_zero()), q(0));
        assert_eq!(q_scalar(&o_minus()), q(-16));
        assert_eq!(q_density(&o_minus()).density, 2);
    }

    #[test]
    fn k_of_o0_normal_form() {
        let k = k_of(&o_zero());
        for j in 0..3 {
            // ∂x^j = e_{2j-1}, ∂y^j = e_{2j}
            assert!(k.column(2 * j).iter().all(Ring::is_zero));
            let mut expected = vec![q(0); 6];
            expected[2 * j] = q(-2);
            assert_eq!(k.column(2 * j + 1), expected);
        }
        assert_eq!(f_of(&o_zero()), F::e(&[2, 4, 6]).scale(&q(4)));
    }

    #[test]
    fn k_of_split_form() {
        let k = k_of(&(F::e(&[1, 2, 3]) + F::e(&[4, 5, 6])));
        assert_eq!(k.column(0), vec![q(-1), q(0), q(0), q(0), q(0), q(0)]);
    }

    #[test]
    fn f_of_degenerate_is_zero() {
        assert!(f_of(&F::e(&[1, 3, 5])).is_zero());
    }

    #[test]
    fn lefschetz_examples() {
        let frame = SymplecticFrame::<Rational>::standard();
        assert!(lefschetz(&frame, &F::e(&[1, 3, 5])).unwrap().is_primitive);
        assert!(!lefschetz(&frame, &standard_omega::<Rational>().wedge(&F::e(&[1]))).unwrap().is_primitive);
        assert!(lefschetz(&frame, &F::zero(3)).unwrap().is_primitive);
    }

    #[test]
    fn q_examples() {
        let frame = SymplecticFrame::<Rational>::standard();
        let qm = q_of(&frame, &o_minus(), 0.0).unwrap();
        assert_eq!(*qm.matrix.get(0, 0), q(2));
        assert_eq!(qm.signature, (0, 6, 0));
        assert_eq!(q_of(&frame, &o_zero(), 0.0).unwrap().signature, (3, 3, 0));
        assert!(q_of(&frame, &F::e(&[1, 3, 5]), 0.0).unwrap().matrix.is_zero());
        let non_primitive = standard_omega::<Rational>().wedge(&F::e(&[1]));
        assert!(matches!(q_of(&frame, &non_primitive, 0.0), Err(Error::NotPrimitive)));
    }

    #[test]
    fn subspace_examples() {
        let p = subspace_profile(&o_zero());
        assert_eq!(p.dims, [0, 3, 3, 6]);
        assert!(p.equal_pairs.contains(&(1, 2)));
        let p = subspace_profile(&(F::e(&[1, 3, 5]) + F::e(&[2, 4, 5])));
        assert_eq!(p.dims, [1, 5, 1, 5]);
        assert_eq!(p.equal_pairs, vec![(0, 2), (1, 3)]);
        let p = subspace_profile(&F::zero(3));
        assert_eq!(p.dims, [6, 6, 0, 0]);
    }
}
