//! Complex and para-complex structures induced by stable 3-forms.
//!
//! On `O₋`, `K(φ)² = λ(φ)·id` with `λ = Q/4 < 0`, so `J = K/√(−λ)` is a
//! complex structure and `φ + i φ̂` with `φ̂ = J*φ` has type `(3,0)`. The
//! square root is taken positive against the reference volume (`ω³/3!`
//! when a symplectic form is supplied).

use crate::error::{Error, Result};
use crate::exterior::{Form, Vector, DIM};
use crate::invariants::{f_of, k_of, q_scalar, SymplecticFrame};
use crate::linalg::{LinearAlgebra, Mat};
use crate::patch::{eval_form, point_in, Coef, Patch};
use crate::scalar::{Field, Ring};
use rayon::prelude::*;

/// Sign `s` in the `(3,0)` conditions `ι_{JX}φ = s·ι_Xφ̂` and
/// `ι_{JX}φ̂ = −s·ι_Xφ`. Fixed by evaluating both candidates on the `O₋⁺`
/// normal form; the unit tests pin it.
pub const TYPE_30_SIGN: i64 = -1;

#[derive(Clone, Debug, PartialEq)]
pub struct HitchinPackage<S> {
    /// `λ = Q/4`, trivialized.
    pub lambda: S,
    /// Positive `√(−λ)`.
    pub sqrt_neg_lambda: S,
    pub j: Mat<S>,
    pub phi_hat: Form<S>,
    /// `|φ|²`, the coefficient of `φ∧φ̂` against `ω³/3!`; needs `ω`.
    pub norm_sq: Option<S>,
    /// `μ = |φ|/2`, only when `|φ|²` has a square root in the backend.
    pub mu: Option<S>,
}

fn trivialization<S: Field>(frame: Option<&SymplecticFrame<S>>) -> S {
    frame.map_or_else(S::one, |f| f.trivialization().clone())
}

/// Builds `λ`, `J`, `φ̂` and (with `ω`) `|φ|²` and `μ`. Rational input needs
/// `−λ` to be a perfect square.
pub fn hitchin_package<S: LinearAlgebra>(phi: &Form<S>, frame: Option<&SymplecticFrame<S>>) -> Result<HitchinPackage<S>> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    let c = trivialization(frame);
    let q = q_scalar(phi) / (c.clone() * c.clone());
    if q.sign_tol(0.0) != std::cmp::Ordering::Less {
        return Err(Error::WrongOrbit("the Hitchin package needs Q(φ) < 0".into()));
    }
    let lambda = q / S::from_i64(4);
    let sqrt_neg_lambda = (-lambda.clone())
        .sqrt()
        .ok_or_else(|| Error::Domain("√(−λ) is not representable in this backend".into()))?;
    let k = k_of(phi).scale(&(S::one() / c.clone()));
    let j = k.scale(&(S::one() / sqrt_neg_lambda.clone()));
    let phi_hat = phi.pullback(&j);
    let (norm_sq, mu) = match frame {
        Some(frame) => {
            let n = phi.wedge(&phi_hat).top_coeff() / frame.trivialization().clone();
            let mu = n.sqrt().map(|r| r / S::from_i64(2));
            (Some(n), mu)
        }
        None => (None, None),
    };
    Ok(HitchinPackage { lambda, sqrt_neg_lambda, j, phi_hat, norm_sq, mu })
}

/// Largest violation of the two real `(3,0)` conditions over the basis,
/// for the given sign convention.
pub fn type_30_defect<S: Field>(phi: &Form<S>, pkg: &HitchinPackage<S>, sign: i64) -> f64 {
    let s = S::from_i64(sign);
    let mut worst: f64 = 0.0;
    for i in 0..DIM {
        let x = Vector::<S>::basis(i);
        let jx = Vector::apply(&pkg.j, &x);
        let lhs1 = phi.interior(&jx).expect("grade 3");
        let rhs1 = pkg.phi_hat.interior_basis(i).scale(&s);
        let lhs2 = pkg.phi_hat.interior(&jx).expect("grade 3");
        let rhs2 = phi.interior_basis(i).scale(&(-s.clone()));
        for diff in [lhs1 - rhs1, lhs2 - rhs2] {
            for (_, c) in diff.terms() {
                worst = worst.max(c.to_f64().abs());
            }
        }
    }
    worst
}

/// Residuals of the relations tying the package to `K`, `F` and `Q`.
#[derive(Clone, Debug, Default)]
pub struct HitchinChecks {
    pub j_squared: f64,
    pub k_relation: f64,
    pub f_relation: f64,
    pub type_30: f64,
    /// `K = (|φ|²/2)J`, `F = |φ|²φ̂`, `Q = −|φ|⁴`; only with `ω`.
    pub norm_relations: Option<f64>,
}

impl HitchinChecks {
    pub fn max(&self) -> f64 {
        [self.j_squared, self.k_relation, self.f_relation, self.type_30, self.norm_relations.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn mat_defect<S: Field>(a: &Mat<S>, b: &Mat<S>) -> f64 {
    a.sub(b).entries().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

fn form_defect<S: Field>(a: &Form<S>, b: &Form<S>) -> f64 {
    (a.clone() - b.clone()).terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max)
}

pub fn check_package<S: LinearAlgebra>(phi: &Form<S>, frame: Option<&SymplecticFrame<S>>, pkg: &HitchinPackage<S>) -> HitchinChecks {
    let c = trivialization(frame);
    let k = k_of(phi).scale(&(S::one() / c.clone()));
    let f = f_of(phi).scale(&(S::one() / c.clone()));
    let id = Mat::<S>::identity(DIM);
    let two = S::from_i64(2);
    let mut out = HitchinChecks {
        j_squared: mat_defect(&pkg.j.mul(&pkg.j), &id.scale(&-S::one())),
        k_relation: mat_defect(&k, &pkg.j.scale(&pkg.sqrt_neg_lambda)),
        f_relation: form_defect(&f, &pkg.phi_hat.scale(&(two.clone() * pkg.sqrt_neg_lambda.clone()))),
        type_30: type_30_defect(phi, pkg, TYPE_30_SIGN),
        norm_relations: None,
    };
    if let Some(n) = &pkg.norm_sq {
        let q = q_scalar(phi) / (c.clone() * c);
        let r1 = mat_defect(&k, &pkg.j.scale(&(n.clone() / two)));
        let r2 = form_defect(&f, &pkg.phi_hat.scale(n));
        let r3 = (q + n.clone() * n.clone()).to_f64().abs();
        out.norm_relations = Some(r1.max(r2).max(r3));
    }
    out
}

/// `|φ|²` for `φ ∈ O₋⁺`.
pub fn norm_sq<S: LinearAlgebra>(frame: &SymplecticFrame<S>, phi: &Form<S>, tol: f64) -> Result<S> {
    let orbit = crate::classify::sp_classify(frame, phi, tol)?;
    if orbit.tag != crate::classify::SpTag::OMinusPlus {
        return Err(Error::WrongOrbit(format!("|φ|² needs a positive form, got {}", orbit.tag)));
    }
    hitchin_package(phi, Some(frame))?
        .norm_sq
        .ok_or_else(|| Error::Inconsistent("norm missing with omega supplied".into()))
}

/// Midpoint-rule value of `∫ Q(φ) ω³/3!` over the patch grid. The
/// integrand is `Q(φ)/c² · c` with `c = (ω³/3!)/e^{123456}` at each node.
pub fn hitchin_functional<C: Coef>(patch: &Patch, phi: &Form<C>, omega: &Form<C>) -> Result<C::Value> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    if omega.grade() != 2 {
        return Err(Error::Grade { expected: 2, got: omega.grade() });
    }
    let cell = C::Value::from_rational(&patch.cell_volume());
    let values = patch
        .grid_points()
        .par_iter()
        .map(|p| {
            let pv = point_in::<C::Value>(p);
            let frame = SymplecticFrame::new(eval_form(omega, &pv))?;
            let c = frame.trivialization().clone();
            Ok(q_scalar(&eval_form(phi, &pv)) / c)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = values.into_iter().fold(C::Value::zero(), |acc, v| acc + v);
    Ok(total * cell)
}

/// Split analogue on `O₊`: `P = 2K/√Q` squares to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ParaPackage<S> {
    pub p: Mat<S>,
    pub eigen_plus: Vec<Vec<S>>,
    pub eigen_minus: Vec<Vec<S>>,
}

pub fn para_package<S: LinearAlgebra>(phi: &Form<S>) -> Result<ParaPackage<S>> {
    let q = q_scalar(phi);
    if q.sign_tol(0.0) != std::cmp::Ordering::Greater {
        return Err(Error::WrongOrbit("the para-complex package needs Q(φ) > 0".into()));
    }
    let root = q.sqrt().ok_or_else(|| Error::Domain("√Q is not representable in this backend".into()))?;
    let p = k_of(phi).scale(&(S::from_i64(2) / root));
    let id = Mat::<S>::identity(DIM);
    let eigen_plus = S::null_space(&p.sub(&id));
    let eigen_minus = S::null_space(&p.add(&id));
    Ok(ParaPackage { p, eigen_plus, eigen_minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{normal_form, SpTag};
    use crate::rng::{random_o_minus, seeded};
    use crate::scalar::{rational_int, Rational};

    #[test]
    fn normal_form_package() {
        let frame = SymplecticFrame::<Rational>::standard();
        let phi = normal_form(SpTag::OMinusPlus, Some(rational_int(1))).unwrap();
        let pkg = hitchin_package(&phi, Some(&frame)).unwrap();
        assert_eq!(pkg.norm_sq, Some(rational_int(4)));
        assert_eq!(pkg.mu, Some(rational_int(1)));
        assert_eq!(f_of(&phi), pkg.phi_hat.scale(&rational_int(4)));
        assert_eq!(pkg.j.mul(&pkg.j), Mat::identity(6).scale(&rational_int(-1)));
        assert_eq!(check_package(&phi, Some(&frame), &pkg).max(), 0.0);
        let scaled = normal_form(SpTag::OMinusPlus, Some(rational_int(3))).unwrap();
        assert_eq!(norm_sq(&frame, &scaled, 0.0).unwrap(), rational_int(36));
    }

    #[test]
    fn type_30_sign_is_frozen() {
        let phi = normal_form(SpTag::OMinusPlus, Some(rational_int(1))).unwrap();
        let pkg = hitchin_package::<Rational>(&phi, None).unwrap();
        assert_eq!(type_30_defect(&phi, &pkg, TYPE_30_SIGN), 0.0);
        assert!(type_30_defect(&phi, &pkg, -TYPE_30_SIGN) > 0.0);
    }

    #[test]
    fn random_o_minus_packages() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let phi = random_o_minus(&mut rng);
            let pkg = hitchin_package(&phi, None).unwrap();
            assert_eq!(check_package(&phi, None, &pkg).max(), 0.0);
        }
    }

    #[test]
    fn para_examples() {
        let phi = Form::<Rational>::e(&[1, 2, 3]) + Form::e(&[4, 5, 6]);
        let pkg = para_package(&phi).unwrap();
        assert_eq!(pkg.p.mul(&pkg.p), Mat::identity(6));
        assert_eq!((pkg.eigen_plus.len(), pkg.eigen_minus.len()), (3, 3));
        let span_123 = |v: &Vec<Rational>| v[3..].iter().all(crate::scalar::Ring::is_zero);
        let span_456 = |v: &Vec<Rational>| v[..3].iter().all(crate::scalar::Ring::is_zero);
        assert!((pkg.eigen_plus.iter().all(span_123) && pkg.eigen_minus.iter().all(span_456))
            || (pkg.eigen_plus.iter().all(span_456) && pkg.eigen_minus.iter().all(span_123)));
        let doubled = para_package(&phi.scale(&rational_int(2))).unwrap();
        assert_eq!(doubled.p, pkg.p);
        let o_plus = normal_form(SpTag::OPlus, Some(rational_int(1))).unwrap();
        let p = para_package(&o_plus).unwrap().p;
        assert_eq!(p.mul(&p), Mat::identity(6));
    }

    #[test]
    fn functional_on_constant_fields() {
        use crate::patch::{constant_form, Expr, Poly};
        let names = ["x1", "y1", "x2", "y2", "x3", "y3"];
        let patch = Patch::unit_box(names).with_grid(2);
        let omega: Form<Poly> = constant_form(&crate::invariants::standard_omega());
        let plus = normal_form::<Rational>(SpTag::OMinusPlus, Some(rational_int(1))).unwrap();
        assert_eq!(hitchin_functional(&patch, &constant_form::<Poly>(&plus), &omega).unwrap(), rational_int(-16));
        let scaled = constant_form::<Poly>(&plus.scale(&rational_int(3)));
        assert_eq!(hitchin_functional(&patch, &scaled, &omega).unwrap(), rational_int(-16 * 81));
        let zero = normal_form::<Rational>(SpTag::O0Plus, None).unwrap();
        assert_eq!(hitchin_functional(&patch, &constant_form::<Poly>(&zero), &omega).unwrap(), rational_int(0));
        let fomega: Form<Expr> = constant_form(&crate::invariants::standard_omega());
        let v = hitchin_functional(&patch, &constant_form::<Expr>(&plus), &fomega).unwrap();
        assert!((v + 16.0).abs() < 1e-12);
    }

    #[test]
    fn functional_integrates_polynomial_density() {
        use crate::patch::{constant_form, Poly};
        let names = ["x1", "y1", "x2", "y2", "x3", "y3"];
        let patch = Patch::unit_box(names).with_grid(3);
        let omega: Form<Poly> = constant_form(&crate::invariants::standard_omega());
        let plus = normal_form::<Rational>(SpTag::OMinusPlus, Some(rational_int(1))).unwrap();
        // Q is quartic in φ, so a factor s(x) = 1 + x1 contributes ∫(1+x1)^4
        let s = Poly::one() + Poly::var(0);
        let phi = constant_form::<Poly>(&plus).map(|c| c.clone() * s.clone());
        let midpoint: Rational = [1, 3, 5].iter().map(|k| {
            let x = crate::scalar::rational(*k, 6) + rational_int(1);
            x.clone() * x.clone() * x.clone() * x
        }).fold(rational_int(0), |a, b| a + b) / rational_int(3);
        assert_eq!(hitchin_functional(&patch, &phi, &omega).unwrap(), midpoint * rational_int(-16));
    }
}
