//! Orbit classification under `GL(V)` and `Sp(V, ω)`, the normal-form
//! catalog, `μ` extraction and the stabilizer test for `O₀`.
//!
//! `O₁^±` pairing: `(e^{13} − e^{24})∧e^5` has `q`-signature `(5,1,0)` and is
//! labelled `O₁⁺`; `(e^{13} + e^{24})∧e^5` has `(5,0,1)` and is `O₁⁻`. The
//! printed `∓` therefore resolves with the upper sign on the plus orbit.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{kernel, Form, DIM};
use crate::invariants::{f_of, primitive_tol, q_of, q_scalar, SymplecticFrame};
use crate::linalg::{LinearAlgebra, Mat};
use crate::scalar::{Field, Ring};

/// Second, looser rank tolerance used to detect unstable float kernels.
pub const LOOSE_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlOrbit {
    #[serde(rename = "O-")]
    OMinus,
    #[serde(rename = "O+")]
    OPlus,
    #[serde(rename = "O0")]
    O0,
    #[serde(rename = "O1")]
    O1,
    #[serde(rename = "O3")]
    O3,
    #[serde(rename = "O6")]
    O6,
}

impl GlOrbit {
    pub const ALL: [GlOrbit; 6] = [GlOrbit::OMinus, GlOrbit::OPlus, GlOrbit::O0, GlOrbit::O1, GlOrbit::O3, GlOrbit::O6];

    pub fn label(self) -> &'static str {
        match self {
            GlOrbit::OMinus => "O-",
            GlOrbit::OPlus => "O+",
            GlOrbit::O0 => "O0",
            GlOrbit::O1 => "O1",
            GlOrbit::O3 => "O3",
            GlOrbit::O6 => "O6",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, GlOrbit::OMinus | GlOrbit::OPlus)
    }
}

impl fmt::Display for GlOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpTag {
    #[serde(rename = "O-+")]
    OMinusPlus,
    #[serde(rename = "O--")]
    OMinusMinus,
    #[serde(rename = "O+")]
    OPlus,
    #[serde(rename = "O0+")]
    O0Plus,
    #[serde(rename = "O0-")]
    O0Minus,
    #[serde(rename = "O1+")]
    O1Plus,
    #[serde(rename = "O1-")]
    O1Minus,
    #[serde(rename = "O3")]
    O3Prim,
    #[serde(rename = "O6")]
    O6,
}

impl SpTag {
    pub const ALL: [SpTag; 9] = [
        SpTag::OMinusPlus,
        SpTag::OMinusMinus,
        SpTag::OPlus,
        SpTag::O0Plus,
        SpTag::O0Minus,
        SpTag::O1Plus,
        SpTag::O1Minus,
        SpTag::O3Prim,
        SpTag::O6,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SpTag::OMinusPlus => "O-+",
            SpTag::OMinusMinus => "O--",
            SpTag::OPlus => "O+",
            SpTag::O0Plus => "O0+",
            SpTag::O0Minus => "O0-",
            SpTag::O1Plus => "O1+",
            SpTag::O1Minus => "O1-",
            SpTag::O3Prim => "O3",
            SpTag::O6 => "O6",
        }
    }

    pub fn has_mu(self) -> bool {
        matches!(self, SpTag::OMinusPlus | SpTag::OMinusMinus | SpTag::OPlus)
    }

    /// The `q`-signature `(n0, n+, n-)` of every form in the orbit.
    pub fn signature(self) -> (usize, usize, usize) {
        match self {
            SpTag::OMinusPlus => (0, 6, 0),
            SpTag::OMinusMinus => (0, 2, 4),
            SpTag::OPlus => (0, 3, 3),
            SpTag::O0Plus => (3, 3, 0),
            SpTag::O0Minus => (3, 1, 2),
            SpTag::O1Plus => (5, 1, 0),
            SpTag::O1Minus => (5, 0, 1),
            SpTag::O3Prim | SpTag::O6 => (6, 0, 0),
        }
    }

    pub fn gl(self) -> GlOrbit {
        match self {
            SpTag::OMinusPlus | SpTag::OMinusMinus => GlOrbit::OMinus,
            SpTag::OPlus => GlOrbit::OPlus,
            SpTag::O0Plus | SpTag::O0Minus => GlOrbit::O0,
            SpTag::O1Plus | SpTag::O1Minus => GlOrbit::O1,
            SpTag::O3Prim => GlOrbit::O3,
            SpTag::O6 => GlOrbit::O6,
        }
    }

    pub fn parse(s: &str) -> Option<SpTag> {
        SpTag::ALL.into_iter().find(|t| t.label() == s)
    }
}

impl fmt::Display for SpTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `Sp(V, ω)`-orbit. For the stable families `mu4` holds `μ⁴` and `mu`
/// holds `μ` itself when it lies in the scalar field (always for floats;
/// for rationals only when `μ⁴` is a rational fourth power).
#[derive(Debug, Clone, PartialEq)]
pub struct SpOrbit<S> {
    pub tag: SpTag,
    pub mu: Option<S>,
    pub mu4: Option<S>,
}

impl<S> SpOrbit<S> {
    pub fn bare(tag: SpTag) -> Self {
        SpOrbit { tag, mu: None, mu4: None }
    }
}

/// Full classification record.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification<S> {
    pub gl: GlOrbit,
    pub sp: Option<SpOrbit<S>>,
    /// `Q(φ)` against `e^{123456}` (or against `ω³/3!` when `ω` is given).
    pub q: S,
    pub dims: [usize; 4],
    pub signature: Option<(usize, usize, usize)>,
}

fn form_scale<S: Field>(phi: &Form<S>) -> f64 {
    phi.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max)
}

/// `GL(V)`-orbit from the sign of `Q` and the kernel dimension.
///
/// For floats, `Q` counts as zero when `|Q| ≤ tol·‖φ‖⁴`; if it does and the
/// kernel dimension changes between the default and a looser rank
/// tolerance, the result is [`Error::Indeterminate`].
pub fn gl_classify<S: LinearAlgebra>(phi: &Form<S>, tol: f64) -> Result<GlOrbit> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    let q = q_scalar(phi);
    let scale = form_scale(phi).powi(4);
    match q.sign_tol(tol * scale) {
        Ordering::Less => return Ok(GlOrbit::OMinus),
        Ordering::Greater => return Ok(GlOrbit::OPlus),
        Ordering::Equal => {}
    }
    let m = crate::exterior::interior_matrix(phi);
    let dim = if phi.is_zero() { DIM } else { S::null_space(&m).len() };
    let loose = if phi.is_zero() { DIM } else { S::null_space_tol(&m, LOOSE_RANK_TOL).len() };
    if dim != loose {
        return Err(Error::Indeterminate(format!(
            "|Q| is below tolerance and the kernel dimension is unstable ({dim} vs {loose})"
        )));
    }
    match dim {
        0 => Ok(GlOrbit::O0),
        1 => Ok(GlOrbit::O1),
        3 => Ok(GlOrbit::O3),
        6 => Ok(GlOrbit::O6),
        d => Err(Error::Indeterminate(format!("kernel dimension {d} is impossible for a 3-form"))),
    }
}

/// `μ` for a stable orbit: `(−Q/16)^{1/4}` on `O₋^±`, `(Q/4)^{1/4}` on `O₊`,
/// with `Q` trivialized by `ω³/3!`. Fails on rationals when the root is
/// irrational.
pub fn mu_of<S: Field>(frame: &SymplecticFrame<S>, phi: &Form<S>, tag: SpTag) -> Result<S> {
    let mu4 = mu4_of(frame, phi, tag)?;
    mu4.fourth_root().ok_or_else(|| Error::Domain(format!("μ⁴ = {mu4:?} has no fourth root in this backend")))
}

/// `μ⁴` for a stable orbit.
pub fn mu4_of<S: Field>(frame: &SymplecticFrame<S>, phi: &Form<S>, tag: SpTag) -> Result<S> {
    let c = frame.trivialization().clone();
    let q = q_scalar(phi) / (c.clone() * c);
    match tag {
        SpTag::OMinusPlus | SpTag::OMinusMinus => Ok(-q / S::from_i64(16)),
        SpTag::OPlus => Ok(q / S::from_i64(4)),
        other => Err(Error::WrongOrbit(format!("μ is only defined on stable orbits, not {other}"))),
    }
}

/// `Sp(V, ω)`-orbit of a primitive 3-form.
pub fn sp_classify<S: LinearAlgebra>(frame: &SymplecticFrame<S>, phi: &Form<S>, tol: f64) -> Result<SpOrbit<S>> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    if !primitive_tol(frame, phi, tol) {
        return Err(Error::NotPrimitive);
    }
    let gl = gl_classify(phi, tol)?;
    let q = q_of(frame, phi, tol)?;
    sp_from_parts(frame, phi, gl, q.signature)
}

fn sp_from_parts<S: LinearAlgebra>(
    frame: &SymplecticFrame<S>,
    phi: &Form<S>,
    gl: GlOrbit,
    sig: (usize, usize, usize),
) -> Result<SpOrbit<S>> {
    let tag = match (gl, sig) {
        (GlOrbit::OMinus, (0, 6, 0)) => SpTag::OMinusPlus,
        (GlOrbit::OMinus, (0, 2, 4)) => SpTag::OMinusMinus,
        (GlOrbit::OPlus, (0, 3, 3)) => SpTag::OPlus,
        (GlOrbit::O0, (3, 3, 0)) => SpTag::O0Plus,
        (GlOrbit::O0, (3, 1, 2)) => SpTag::O0Minus,
        (GlOrbit::O1, (5, 1, 0)) => SpTag::O1Plus,
        (GlOrbit::O1, (5, 0, 1)) => SpTag::O1Minus,
        (GlOrbit::O3, (6, 0, 0)) => SpTag::O3Prim,
        (GlOrbit::O6, _) => SpTag::O6,
        (gl, sig) => {
            return Err(Error::Inconsistent(format!("signature {sig:?} is not a valid case for GL orbit {gl}")));
        }
    };
    if !tag.has_mu() {
        return Ok(SpOrbit::bare(tag));
    }
    let mu4 = mu4_of(frame, phi, tag)?;
    Ok(SpOrbit { tag, mu: mu4.fourth_root(), mu4: Some(mu4) })
}

/// Runs every classifier and collects the record. `frame` enables the
/// symplectic part, which requires `φ` primitive.
pub fn classify<S: LinearAlgebra>(phi: &Form<S>, frame: Option<&SymplecticFrame<S>>, tol: f64) -> Result<Classification<S>> {
    let gl = gl_classify(phi, tol)?;
    let dims = crate::invariants::subspace_profile(phi).dims;
    let mut q = q_scalar(phi);
    let (sp, signature) = match frame {
        Some(frame) => {
            let c = frame.trivialization().clone();
            q = q / (c.clone() * c);
            if !primitive_tol(frame, phi, tol) {
                return Err(Error::NotPrimitive);
            }
            let qf = q_of(frame, phi, tol)?;
            (Some(sp_from_parts(frame, phi, gl, qf.signature)?), Some(qf.signature))
        }
        None => (None, None),
    };
    Ok(Classification { gl, sp, q, dims, signature })
}

/// Normal forms of the `GL(V)` table.
pub fn gl_normal_form<S: Ring>(orbit: GlOrbit) -> Form<S> {
    let e = |i: &[usize]| Form::<S>::e(i);
    match orbit {
        GlOrbit::OMinus => e(&[1, 3, 5]) - e(&[1, 4, 6]) - e(&[2, 3, 6]) - e(&[2, 4, 5]),
        GlOrbit::OPlus => e(&[1, 2, 3]) + e(&[4, 5, 6]),
        GlOrbit::O0 => e(&[1, 4, 6]) + e(&[2, 3, 6]) + e(&[2, 4, 5]),
        GlOrbit::O1 => e(&[1, 3, 5]) + e(&[2, 4, 5]),
        GlOrbit::O3 => e(&[1, 3, 5]),
        GlOrbit::O6 => Form::zero(3),
    }
}

/// Normal forms of the `Sp(V, ω)` table for the standard `ω`.
pub fn normal_form<S: Ring>(tag: SpTag, mu: Option<S>) -> Result<Form<S>> {
    let e = |i: &[usize]| Form::<S>::e(i);
    if tag.has_mu() && mu.is_none() {
        return Err(Error::Domain(format!("orbit {tag} needs a scale μ")));
    }
    let form = match tag {
        SpTag::OMinusPlus => e(&[1, 3, 5]) - e(&[1, 4, 6]) - e(&[2, 3, 6]) - e(&[2, 4, 5]),
        SpTag::OMinusMinus => e(&[1, 3, 5]) - e(&[1, 4, 6]) + e(&[2, 3, 6]) + e(&[2, 4, 5]),
        SpTag::OPlus => e(&[1, 3, 5]) + e(&[2, 4, 6]),
        SpTag::O0Plus => e(&[1, 4, 6]) + e(&[2, 3, 6]) + e(&[2, 4, 5]),
        SpTag::O0Minus => e(&[1, 4, 6]) - e(&[2, 3, 6]) - e(&[2, 4, 5]),
        SpTag::O1Plus => (e(&[1, 3]) - e(&[2, 4])).wedge(&e(&[5])),
        SpTag::O1Minus => (e(&[1, 3]) + e(&[2, 4])).wedge(&e(&[5])),
        SpTag::O3Prim => e(&[1, 3, 5]),
        SpTag::O6 => Form::zero(3),
    };
    Ok(match mu {
        Some(m) if tag.has_mu() => form.scale(&m),
        _ => form,
    })
}

/// Whether `m*φ = φ` (exactly, or within `tol` for floats).
pub fn is_stabilizer<S: Field>(m: &Mat<S>, phi: &Form<S>, tol: f64) -> bool {
    forms_close(&phi.pullback(m), phi, tol)
}

/// Whether `m` fixes the density-twisted form `a ⊗ (e^{123456})^{density}`,
/// i.e. `det(m)^density · m*a = a`.
pub fn is_density_stabilizer<S: LinearAlgebra>(m: &Mat<S>, a: &Form<S>, density: i32, tol: f64) -> bool {
    let det = m.det();
    let mut pulled = a.pullback(m);
    for _ in 0..density {
        pulled = pulled.scale(&det);
    }
    forms_close(&pulled, a, tol)
}

pub fn forms_close<S: Field>(a: &Form<S>, b: &Form<S>, tol: f64) -> bool {
    let scale = 1.0 + form_scale(a).max(form_scale(b));
    (a.clone() - b.clone()).terms().all(|(_, c)| c.sign_tol(tol * scale) == Ordering::Equal)
}

/// Matrix on `V` (Darboux order `x1,y1,x2,y2,x3,y3`) of the element whose
/// action on `V*` in the basis `(dx¹,dx²,dx³,dy¹,dy²,dy³)` is
/// `[[A, 0], [B, C]]`, column `j` being the image of the `j`-th covector.
pub fn block_matrix<S: Ring>(a: &Mat<S>, b: &Mat<S>, c: &Mat<S>) -> Mat<S> {
    let order = [0, 2, 4, 1, 3, 5];
    let mut g = Mat::zeros(DIM, DIM);
    for r in 0..3 {
        for s in 0..3 {
            g.set(r, s, a.get(r, s).clone());
            g.set(r + 3, s, b.get(r, s).clone());
            g.set(r + 3, s + 3, c.get(r, s).clone());
        }
    }
    // The pullback of e^i under m is Σ_j m_ij e^j, so m is the transpose
    // of the covector matrix.
    let mut m = Mat::zeros(DIM, DIM);
    for r in 0..DIM {
        for s in 0..DIM {
            m.set(order[r], order[s], g.get(s, r).clone());
        }
    }
    m
}

/// Classification of `φ` and of `F(φ)` trivialized by `ω³/3!`.
pub fn verify_f_orbit<S: LinearAlgebra>(
    frame: &SymplecticFrame<S>,
    phi: &Form<S>,
    tol: f64,
) -> Result<(SpOrbit<S>, SpOrbit<S>)> {
    let before = sp_classify(frame, phi, tol)?;
    let f = f_of(phi).scale(&(S::one() / frame.trivialization().clone()));
    let after = sp_classify(frame, &f, tol)?;
    Ok((before, after))
}

/// Kernel dimension (exact for rationals).
pub fn kernel_dim<S: LinearAlgebra>(phi: &Form<S>) -> usize {
    kernel(phi).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, rational_int, Rational};

    type F = Form<Rational>;

    fn std_frame() -> SymplecticFrame<Rational> {
        SymplecticFrame::standard()
    }

    #[test]
    fn gl_table_round_trip() {
        for orbit in GlOrbit::ALL {
            assert_eq!(gl_classify(&gl_normal_form::<Rational>(orbit), 0.0).unwrap(), orbit);
        }
    }

    #[test]
    fn sp_table_round_trip() {
        for tag in SpTag::ALL {
            let mu = tag.has_mu().then(|| rational_int(1));
            let phi = normal_form(tag, mu).unwrap();
            let orbit = sp_classify(&std_frame(), &phi, 0.0).unwrap();
            assert_eq!(orbit.tag, tag);
            if tag.has_mu() {
                assert_eq!(orbit.mu, Some(rational_int(1)));
            }
        }
    }

    #[test]
    fn mu_examples() {
        let phi = normal_form(SpTag::OPlus, Some(rational_int(3))).unwrap();
        assert_eq!(mu_of(&std_frame(), &phi, SpTag::OPlus).unwrap(), rational_int(3));
        let phi = normal_form(SpTag::OMinusPlus, Some(rational(2, 7))).unwrap();
        assert_eq!(mu_of(&std_frame(), &phi, SpTag::OMinusPlus).unwrap(), rational(2, 7));
        assert!(mu_of(&std_frame(), &F::e(&[1, 3, 5]), SpTag::O3Prim).is_err());
    }

    #[test]
    fn o1_pairing() {
        let plus = (F::e(&[1, 3]) - F::e(&[2, 4])).wedge(&F::e(&[5]));
        assert_eq!(q_of(&std_frame(), &plus, 0.0).unwrap().signature, (5, 1, 0));
        let minus = (F::e(&[1, 3]) + F::e(&[2, 4])).wedge(&F::e(&[5]));
        assert_eq!(q_of(&std_frame(), &minus, 0.0).unwrap().signature, (5, 0, 1));
    }

    #[test]
    fn normal_form_examples() {
        assert_eq!(normal_form::<Rational>(SpTag::O3Prim, None).unwrap(), F::e(&[1, 3, 5]));
        assert_eq!(
            normal_form::<Rational>(SpTag::O0Minus, None).unwrap(),
            F::e(&[1, 4, 6]) - F::e(&[2, 3, 6]) - F::e(&[2, 4, 5])
        );
        let two = rational_int(2);
        let expected = (F::e(&[1, 3, 5]) - F::e(&[1, 4, 6]) + F::e(&[2, 3, 6]) + F::e(&[2, 4, 5])).scale(&two);
        assert_eq!(normal_form(SpTag::OMinusMinus, Some(two)).unwrap(), expected);
        assert!(normal_form::<Rational>(SpTag::OPlus, None).is_err());
    }

    #[test]
    fn stabilizer_examples() {
        let phi = gl_normal_form::<Rational>(GlOrbit::O0);
        assert!(is_stabilizer(&Mat::identity(6), &phi, 0.0));
        assert!(!is_stabilizer(&Mat::identity(6).scale(&rational_int(2)), &phi, 0.0));
        // C = diag(1, 2, 1), A = C / det C, B with Tr(BC^{-1}) = 0.
        let q = rational_int;
        let c = Mat::from_rows(vec![vec![q(1), q(0), q(0)], vec![q(0), q(2), q(0)], vec![q(0), q(0), q(1)]]);
        let a = c.scale(&rational(1, 2));
        let b = Mat::from_rows(vec![vec![q(2), q(1), q(0)], vec![q(3), q(-4), q(5)], vec![q(1), q(0), q(0)]]);
        let m = block_matrix(&a, &b, &c);
        assert!(is_stabilizer(&m, &phi, 0.0));
        let f = crate::invariants::f_of(&phi);
        assert!(is_density_stabilizer(&m, &f, 1, 0.0));
        assert!(!is_stabilizer(&m, &f, 0.0));
        let bad = Mat::from_rows(vec![vec![q(1), q(0), q(0)], vec![q(0), q(0), q(0)], vec![q(0), q(0), q(0)]]);
        assert!(!is_stabilizer(&block_matrix(&a, &bad, &c), &phi, 0.0));
    }

    #[test]
    fn f_orbit_examples() {
        let frame = std_frame();
        let (a, b) = verify_f_orbit(&frame, &normal_form(SpTag::OMinusPlus, Some(rational_int(1))).unwrap(), 0.0).unwrap();
        assert_eq!((a.tag, b.tag, b.mu), (SpTag::OMinusPlus, SpTag::OMinusPlus, Some(rational_int(4))));
        let (_, b) = verify_f_orbit(&frame, &normal_form(SpTag::OPlus, Some(rational_int(1))).unwrap(), 0.0).unwrap();
        assert_eq!((b.tag, b.mu), (SpTag::OPlus, Some(rational_int(2))));
        let (a, b) = verify_f_orbit(&frame, &normal_form::<Rational>(SpTag::O0Plus, None).unwrap(), 0.0).unwrap();
        assert_eq!((a.tag, b.tag), (SpTag::O0Plus, SpTag::O3Prim));
    }

    #[test]
    fn float_indeterminate() {
        let phi = gl_normal_form::<f64>(GlOrbit::O3) + Form::<f64>::term(1e-8, &[2, 4, 6]);
        let r = gl_classify(&phi, 1e-6);
        assert!(matches!(r, Err(Error::Indeterminate(_))), "{r:?} Q={}", q_scalar(&phi));
        assert_eq!(gl_classify(&gl_normal_form::<f64>(GlOrbit::O0), 1e-9).unwrap(), GlOrbit::O0);
    }
}
