//! Differential forms and vector fields on a coordinate box.
//!
//! Fields are the exterior-algebra types of [`crate::exterior`] with
//! coefficients in a [`Coef`] ring: exact rational polynomials ([`Poly`]) or
//! closed-form numeric expressions ([`Expr`]). Field-level derivatives go
//! through [`Coef::partial`]; pointwise work (Nijenhuis tensors, `dF`,
//! integrability sweeps) evaluates [`Jet`]s at each point and runs the
//! generic invariant code on them.

pub mod expr;
pub mod jet;
pub mod poly;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{gl_classify, sp_classify, SpTag};
use crate::error::{Error, Result};
use crate::exterior::{five_to_vector, Blade, Form, Vector, DIM};
use crate::invariants::{f_of, k_of, primitive_tol, q_scalar, SymplecticFrame};
use crate::linalg::{LinearAlgebra, Mat};
use crate::scalar::{format_rational, rational, Backend, Field, Rational, Ring};

pub use expr::Expr;
pub use jet::Jet;
pub use poly::Poly;

pub type FormField<C> = Form<C>;
pub type VectorField<C> = Vector<C>;
/// Endomorphism field, trivialized against `ω³/3!`.
pub type EndoField<C> = Mat<C>;

/// Default relative finite-difference step (times the axis length).
pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_GRID: usize = 5;

/// Coordinate box `Π [lower_i, upper_i]` with a midpoint sampling grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    names: [String; DIM],
    lower: [Rational; DIM],
    upper: [Rational; DIM],
    grid: [usize; DIM],
    fd_step: f64,
}

impl Patch {
    pub fn new(names: [&str; DIM], lower: [Rational; DIM], upper: [Rational; DIM]) -> Result<Patch> {
        for i in 0..DIM {
            if lower[i] >= upper[i] {
                return Err(Error::Domain(format!("empty interval on axis {}", names[i])));
            }
        }
        Ok(Patch {
            names: names.map(String::from),
            lower,
            upper,
            grid: [DEFAULT_GRID; DIM],
            fd_step: DEFAULT_FD_STEP,
        })
    }

    pub fn unit_box(names: [&str; DIM]) -> Patch {
        Patch::new(names, std::array::from_fn(|_| rational(0, 1)), std::array::from_fn(|_| rational(1, 1))).expect("nonempty box")
    }

    pub fn with_grid(mut self, per_axis: usize) -> Patch {
        assert!(per_axis >= 1);
        self.grid = [per_axis; DIM];
        self
    }

    pub fn with_grid_axes(mut self, grid: [usize; DIM]) -> Patch {
        assert!(grid.iter().all(|&n| n >= 1));
        self.grid = grid;
        self
    }

    pub fn with_fd_step(mut self, rel: f64) -> Patch {
        assert!(rel > 0.0);
        self.fd_step = rel;
        self
    }

    pub fn names(&self) -> &[String; DIM] {
        &self.names
    }

    pub fn lower(&self) -> &[Rational; DIM] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational; DIM] {
        &self.upper
    }

    pub fn grid(&self) -> [usize; DIM] {
        self.grid
    }

    pub fn length(&self, axis: usize) -> Rational {
        &self.upper[axis] - &self.lower[axis]
    }

    /// Finite-difference step along `axis`.
    pub fn step(&self, axis: usize) -> f64 {
        self.fd_step * self.length(axis).to_f64()
    }

    pub fn cell_volume(&self) -> Rational {
        (0..DIM).fold(rational(1, 1), |acc, i| acc * self.length(i) / Rational::from_integer((self.grid[i] as i64).into()))
    }

    /// Cell midpoints; every one lies strictly inside the box.
    pub fn grid_points(&self) -> Vec<[Rational; DIM]> {
        let total: usize = self.grid.iter().product();
        (0..total)
            .map(|mut flat| {
                std::array::from_fn(|i| {
                    let n = self.grid[i];
                    let k = flat % n;
                    flat /= n;
                    let frac = rational(2 * k as i64 + 1, 2 * n as i64);
                    &self.lower[i] + self.length(i) * frac
                })
            })
            .collect()
    }

    /// Seeded random interior points with coordinates on a 1/256 lattice of
    /// each axis.
    pub fn random_points(&self, count: usize, seed: u64) -> Vec<[Rational; DIM]> {
        use rand::Rng;
        (0..count)
            .map(|n| {
                let mut rng = crate::rng::sample_rng(seed, n as u64);
                std::array::from_fn(|i| &self.lower[i] + self.length(i) * rational(rng.gen_range(1..256), 256))
            })
            .collect()
    }

    pub fn contains(&self, p: &[Rational; DIM]) -> bool {
        (0..DIM).all(|i| self.lower[i] < p[i] && p[i] < self.upper[i])
    }
}

pub fn point_in<V: Field>(p: &[Rational; DIM]) -> [V; DIM] {
    std::array::from_fn(|i| V::from_rational(&p[i]))
}

pub fn format_point(p: &[Rational; DIM]) -> String {
    let parts: Vec<String> = p.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Coefficient ring of fields on a patch.
pub trait Coef: Ring {
    type Value: LinearAlgebra;
    const BACKEND: Backend;
    /// Zero tests on fields are exact identities rather than grid sweeps.
    const EXACT: bool;

    fn partial(&self, axis: usize, patch: &Patch) -> Self;
    fn eval(&self, p: &[Self::Value; DIM]) -> Self::Value;
    fn jet(&self, p: &[Self::Value; DIM], second_order: bool) -> Jet<Self::Value>;
    /// Structurally constant.
    fn is_constant(&self) -> bool;
    fn from_value(v: &Self::Value) -> Self;
    fn from_poly(p: &Poly) -> Self;
    /// Whether the field can vary along `axis`.
    fn depends_on(&self, axis: usize) -> bool;
}

impl Coef for Poly {
    type Value = Rational;
    const BACKEND: Backend = Backend::Rational;
    const EXACT: bool = true;

    fn partial(&self, axis: usize, _patch: &Patch) -> Self {
        Poly::partial(self, axis)
    }

    fn eval(&self, p: &[Rational; DIM]) -> Rational {
        Poly::eval(self, p)
    }

    fn jet(&self, p: &[Rational; DIM], second_order: bool) -> Jet<Rational> {
        Poly::jet(self, p, second_order)
    }

    fn is_constant(&self) -> bool {
        Poly::is_constant(self)
    }

    fn from_value(v: &Rational) -> Self {
        Poly::constant(v.clone())
    }

    fn from_poly(p: &Poly) -> Self {
        p.clone()
    }

    fn depends_on(&self, axis: usize) -> bool {
        self.terms().any(|(m, _)| m[axis] > 0)
    }
}

impl Coef for Expr {
    type Value = f64;
    const BACKEND: Backend = Backend::Float;
    const EXACT: bool = false;

    fn partial(&self, axis: usize, patch: &Patch) -> Self {
        Expr::partial(self, axis, patch.step(axis))
    }

    fn eval(&self, p: &[f64; DIM]) -> f64 {
        Expr::eval(self, p)
    }

    fn jet(&self, p: &[f64; DIM], second_order: bool) -> Jet<f64> {
        Expr::jet(self, p, second_order)
    }

    fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    fn from_value(v: &f64) -> Self {
        Expr::constant(*v)
    }

    fn from_poly(p: &Poly) -> Self {
        Expr::from_poly(p)
    }

    fn depends_on(&self, axis: usize) -> bool {
        Expr::depends_on(self, axis)
    }
}

pub fn eval_form<C: Coef>(f: &Form<C>, p: &[C::Value; DIM]) -> Form<C::Value> {
    f.map(|c| c.eval(p))
}

pub fn eval_vector<C: Coef>(v: &Vector<C>, p: &[C::Value; DIM]) -> Vector<C::Value> {
    v.map(|c| c.eval(p))
}

pub fn eval_endo<C: Coef>(m: &Mat<C>, p: &[C::Value; DIM]) -> Mat<C::Value> {
    m.map(|c| c.eval(p))
}

pub fn form_jet<C: Coef>(f: &Form<C>, p: &[C::Value; DIM], second_order: bool) -> Form<Jet<C::Value>> {
    f.map(|c| c.jet(p, second_order))
}

pub fn vector_jet<C: Coef>(v: &Vector<C>, p: &[C::Value; DIM], second_order: bool) -> Vector<Jet<C::Value>> {
    v.map(|c| c.jet(p, second_order))
}

pub fn endo_jet<C: Coef>(m: &Mat<C>, p: &[C::Value; DIM], second_order: bool) -> Mat<Jet<C::Value>> {
    m.map(|c| c.jet(p, second_order))
}

pub fn jet_values<V: Field>(v: &Vector<Jet<V>>) -> Vector<V> {
    v.map(|j| j.value.clone())
}

pub fn form_values<V: Field>(f: &Form<Jet<V>>) -> Form<V> {
    f.map(|j| j.value.clone())
}

/// Constant-coefficient field from a pointwise form.
pub fn constant_form<C: Coef>(f: &Form<Rational>) -> Form<C> {
    f.map(C::from_rational)
}

/// `Σ_I Σ_i ∂_i(c_I) e^i ∧ e^I` with the derivative supplied per term.
fn exterior_derivative<A: Ring, B: Ring>(f: &Form<A>, mut partial: impl FnMut(&A, usize) -> B) -> Form<B> {
    let mut out = Form::zero(f.grade() + 1);
    for (blade, c) in f.terms() {
        for i in 0..DIM {
            if blade.contains(i) {
                continue;
            }
            let Some(sign) = Blade::single(i).wedge_sign(*blade) else { continue };
            let dc = partial(c, i);
            if dc.is_zero() {
                continue;
            }
            let target = Blade::from_indices(&[&blade.indices()[..], &[i]].concat()).expect("distinct indices");
            out.add_term(target, dc.scale_i64(sign));
        }
    }
    out
}

/// Exterior derivative of a field.
pub fn d<C: Coef>(patch: &Patch, f: &Form<C>) -> Result<Form<C>> {
    if f.grade() >= DIM {
        return Err(Error::Grade { expected: DIM - 1, got: f.grade() });
    }
    Ok(exterior_derivative(f, |c, i| c.partial(i, patch)))
}

/// `dα` at the jet's base point.
pub fn d_at<V: Field>(f: &Form<Jet<V>>) -> Form<V> {
    exterior_derivative(f, |c, i| c.grad[i].clone())
}

/// `dα` as a first-order jet; needs second-order input.
pub fn d_jet<V: Field>(f: &Form<Jet<V>>) -> Form<Jet<V>> {
    exterior_derivative(f, |c, i| c.partial(i))
}

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
pub fn lie_bracket<C: Coef>(patch: &Patch, x: &Vector<C>, y: &Vector<C>) -> Vector<C> {
    Vector(std::array::from_fn(|i| {
        let mut acc = C::zero();
        for j in 0..DIM {
            if !x.0[j].is_zero() {
                acc = acc + x.0[j].clone() * y.0[i].partial(j, patch);
            }
            if !y.0[j].is_zero() {
                acc = acc - y.0[j].clone() * x.0[i].partial(j, patch);
            }
        }
        acc
    }))
}

/// Bracket value at the base point of two first-order jets.
pub fn bracket_at<V: Field>(x: &Vector<Jet<V>>, y: &Vector<Jet<V>>) -> Vector<V> {
    let xv = jet_values(x).0;
    let yv = jet_values(y).0;
    Vector(std::array::from_fn(|i| y.0[i].derivative_along(&xv) - x.0[i].derivative_along(&yv)))
}

/// Bracket as a first-order jet; needs second-order input.
pub fn bracket_jet<V: Field>(x: &Vector<Jet<V>>, y: &Vector<Jet<V>>) -> Vector<Jet<V>> {
    Vector(std::array::from_fn(|i| {
        let mut acc = Jet::zero();
        for j in 0..DIM {
            acc = acc + x.0[j].clone() * y.0[i].partial(j) - y.0[j].clone() * x.0[i].partial(j);
        }
        acc
    }))
}

fn apply_jet<V: Field>(k: &Mat<Jet<V>>, x: &Vector<Jet<V>>) -> Vector<Jet<V>> {
    Vector::apply(k, x)
}

/// `N_K(X,Y) = −K²[X,Y] + K([KX,Y] + [X,KY]) − [KX,KY]` at the base point.
pub fn nijenhuis_at<V: Field>(k: &Mat<Jet<V>>, x: &Vector<Jet<V>>, y: &Vector<Jet<V>>) -> Vector<V> {
    let kv = k.map(|j| j.value.clone());
    let kx = apply_jet(k, x);
    let ky = apply_jet(k, y);
    let xy = bracket_at(x, y);
    let mixed = bracket_at(&kx, y) + bracket_at(x, &ky);
    let kk = bracket_at(&kx, &ky);
    let k2 = kv.mul(&kv);
    Vector::apply(&kv, &mixed) - Vector::apply(&k2, &xy) - kk
}

/// Nijenhuis tensor of an endomorphism field at `p`.
pub fn nijenhuis<C: Coef>(k: &EndoField<C>, x: &Vector<C>, y: &Vector<C>, p: &[C::Value; DIM]) -> Vector<C::Value> {
    nijenhuis_at(&endo_jet(k, p, false), &vector_jet(x, p, false), &vector_jet(y, p, false))
}

/// Field-level Nijenhuis tensor.
pub fn nijenhuis_field<C: Coef>(patch: &Patch, k: &EndoField<C>, x: &Vector<C>, y: &Vector<C>) -> Vector<C> {
    let kx = Vector::apply(k, x);
    let ky = Vector::apply(k, y);
    let xy = lie_bracket(patch, x, y);
    let mixed = lie_bracket(patch, &kx, y) + lie_bracket(patch, x, &ky);
    let kk = lie_bracket(patch, &kx, &ky);
    let k2 = k.mul(k);
    Vector::apply(k, &mixed) - Vector::apply(&k2, &xy) - kk
}

/// Symplectic frame of a constant-coefficient `ω` field.
pub fn constant_frame<C: Coef>(omega: &Form<C>) -> Result<SymplecticFrame<C::Value>> {
    if omega.terms().any(|(_, c)| !c.is_constant()) {
        return Err(Error::Domain("omega must have constant coefficients on the patch".into()));
    }
    let zero: [C::Value; DIM] = std::array::from_fn(|_| C::Value::zero());
    SymplecticFrame::new(eval_form(omega, &zero))
}

/// `K(φ)` as a field trivialized by a constant `ω`.
pub fn k_field<C: Coef>(phi: &Form<C>, omega: &Form<C>) -> Result<EndoField<C>> {
    let frame = constant_frame(omega)?;
    let c = frame.trivialization().clone();
    let inv = C::from_value(&(C::Value::one() / c));
    Ok(k_of(phi).map(|e| e.clone() * inv.clone()))
}

/// The four 5-forms on the right of the Nijenhuis identity, evaluated at a
/// point with `K`, `F` against `e^{123456}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NijenhuisTerms<V> {
    /// `ι_Yι_X dφ ∧ F(φ)`
    pub closed_part: Form<V>,
    /// `dφ ∧ ι_Yι_X F(φ)`
    pub mixed_part: Form<V>,
    /// `φ ∧ (ι_Yι_{KX} − ι_Xι_{KY}) dφ`
    pub twisted_part: Form<V>,
    /// `φ ∧ ι_Yι_X dF(φ)`
    pub f_part: Form<V>,
    /// `(ω³/3!) / e^{123456}`
    pub trivialization: V,
}

impl<V: Field> NijenhuisTerms<V> {
    fn to_vector(&self, five: Form<V>) -> Vector<V> {
        let c2 = self.trivialization.clone() * self.trivialization.clone();
        five_to_vector(&five).expect("grade 5").scale(&(V::one() / c2))
    }

    /// `ι_Yι_X dφ∧F − dφ∧ι_Yι_XF + 2φ∧(ι_Yι_{KX} − ι_Xι_{KY})dφ + φ∧ι_Yι_X dF`.
    pub fn four_term(&self) -> Vector<V> {
        let five = self.closed_part.clone() - self.mixed_part.clone() + self.twisted_part.scale(&V::from_i64(2)) + self.f_part.clone();
        self.to_vector(five)
    }

    /// The same sum without the `dφ∧ι_Yι_XF` term, which is the combination
    /// that equals `N_K(X,Y)`.
    pub fn three_term(&self) -> Vector<V> {
        let five = self.closed_part.clone() + self.twisted_part.scale(&V::from_i64(2)) + self.f_part.clone();
        self.to_vector(five)
    }

    pub fn mixed_vector(&self) -> Vector<V> {
        self.to_vector(self.mixed_part.clone())
    }
}

fn double_interior<V: Field>(a: &Form<V>, first: &Vector<V>, second: &Vector<V>) -> Form<V> {
    a.interior(first).and_then(|b| b.interior(second)).expect("grade at least 2")
}

/// Terms of the Nijenhuis identity at `p` for constant `ω`.
pub fn nijenhuis_terms<C: Coef>(
    phi: &Form<C>,
    omega: &Form<C>,
    x: &Vector<C>,
    y: &Vector<C>,
    p: &[C::Value; DIM],
) -> Result<NijenhuisTerms<C::Value>> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    let frame = constant_frame(omega)?;
    let pj = form_jet(phi, p, false);
    let fj = f_of(&pj);
    let phi_p = form_values(&pj);
    let f_p = form_values(&fj);
    let dphi = d_at(&pj);
    let df = d_at(&fj);
    let k = k_of(&phi_p);
    let xv = eval_vector(x, p);
    let yv = eval_vector(y, p);
    let kx = Vector::apply(&k, &xv);
    let ky = Vector::apply(&k, &yv);
    let twist = double_interior(&dphi, &kx, &yv) - double_interior(&dphi, &ky, &xv);
    Ok(NijenhuisTerms {
        closed_part: double_interior(&dphi, &xv, &yv).wedge(&f_p),
        mixed_part: dphi.wedge(&double_interior(&f_p, &xv, &yv)),
        twisted_part: phi_p.wedge(&twist),
        f_part: phi_p.wedge(&double_interior(&df, &xv, &yv)),
        trivialization: frame.trivialization().clone(),
    })
}

/// `N_K(X,Y)` at `p` from the four-term expression in `φ`, `dφ`, `F(φ)`
/// and `dF(φ)`.
pub fn nijenhuis_rhs<C: Coef>(
    phi: &Form<C>,
    omega: &Form<C>,
    x: &Vector<C>,
    y: &Vector<C>,
    p: &[C::Value; DIM],
) -> Result<Vector<C::Value>> {
    Ok(nijenhuis_terms(phi, omega, x, y, p)?.four_term())
}

/// Sp orbit observed at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointOrbit {
    pub point: Vec<f64>,
    pub tag: SpTag,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub closed: bool,
    pub f_integrable: bool,
    pub q_integrable: bool,
    pub f_harmonic: bool,
    /// Largest `|dφ|` coefficient over the grid (0 on exact backends when closed).
    pub closed_residual: f64,
    pub f_residual: f64,
    /// `max Q − min Q` over the grid.
    pub q_spread: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub pointwise_orbits: Vec<PointOrbit>,
}

impl IntegrabilityReport {
    pub fn uniform_orbit(&self) -> Option<SpTag> {
        let first = self.pointwise_orbits.first()?.tag;
        self.pointwise_orbits.iter().all(|o| o.tag == first).then_some(first)
    }
}

fn max_abs<V: Field>(f: &Form<V>) -> f64 {
    f.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max)
}

fn all_constant<C: Coef>(f: &Form<C>) -> bool {
    f.terms().all(|(_, c)| c.is_constant())
}

#[derive(Clone)]
struct PointSample {
    closed: f64,
    f: f64,
    q: f64,
    tag: SpTag,
}

fn sample_point<C: Coef>(phi: &Form<C>, frame: &SymplecticFrame<C::Value>, p: &[Rational; DIM], tol: f64) -> Result<PointSample> {
    let pv = point_in::<C::Value>(p);
    let pj = form_jet(phi, &pv, false);
    let phi_p = form_values(&pj);
    if !primitive_tol(frame, &phi_p, tol) {
        return Err(Error::NotPrimitiveAt(format_point(p)));
    }
    let fj = f_of(&pj);
    let c = frame.trivialization().clone();
    let q = q_scalar(&phi_p) / (c.clone() * c);
    let tag = sp_classify(frame, &phi_p, tol)?.tag;
    Ok(PointSample { closed: max_abs(&d_at(&pj)), f: max_abs(&d_at(&fj)), q: q.to_f64(), tag })
}

/// Closedness, `F`-integrability, constancy of `Q` and the pointwise orbit
/// over the patch grid. Exact backends decide the first three on the field
/// coefficients; numeric backends take the supremum over the grid.
pub fn integrability_report<C: Coef>(patch: &Patch, phi: &Form<C>, omega: &Form<C>, tol: f64) -> Result<IntegrabilityReport> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    let frame = constant_frame(omega)?;
    let points = patch.grid_points();
    let samples: Vec<PointSample> = if all_constant(phi) {
        let s = sample_point(phi, &frame, &points[0], tol)?;
        points.iter().map(|_| s.clone()).collect()
    } else {
        points.par_iter().map(|p| sample_point(phi, &frame, p, tol)).collect::<Result<_>>()?
    };
    let closed_residual = samples.iter().map(|s| s.closed).fold(0.0, f64::max);
    let f_residual = samples.iter().map(|s| s.f).fold(0.0, f64::max);
    let q_min = samples.iter().map(|s| s.q).fold(f64::INFINITY, f64::min);
    let q_max = samples.iter().map(|s| s.q).fold(f64::NEG_INFINITY, f64::max);
    let q_spread = q_max - q_min;

    let (closed, f_integrable, q_integrable) = if C::EXACT {
        let dphi = d(patch, phi)?;
        let fphi = f_of(phi);
        let df = d(patch, &fphi)?;
        let q = q_scalar(phi);
        (dphi.is_zero(), df.is_zero(), q.is_constant())
    } else {
        let scale = q_max.abs().max(q_min.abs());
        (closed_residual <= tol, f_residual <= tol, q_spread < 1e-8 * (1.0 + scale))
    };
    let pointwise_orbits = points
        .iter()
        .zip(&samples)
        .map(|(p, s)| PointOrbit { point: p.iter().map(|x| x.to_f64()).collect(), tag: s.tag })
        .collect::<Vec<_>>();
    let report = IntegrabilityReport {
        closed,
        f_integrable,
        q_integrable,
        f_harmonic: closed && f_integrable,
        closed_residual,
        f_residual,
        q_spread,
        q_min,
        q_max,
        pointwise_orbits,
    };
    if report.f_harmonic {
        if !report.q_integrable {
            return Err(Error::Inconsistent("F-harmonic form with nonconstant Q".into()));
        }
        let stable = |t: SpTag| t.gl().is_stable();
        let first = report.pointwise_orbits[0].tag;
        if report.pointwise_orbits.iter().any(|o| stable(o.tag) != stable(first)) {
            return Err(Error::Inconsistent("F-harmonic form changes stability type".into()));
        }
    }
    Ok(report)
}

/// GL orbit of a field at every grid point.
pub fn pointwise_gl<C: Coef>(patch: &Patch, phi: &Form<C>, tol: f64) -> Result<Vec<crate::classify::GlOrbit>> {
    patch
        .grid_points()
        .par_iter()
        .map(|p| gl_classify(&eval_form(phi, &point_in(p)), tol))
        .collect()
}

/// Largest coefficient of `a − b` over the grid.
pub fn max_difference_on_grid<C: Coef>(patch: &Patch, a: &Form<C>, b: &Form<C>) -> f64 {
    let diff = a.clone() - b.clone();
    patch
        .grid_points()
        .iter()
        .map(|p| max_abs(&eval_form(&diff, &point_in(p))))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
