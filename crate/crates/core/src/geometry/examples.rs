//! Constructors for three model geometries: the flat torus degeneration,
//! the cone-like example on `Λ²T*N` and the local K3 × T² patch.

use rayon::prelude::*;

use super::{sup, LeafChart};
use crate::classify::{normal_form, sp_classify, SpTag};
use crate::error::{Error, Result};
use crate::exterior::{Form, Vector, DIM};
use crate::hitchin::norm_sq;
use crate::invariants::{f_of, q_scalar, standard_omega, SymplecticFrame};
use crate::patch::{constant_form, d, eval_form, format_point, point_in, vector_jet, Coef, Expr, Patch, Poly};
use crate::scalar::{Field, Rational, Ring};

pub const TORUS_NAMES: [&str; DIM] = ["x1", "y1", "x2", "y2", "x3", "y3"];
pub const LAMBDA2_NAMES: [&str; DIM] = ["x1", "t1", "x2", "t2", "x3", "t3"];
pub const K3_NAMES: [&str; DIM] = ["x1", "y1", "x2", "y2", "x", "y"];

/// `φ_t = Re Ω_t` for `Ω_t = τ⁻²(dx¹+τdy¹)∧(dx²+τdy²)∧(dx³+τdy³)`, `t = i/τ`,
/// together with its limit `φ₀`.
#[derive(Clone, Debug)]
pub struct DegenerationFamily {
    pub t: Rational,
    pub phi_t: Form<Rational>,
    pub phi_0: Form<Rational>,
    pub omega: Form<Rational>,
}

/// Pointwise facts about a member of the torus family.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusChecks {
    pub phi0_is_normal_form: bool,
    pub orbit_t: SpTag,
    pub orbit_0: SpTag,
    pub norm_sq: Rational,
    /// `Q(φ_t)` against `ω³/3!`.
    pub q: Rational,
    pub f0_orbit: SpTag,
    /// `Q(φ_t) → 0` while `F(φ₀) ≠ 0`, so `φ̂_t = F(φ_t)/(4t)` is unbounded.
    pub conjugate_blows_up: bool,
}

fn torus_limit_form() -> Form<Rational> {
    Form::e(&[1, 4, 6]) + Form::e(&[2, 3, 6]) + Form::e(&[2, 4, 5])
}

pub fn torus_family(t: Rational) -> Result<DegenerationFamily> {
    if t.sign_tol(0.0) != std::cmp::Ordering::Greater || t > Rational::one() {
        return Err(Error::Domain(format!("t = {t} must lie in (0, 1]")));
    }
    let phi_0 = torus_limit_form();
    let phi_t = phi_0.clone() - Form::e(&[1, 3, 5]).scale(&(t.clone() * t.clone()));
    Ok(DegenerationFamily { t, phi_t, phi_0, omega: standard_omega() })
}

impl DegenerationFamily {
    pub fn checks(&self, tol: f64) -> Result<TorusChecks> {
        let frame = SymplecticFrame::new(self.omega.clone())?;
        let orbit_t = sp_classify(&frame, &self.phi_t, tol)?.tag;
        let orbit_0 = sp_classify(&frame, &self.phi_0, tol)?.tag;
        let c = frame.trivialization().clone();
        let q = q_scalar(&self.phi_t) / (c.clone() * c);
        let f0 = f_of(&self.phi_0);
        let f0_orbit = sp_classify(&frame, &f0, tol)?.tag;
        Ok(TorusChecks {
            phi0_is_normal_form: self.phi_0 == normal_form::<Rational>(SpTag::O0Plus, None)?,
            orbit_t,
            orbit_0,
            norm_sq: norm_sq(&frame, &self.phi_t, tol)?,
            q,
            f0_orbit,
            conjugate_blows_up: q_scalar(&self.phi_0).is_zero() && !f0.is_zero(),
        })
    }

    /// Unit-box patch with period-one leaf coordinates.
    pub fn patch(grid: usize) -> Patch {
        Patch::unit_box(TORUS_NAMES).with_grid(grid)
    }

    /// Chart of `φ₀` with leaves `y = const`.
    pub fn chart(&self, grid: usize) -> Result<LeafChart<Poly>> {
        LeafChart::new(Self::patch(grid), constant_form(&self.phi_0), constant_form(&self.omega), [0, 2, 4], [1, 3, 5])
    }

    pub fn phi_t_field<C: Coef>(&self) -> Form<C> {
        constant_form(&self.phi_t)
    }
}

/// `φ_f = d(fα)` on `Λ²T*N` over a flat chart of `N` with constant metric
/// `g`, in the coordinates `(x¹, t¹, x², t², x³, t³)`. The leaves are the
/// fibers `x = const` and `f(r) = r^{-1/2}(r^{3/2} + C)^{1/3}` with
/// `r = tᵀ g t / det g`.
#[derive(Clone, Debug)]
pub struct Lambda2Example {
    pub g: [[f64; 3]; 3],
    pub g_inv: [[f64; 3]; 3],
    pub det_g: f64,
    pub c: f64,
    pub alpha: Form<Expr>,
    pub r: Expr,
    /// `∂r/∂t^j`.
    pub dr: [Expr; 3],
    pub f: Expr,
    pub f_prime: Expr,
    pub phi: Form<Expr>,
    pub omega: Form<Expr>,
    pub chart: LeafChart<Expr>,
}

const X_AXES: [usize; 3] = [0, 2, 4];
const T_AXES: [usize; 3] = [1, 3, 5];

fn one_based(axes: &[usize]) -> Vec<usize> {
    axes.iter().map(|a| a + 1).collect()
}

fn spd_check(g: &[[f64; 3]; 3]) -> Result<(f64, [[f64; 3]; 3], f64)> {
    let m = nalgebra::Matrix3::from_fn(|i, j| g[i][j]);
    if (m - m.transpose()).abs().max() > 1e-12 * m.abs().max() {
        return Err(Error::Domain("g must be symmetric".into()));
    }
    let eig = m.symmetric_eigen().eigenvalues;
    if eig.min() <= 0.0 {
        return Err(Error::Domain("g must be positive definite".into()));
    }
    let inv = m.try_inverse().ok_or_else(|| Error::Domain("g is singular".into()))?;
    Ok((m.determinant(), std::array::from_fn(|i| std::array::from_fn(|j| inv[(i, j)])), eig.min()))
}

/// Builds the example on `x ∈ [0,1]³`, `t ∈ [t_lower, t_upper]`. The fields do
/// not depend on `x`, so the grid uses one node along each `x` axis and
/// `grid` nodes along each `t` axis.
pub fn lambda2_build(g: [[f64; 3]; 3], c: f64, t_lower: [Rational; 3], t_upper: [Rational; 3], grid: usize) -> Result<Lambda2Example> {
    let (det_g, g_inv, lambda_min) = spd_check(&g)?;
    // r ≥ λ_min(g)|t|²/det g on the box
    let nearest: [f64; 3] = std::array::from_fn(|j| {
        let (a, b) = (t_lower[j].to_f64(), t_upper[j].to_f64());
        if a > 0.0 {
            a
        } else if b < 0.0 {
            b
        } else {
            0.0
        }
    });
    let r_bound = lambda_min * nearest.iter().map(|x| x * x).sum::<f64>() / det_g;
    let excluded = if c < 0.0 { (-c).powf(2.0 / 3.0) } else { 0.0 };
    if r_bound <= excluded {
        return Err(Error::Domain(format!(
            "the t box reaches r ≤ {excluded} near t = ({}, {}, {})",
            nearest[0], nearest[1], nearest[2]
        )));
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let lower = std::array::from_fn(|i| if i % 2 == 0 { zero.clone() } else { t_lower[i / 2].clone() });
    let upper = std::array::from_fn(|i| if i % 2 == 0 { one.clone() } else { t_upper[i / 2].clone() });
    let patch = Patch::new(LAMBDA2_NAMES, lower, upper)?.with_grid_axes([1, grid, 1, grid, 1, grid]);

    let t: [Expr; 3] = std::array::from_fn(|j| Expr::var(T_AXES[j]));
    let k = |x: f64| Expr::constant(x);
    let mut r = Expr::zero();
    for i in 0..3 {
        for j in 0..3 {
            r = r + k(g[i][j] / det_g) * t[i].clone() * t[j].clone();
        }
    }
    let dr: [Expr; 3] = std::array::from_fn(|j| (0..3).fold(Expr::zero(), |acc, i| acc + k(2.0 * g[j][i] / det_g) * t[i].clone()));
    let u = r.powf(1.5) + k(c);
    let f = r.powf(-0.5) * u.cbrt();
    let f_prime = k(-0.5) * r.powf(-1.5) * u.cbrt() + k(0.5) * u.powf(-2.0 / 3.0);

    let pair = |a: usize, b: usize| one_based(&[X_AXES[a], X_AXES[b]]);
    let alpha = Form::term(t[0].clone(), &pair(1, 2)) + Form::term(t[1].clone(), &pair(2, 0)) + Form::term(t[2].clone(), &pair(0, 1));
    let d_alpha = (0..3).fold(Form::zero(3), |acc, j| {
        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
        acc + Form::term(Expr::one(), &one_based(&[T_AXES[j], X_AXES[a], X_AXES[b]]))
    });
    let dr_form = (0..3).fold(Form::zero(1), |acc, j| acc + Form::term(dr[j].clone(), &one_based(&[T_AXES[j]])));
    let phi = d_alpha.scale(&f) + dr_form.wedge(&alpha).scale(&f_prime);
    let s = det_g.sqrt();
    let mut omega = Form::zero(2);
    for kk in 0..3 {
        for j in 0..3 {
            if g[kk][j] != 0.0 {
                omega = omega + Form::term(k(g[kk][j] / s), &one_based(&[X_AXES[kk], T_AXES[j]]));
            }
        }
    }
    let chart = LeafChart::new(patch, phi.clone(), omega.clone(), T_AXES, X_AXES)?;
    Ok(Lambda2Example { g, g_inv, det_g, c, alpha, r, dr, f, f_prime, phi, omega, chart })
}

/// Largest deviations from the displayed closed forms, over a point set.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct Lambda2Checks {
    pub points: usize,
    /// `|f²(f + 2rf′) − 1|`.
    pub f_identity: f64,
    /// `α∧ω − (√det g/2) dx¹∧dx²∧dx³∧dr`.
    pub basic_identity: f64,
    /// `dα ∧ ω`.
    pub d_alpha_primitive: f64,
    /// `d(fα)` by finite differences against `f dα + f′ dr∧α`.
    pub exterior_derivative: f64,
    /// `F(φ_f) + 4√det g dx¹∧dx²∧dx³`.
    pub f_form: f64,
    /// `V_j` against `2f√det g [(f + 2rf′)∂t^j − f′ ∂_j r 𝓔]`.
    pub frame: f64,
    /// `h_jk` against `2f⁻¹g_jk − ff′ det g ∂_j r ∂_k r`.
    pub h: f64,
    /// `h^{jk}` against `(f/2)[g^{jk} + (f′ det g/2f) g^{jp} ∂_p r ∂_q r g^{qk}]`.
    pub h_inverse: f64,
    /// `V_l h_jk` against `−4f′√det g (g_jk ∂_l r + g_kl ∂_j r + g_lj ∂_k r)
    /// − C(5r^{3/2} + 2C)/(2r⁴(r^{3/2}+C)^{2/3}) (det g)^{3/2} ∂_j r ∂_k r ∂_l r`,
    /// relative to the largest entry when that exceeds one.
    pub h3: f64,
    /// Relative `|det h − 8 det g|`.
    pub det_h: f64,
    /// Relative deviation of `S` from `5C²/(ρ⁴(ρ³+C)^{4/3})`; absolute when
    /// the closed form vanishes.
    pub scalar: f64,
    /// Smallest eigenvalue of Ricci relative to `h`.
    pub ricci_min: f64,
    /// `|∇^B_{∂t^i} ∂t^j|`.
    pub bott_fibre: f64,
}

impl Lambda2Example {
    pub fn sqrt_det_g(&self) -> f64 {
        self.det_g.sqrt()
    }

    /// `5C²/(ρ⁴(ρ³+C)^{4/3})` with `ρ = √r`.
    pub fn scalar_closed_form(&self, r: f64) -> f64 {
        let rho = r.sqrt();
        5.0 * self.c * self.c / (rho.powi(4) * (rho.powi(3) + self.c).powf(4.0 / 3.0))
    }

    /// `g_jk` in the frame of the printed formulas.
    fn h_formula(&self, f: f64, fp: f64, dr: &[f64; 3]) -> [[f64; 3]; 3] {
        std::array::from_fn(|j| std::array::from_fn(|k| 2.0 / f * self.g[j][k] - f * fp * self.det_g * dr[j] * dr[k]))
    }

    fn h_inverse_formula(&self, f: f64, fp: f64, dr: &[f64; 3]) -> [[f64; 3]; 3] {
        let gi = &self.g_inv;
        let w: [f64; 3] = std::array::from_fn(|j| (0..3).map(|p| gi[j][p] * dr[p]).sum());
        std::array::from_fn(|j| std::array::from_fn(|k| f / 2.0 * (gi[j][k] + fp * self.det_g / (2.0 * f) * w[j] * w[k])))
    }

    fn h3_formula(&self, r: f64, fp: f64, dr: &[f64; 3]) -> [[[f64; 3]; 3]; 3] {
        let (g, c, s) = (&self.g, self.c, self.sqrt_det_g());
        let u = r.powf(1.5) + c;
        let cubic = c * (5.0 * r.powf(1.5) + 2.0 * c) / (2.0 * r.powi(4) * u.powf(2.0 / 3.0)) * self.det_g.powf(1.5);
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    -4.0 * fp * s * (g[j][k] * dr[l] + g[k][l] * dr[j] + g[l][j] * dr[k]) - cubic * dr[j] * dr[k] * dr[l]
                })
            })
        })
    }

    pub fn checks_at(&self, points: &[[Rational; DIM]], tol: f64) -> Result<Lambda2Checks> {
        let patch = self.chart.patch();
        let s = self.sqrt_det_g();
        let x123 = one_based(&X_AXES);
        let f_target: Form<f64> = Form::term(-4.0 * s, &x123);
        let dr_form: Form<Expr> = (0..3).fold(Form::zero(1), |acc, j| acc + Form::term(self.dr[j].clone(), &one_based(&[T_AXES[j]])));
        let basic_target = Form::term(Expr::constant(s / 2.0), &x123).wedge(&dr_form);
        let basic = self.alpha.wedge(&self.omega) - basic_target;
        let d_alpha_prim = d(patch, &self.alpha)?.wedge(&self.omega);
        let numeric_d = d(patch, &self.alpha.scale(&self.f))?;
        let frame = SymplecticFrame::new(eval_form(&self.omega, &[0.0; DIM]))?;
        let triv = *frame.trivialization();
        let rows: Vec<Lambda2Checks> = points
            .par_iter()
            .map(|p| {
                let at = |e: Error| Error::Domain(format!("at {}: {e}", format_point(p)));
                let pv = point_in::<f64>(p);
                let (r, f, fp) = (self.r.eval(&pv), self.f.eval(&pv), self.f_prime.eval(&pv));
                let dr: [f64; 3] = std::array::from_fn(|j| self.dr[j].eval(&pv));
                let t: [f64; 3] = std::array::from_fn(|j| pv[T_AXES[j]]);
                let mut out = Lambda2Checks { points: 1, ..Default::default() };
                out.f_identity = (f * f * (f + 2.0 * r * fp) - 1.0).abs();
                out.basic_identity = sup(eval_form(&basic, &pv).terms().map(|(_, c)| c));
                out.d_alpha_primitive = sup(eval_form(&d_alpha_prim, &pv).terms().map(|(_, c)| c));
                let diff = eval_form(&numeric_d, &pv) - eval_form(&self.phi, &pv);
                out.exterior_derivative = sup(diff.terms().map(|(_, c)| c));
                let phi_p = eval_form(&self.phi, &pv);
                let f_phi = f_of(&phi_p).scale(&(1.0 / triv));
                out.f_form = sup((f_phi - f_target.clone()).terms().map(|(_, c)| c));

                let cp = self.chart.point(&pv, false);
                let frame_v = cp.frame_values();
                for j in 0..3 {
                    let mut printed = Vector::<f64>::zero();
                    for i in 0..3 {
                        let e = if i == j { f + 2.0 * r * fp } else { 0.0 };
                        printed.0[T_AXES[i]] = 2.0 * f * s * (e - fp * dr[j] * t[i]);
                    }
                    out.frame = out.frame.max(sup(&(frame_v[j].clone() - printed).0));
                }
                let h = cp.hessian_jets().map(|x| x.value);
                let hf = self.h_formula(f, fp, &dr);
                let hi = h.inverse().ok_or_else(|| at(Error::Domain("h is singular".into())))?;
                let hif = self.h_inverse_formula(f, fp, &dr);
                for j in 0..3 {
                    for k in 0..3 {
                        out.h = out.h.max((h.get(j, k) - hf[j][k]).abs());
                        out.h_inverse = out.h_inverse.max((hi.get(j, k) - hif[j][k]).abs());
                    }
                }
                let lp = super::hessian::leaf_point_public(&self.chart, p, tol).map_err(at)?;
                let h3f = self.h3_formula(r, fp, &dr);
                let h3_scale = h3f.iter().flatten().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            out.h3 = out.h3.max((lp.h3[j][k][l] - h3f[j][k][l]).abs() / h3_scale);
                        }
                    }
                }
                out.det_h = (lp.det_h - 8.0 * self.det_g).abs() / (8.0 * self.det_g);
                let closed = self.scalar_closed_form(r);
                out.scalar = if closed.abs() > 0.0 { (lp.scalar - closed).abs() / closed.abs() } else { lp.scalar.abs() };
                out.ricci_min = lp.ricci_min;
                for i in 0..3 {
                    for j in 0..3 {
                        let x = vector_jet(&Vector::<Expr>::basis(T_AXES[i]), &pv, false);
                        let y = vector_jet(&Vector::<Expr>::basis(T_AXES[j]), &pv, false);
                        out.bott_fibre = out.bott_fibre.max(sup(&cp.bott(&x, &y).map_err(at)?.0));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().fold(Lambda2Checks { ricci_min: f64::INFINITY, ..Default::default() }, |a, b| Lambda2Checks {
            points: a.points + b.points,
            f_identity: a.f_identity.max(b.f_identity),
            basic_identity: a.basic_identity.max(b.basic_identity),
            d_alpha_primitive: a.d_alpha_primitive.max(b.d_alpha_primitive),
            exterior_derivative: a.exterior_derivative.max(b.exterior_derivative),
            f_form: a.f_form.max(b.f_form),
            frame: a.frame.max(b.frame),
            h: a.h.max(b.h),
            h_inverse: a.h_inverse.max(b.h_inverse),
            h3: a.h3.max(b.h3),
            det_h: a.det_h.max(b.det_h),
            scalar: a.scalar.max(b.scalar),
            ricci_min: a.ricci_min.min(b.ricci_min),
            bott_fibre: a.bott_fibre.max(b.bott_fibre),
        }))
    }
}

/// Local K3 × T² model: `φ₀ = f dx₂∧dy₂∧dx − (dx₁∧dx₂ − dy₁∧dy₂)∧dy` and
/// `ω = dx₁∧dy₂ + dy₁∧dx₂ + dx∧dy` in the coordinates `(x₁, y₁, x₂, y₂, x, y)`.
#[derive(Clone, Debug)]
pub struct K3PatchExample<C: Coef> {
    pub f: C,
    pub phi: Form<C>,
    pub omega: Form<C>,
    pub chart: LeafChart<C>,
}

/// Deviations from the displayed K3 patch formulas over the grid.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct K3Checks {
    pub points: usize,
    pub all_o0_plus: bool,
    /// `F(φ₀) − 4f dx₂∧dy₂∧dy`.
    pub f_form: f64,
    /// `K∂x₂ + 2f∂y₁`, `K∂y₂ + 2f∂x₁`, `K∂y + 2∂x`.
    pub k_images: f64,
    /// Leaf metric against `(1/2f)(dx₁² + dy₁²) + ½dx²`.
    pub leaf_metric: f64,
    /// `f` depends on `x₂`, `y₂` only.
    pub f_depends_on_base_pair: bool,
}

pub fn k3_patch<C: Coef>(f: C, patch: Patch) -> Result<K3PatchExample<C>> {
    let bad = patch.grid_points().into_iter().find(|p| f.eval(&point_in(p)).sign_tol(0.0) != std::cmp::Ordering::Greater);
    if let Some(p) = bad {
        return Err(Error::Domain(format!("f must be positive, fails at {}", format_point(&p))));
    }
    let phi = Form::term(f.clone(), &[3, 4, 5]) - Form::term(C::one(), &[1, 3, 6]) + Form::term(C::one(), &[2, 4, 6]);
    let omega = Form::term(C::one(), &[1, 4]) + Form::term(C::one(), &[2, 3]) + Form::term(C::one(), &[5, 6]);
    let chart = LeafChart::new(patch, phi.clone(), omega.clone(), [0, 1, 4], [2, 3, 5])?;
    Ok(K3PatchExample { f, phi, omega, chart })
}

impl<C: Coef> K3PatchExample<C> {
    pub fn checks(&self, tol: f64) -> Result<K3Checks> {
        let frame = SymplecticFrame::new(eval_form(&self.omega, &std::array::from_fn(|_| C::Value::zero())))?;
        let triv = frame.trivialization().clone();
        let points = self.chart.patch().grid_points();
        let two = C::Value::from_i64(2);
        let rows: Vec<K3Checks> = points
            .par_iter()
            .map(|p| {
                let pv = point_in::<C::Value>(p);
                let fv = self.f.eval(&pv);
                let phi_p = eval_form(&self.phi, &pv);
                let orbit = sp_classify(&frame, &phi_p, tol)?.tag;
                let f_phi = f_of(&phi_p).scale(&(C::Value::one() / triv.clone()));
                let target = Form::term(C::Value::from_i64(4) * fv.clone(), &[3, 4, 6]);
                let f_form = sup((f_phi - target).terms().map(|(_, c)| c).collect::<Vec<_>>());
                let cp = self.chart.point(&pv, false);
                let k = cp.k_value();
                let col = |j: usize| Vector::<C::Value>(std::array::from_fn(|i| k.get(i, j).clone()));
                let twof = two.clone() * fv.clone();
                let images = [
                    col(2) + Vector::<C::Value>::basis(1).scale(&twof),
                    col(3) + Vector::<C::Value>::basis(0).scale(&twof),
                    col(5) + Vector::<C::Value>::basis(4).scale(&two),
                ];
                let k_images = images.iter().map(|v| sup(&v.0)).fold(0.0, f64::max);
                let leaf = [0, 1, 4];
                let half = C::Value::one() / two.clone();
                let diag = [half.clone() / fv.clone(), half.clone() / fv.clone(), half];
                let mut leaf_metric: f64 = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        let g = cp.leaf_metric(&Vector::basis(leaf[a]), &Vector::basis(leaf[b]), tol)?;
                        let want = if a == b { diag[a].clone() } else { C::Value::zero() };
                        leaf_metric = leaf_metric.max((g - want).to_f64().abs());
                    }
                }
                Ok(K3Checks { points: 1, all_o0_plus: orbit == SpTag::O0Plus, f_form, k_images, leaf_metric, f_depends_on_base_pair: false })
            })
            .collect::<Result<_>>()?;
        let mut out = rows.into_iter().fold(K3Checks { all_o0_plus: true, ..Default::default() }, |a, b| K3Checks {
            points: a.points + b.points,
            all_o0_plus: a.all_o0_plus && b.all_o0_plus,
            f_form: a.f_form.max(b.f_form),
            k_images: a.k_images.max(b.k_images),
            leaf_metric: a.leaf_metric.max(b.leaf_metric),
            f_depends_on_base_pair: false,
        });
        out.f_depends_on_base_pair = [0, 1, 4, 5].iter().all(|&a| !self.f.depends_on(a));
        Ok(out)
    }
}
