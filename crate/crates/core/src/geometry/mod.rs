//! Geometry of `O₀⁺` fields: the Lagrangian foliation `L = ker K`, the leaf
//! metric `g(X, Y) = ω(K⁻¹X, Y)`, the connection `D_X Y = K[X, K⁻¹Y]`, the
//! Bott connection, Hessian curvature of the leaves and torus-fibration
//! periods.
//!
//! A [`LeafChart`] fixes coordinates in which the leaves are the level sets
//! of three base coordinates. `ω` must have constant coefficients but need
//! not be in Darboux form. With `∂b_j` the base coordinate fields,
//! `V_j = K ∂b_j` is a leaf-tangent frame and `K⁻¹(Σ c^j V_j) = Σ c^j ∂b_j`
//! modulo `L`.

pub mod examples;
pub mod fibration;
pub mod hessian;

use rayon::prelude::*;

use crate::classify::{sp_classify, SpTag};
use crate::error::{Error, Result};
use crate::exterior::{kernel, Form, Vector, DIM};
use crate::invariants::{column_space, f_of, k_of, SymplecticFrame};
use crate::linalg::{same_span, LinearAlgebra, Mat};
use crate::patch::{constant_frame, endo_jet, eval_form, format_point, k_field, point_in, vector_jet, Coef, EndoField, Jet, Patch, VectorField};
use crate::scalar::{Field, Ring};

pub use examples::{k3_patch, lambda2_build, torus_family, DegenerationFamily, K3PatchExample, Lambda2Example};
pub use fibration::{fibration_analysis, FibrationData};
pub use hessian::{connection_laws, hessian_data, ConnectionLaws, LeafGeometry, LeafPoint};

/// Largest absolute entry.
pub(crate) fn sup<'a, V: Field + 'a>(xs: impl IntoIterator<Item = &'a V>) -> f64 {
    xs.into_iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Inverse of a small matrix over any ring with enough units, by cofactors.
pub(crate) fn cofactor_inverse<R: Ring>(m: &Mat<R>) -> Option<Mat<R>> {
    let n = m.rows();
    let det_inv = m.det_cofactor().inverse()?;
    let minor = |r: usize, c: usize| {
        Mat::from_fn(n - 1, n - 1, |i, j| {
            let ii = if i < r { i } else { i + 1 };
            let jj = if j < c { j } else { j + 1 };
            m.get(ii, jj).clone()
        })
        .det_cofactor()
    };
    Some(Mat::from_fn(n, n, |i, j| {
        let cof = minor(j, i);
        let signed = if (i + j) % 2 == 0 { cof } else { -cof };
        signed * det_inv.clone()
    }))
}

/// Basis of `ker K(φ)` at `p`, after checking that `φ(p)` lies in `O₀⁺` and
/// that `ker K = Im K = ker F(φ)` is `ω`-isotropic and `q`-null.
pub fn foliation_basis<C: Coef>(phi: &Form<C>, omega: &Form<C>, p: &[C::Value; DIM], tol: f64) -> Result<Vec<Vector<C::Value>>> {
    let frame = SymplecticFrame::new(eval_form(omega, p))?;
    let phi_p = eval_form(phi, p);
    let orbit = sp_classify(&frame, &phi_p, tol)?;
    if orbit.tag != SpTag::O0Plus {
        return Err(Error::WrongOrbit(format!("the foliation needs O0+, found {}", orbit.tag)));
    }
    let c = frame.trivialization().clone();
    let k = k_of(&phi_p).scale(&(C::Value::one() / c));
    let ker = C::Value::null_space(&k);
    if ker.len() != 3 {
        return Err(Error::Inconsistent(format!("ker K has dimension {}", ker.len())));
    }
    if !same_span(&ker, &column_space(&k)) {
        return Err(Error::Inconsistent("ker K differs from Im K".into()));
    }
    let ker_f: Vec<Vec<C::Value>> = kernel(&f_of(&phi_p)).iter().map(Vector::to_vec).collect();
    if !same_span(&ker, &ker_f) {
        return Err(Error::Inconsistent("ker K differs from ker F(φ)".into()));
    }
    let basis: Vec<Vector<C::Value>> = ker.iter().map(|v| Vector::from_slice(v)).collect();
    let scale = sup(frame.matrix().entries()).max(1.0);
    let q = frame.matrix().mul(&k);
    for u in &basis {
        for v in &basis {
            if frame.pair(u, v).to_f64().abs() > tol * scale {
                return Err(Error::Inconsistent("ker K is not isotropic".into()));
            }
        }
        let row = q.transpose().apply(&u.0);
        if sup(&row) > tol * scale * sup(q.entries()).max(1.0) {
            return Err(Error::Inconsistent("ker K is not q-null".into()));
        }
    }
    Ok(basis)
}

/// Coordinates adapted to the foliation of an `O₀⁺` field.
#[derive(Clone, Debug)]
pub struct LeafChart<C: Coef> {
    patch: Patch,
    phi: Form<C>,
    omega: Form<C>,
    leaf: [usize; 3],
    base: [usize; 3],
    frame: SymplecticFrame<C::Value>,
    k: EndoField<C>,
}

impl<C: Coef> LeafChart<C> {
    /// Checks that the axes split the coordinates, that `ω` is constant and
    /// vanishes on the leaf axes, and that `ω` pairs leaf and base axes
    /// nondegenerately. The foliation itself is checked by
    /// [`LeafChart::check_foliation`].
    pub fn new(patch: Patch, phi: Form<C>, omega: Form<C>, leaf: [usize; 3], base: [usize; 3]) -> Result<Self> {
        let mut seen = [false; DIM];
        for &a in leaf.iter().chain(&base) {
            if a >= DIM || seen[a] {
                return Err(Error::Domain(format!("leaf axes {leaf:?} and base axes {base:?} must split the six coordinates")));
            }
            seen[a] = true;
        }
        let frame = constant_frame(&omega)?;
        let m = frame.matrix();
        if leaf.iter().any(|&a| leaf.iter().any(|&b| !m.get(a, b).is_zero())) {
            return Err(Error::Domain("omega does not vanish on the leaf axes".into()));
        }
        let k = k_field(&phi, &omega)?;
        let chart = LeafChart { patch, phi, omega, leaf, base, frame, k };
        if chart.pairing().inverse().is_none() {
            return Err(Error::Domain("omega pairs leaf and base axes degenerately".into()));
        }
        Ok(chart)
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn phi(&self) -> &Form<C> {
        &self.phi
    }

    pub fn omega(&self) -> &Form<C> {
        &self.omega
    }

    pub fn frame(&self) -> &SymplecticFrame<C::Value> {
        &self.frame
    }

    pub fn leaf_axes(&self) -> [usize; 3] {
        self.leaf
    }

    pub fn base_axes(&self) -> [usize; 3] {
        self.base
    }

    /// `K(φ)` trivialized by `ω³/3!`.
    pub fn k_field(&self) -> &EndoField<C> {
        &self.k
    }

    pub fn with_patch(mut self, patch: Patch) -> Self {
        self.patch = patch;
        self
    }

    /// `A[n][a] = ω(∂l_a, ∂b_n)`.
    fn pairing(&self) -> Mat<C::Value> {
        let m = self.frame.matrix();
        Mat::from_fn(3, 3, |n, a| m.get(self.leaf[a], self.base[n]).clone())
    }

    /// `V_j = K ∂b_j`.
    pub fn frame_field(&self, j: usize) -> VectorField<C> {
        Vector(std::array::from_fn(|i| self.k.get(i, self.base[j]).clone()))
    }

    /// Leaf-tangent field `Σ c^j V_j`.
    pub fn leaf_field(&self, coeffs: &[C; 3]) -> VectorField<C> {
        (0..3).fold(Vector::zero(), |acc, j| acc + self.frame_field(j).scale(&coeffs[j]))
    }

    /// Jets of the chart data at `p`.
    pub fn point(&self, p: &[C::Value; DIM], second_order: bool) -> ChartPoint<C::Value> {
        let k = endo_jet(&self.k, p, second_order);
        let v: [Vector<Jet<C::Value>>; 3] = std::array::from_fn(|j| Vector(std::array::from_fn(|i| k.get(i, self.base[j]).clone())));
        let rows = Mat::from_fn(3, 3, |a, j| v[j].0[self.leaf[a]].clone());
        let frame_inv = cofactor_inverse(&rows);
        ChartPoint { k, v, frame_inv, omega: self.frame.matrix().clone(), pairing_inv: self.pairing().inverse(), leaf: self.leaf, base: self.base }
    }

    /// At every grid point, `ker K(φ)` is spanned by the leaf axes.
    pub fn check_foliation(&self, tol: f64) -> Result<()> {
        let leaf_basis: Vec<Vec<C::Value>> = self.leaf.iter().map(|&a| Vector::<C::Value>::basis(a).to_vec()).collect();
        self.patch.grid_points().par_iter().try_for_each(|p| {
            let basis = foliation_basis(&self.phi, &self.omega, &point_in(p), tol)
                .map_err(|e| Error::Domain(format!("at {}: {e}", format_point(p))))?;
            let basis: Vec<Vec<C::Value>> = basis.iter().map(Vector::to_vec).collect();
            if same_span(&basis, &leaf_basis) {
                Ok(())
            } else {
                Err(Error::Domain(format!("ker K is not spanned by the leaf axes at {}", format_point(p))))
            }
        })
    }
}

/// Chart data at one point: `K`, the frame `V_j` and the inverse of the
/// leaf block of the frame, all as jets.
#[derive(Clone, Debug)]
pub struct ChartPoint<V> {
    pub k: Mat<Jet<V>>,
    pub v: [Vector<Jet<V>>; 3],
    frame_inv: Option<Mat<Jet<V>>>,
    omega: Mat<V>,
    pairing_inv: Option<Mat<V>>,
    leaf: [usize; 3],
    base: [usize; 3],
}

impl<V: LinearAlgebra> ChartPoint<V> {
    pub fn k_value(&self) -> Mat<V> {
        self.k.map(|j| j.value.clone())
    }

    pub fn frame_values(&self) -> [Vector<V>; 3] {
        std::array::from_fn(|j| self.v[j].map(|c| c.value.clone()))
    }

    fn frame_inv(&self) -> Result<&Mat<Jet<V>>> {
        self.frame_inv.as_ref().ok_or_else(|| Error::Domain("the frame V_j is degenerate at this point".into()))
    }

    /// `c^j` with `Y = Σ c^j V_j`, read off the leaf components.
    pub fn coefficients(&self, y: &Vector<Jet<V>>) -> Result<[Jet<V>; 3]> {
        let inv = self.frame_inv()?;
        Ok(std::array::from_fn(|j| (0..3).fold(Jet::zero(), |acc, a| acc + inv.get(j, a).clone() * y.0[self.leaf[a]].clone())))
    }

    /// Largest component of `Y − Σ c^j V_j` at the point, zero exactly
    /// when `Y` is leaf-tangent.
    pub fn leaf_defect(&self, y: &Vector<Jet<V>>) -> Result<f64> {
        let c = self.coefficients(y)?;
        let rebuilt = (0..3).fold(Vector::<V>::zero(), |acc, j| {
            acc + self.v[j].map(|x| x.value.clone()).scale(&c[j].value)
        });
        let yv = y.map(|x| x.value.clone());
        Ok(sup(&(yv - rebuilt).0))
    }

    fn require_leaf(&self, y: &Vector<Jet<V>>, tol: f64) -> Result<()> {
        let scale = sup(y.0.iter().map(|j| &j.value)).max(1.0);
        if self.leaf_defect(y)? > tol * scale {
            return Err(Error::Domain("vector is not tangent to the leaf".into()));
        }
        Ok(())
    }

    /// `K⁻¹Y = Σ c^j ∂b_j` as a jet field.
    pub fn preimage(&self, y: &Vector<Jet<V>>) -> Result<Vector<Jet<V>>> {
        let c = self.coefficients(y)?;
        let mut out = Vector::zero();
        for (j, cj) in c.into_iter().enumerate() {
            out.0[self.base[j]] = cj;
        }
        Ok(out)
    }

    /// `D_X Y = K[X, K⁻¹Y]` from first-order jets.
    pub fn connection(&self, x: &Vector<Jet<V>>, y: &Vector<Jet<V>>) -> Result<Vector<V>> {
        let u = self.preimage(y)?;
        let br = crate::patch::bracket_at(x, &u);
        Ok(Vector::apply(&self.k_value(), &br))
    }

    /// `D_X Y` as a first-order jet; needs second-order chart data and inputs.
    pub fn connection_jet(&self, x: &Vector<Jet<V>>, y: &Vector<Jet<V>>) -> Result<Vector<Jet<V>>> {
        let u = self.preimage(y)?;
        let br = crate::patch::bracket_jet(x, &u);
        let k = self.k.map(Jet::first_order);
        Ok(Vector::apply(&k, &br))
    }

    /// `R(X,Y)Z = D_X D_Y Z − D_Y D_X Z − D_{[X,Y]} Z` from second-order jets.
    pub fn curvature(&self, x: &Vector<Jet<V>>, y: &Vector<Jet<V>>, z: &Vector<Jet<V>>) -> Result<Vector<V>> {
        let dyz = self.connection_jet(y, z)?;
        let dxz = self.connection_jet(x, z)?;
        let xy = crate::patch::bracket_jet(x, y);
        let first = |v: &Vector<Jet<V>>| v.map(Jet::first_order);
        Ok(self.connection(&first(x), &dyz)? - self.connection(&first(y), &dxz)? - self.connection(&xy, &first(z))?)
    }

    /// `g(Y, Z) = ω(K⁻¹Y, Z)` as a jet.
    pub fn leaf_metric_jet(&self, y: &Vector<Jet<V>>, z: &Vector<Jet<V>>) -> Result<Jet<V>> {
        let u = self.preimage(y)?;
        let mut acc = Jet::zero();
        for a in 0..DIM {
            for b in 0..DIM {
                let w = self.omega.get(a, b);
                if !w.is_zero() {
                    acc = acc + u.0[a].clone() * z.0[b].clone() * Jet::constant(w.clone());
                }
            }
        }
        Ok(acc)
    }

    pub fn leaf_metric(&self, y: &Vector<V>, z: &Vector<V>, tol: f64) -> Result<V> {
        let yj = y.map(|c| Jet::constant(c.clone()));
        let zj = z.map(|c| Jet::constant(c.clone()));
        self.require_leaf(&yj, tol)?;
        self.require_leaf(&zj, tol)?;
        Ok(self.leaf_metric_jet(&yj, &zj)?.value)
    }

    /// `∇^B_X Y`, the leaf-tangent vector with
    /// `ω(∇^B_X Y, ∂b_n) = X ω(Y, ∂b_n) − ω(∂_{b_n} X, Y)`.
    pub fn bott(&self, x: &Vector<Jet<V>>, y: &Vector<Jet<V>>) -> Result<Vector<V>> {
        let inv = self.pairing_inv.as_ref().ok_or_else(|| Error::Domain("degenerate leaf/base pairing".into()))?;
        let xv: Vec<V> = x.0.iter().map(|c| c.value.clone()).collect();
        let yv = y.map(|c| c.value.clone());
        let rhs: Vec<V> = (0..3)
            .map(|n| {
                let bn = self.base[n];
                let mut pair = Jet::zero();
                for i in 0..DIM {
                    let w = self.omega.get(i, bn);
                    if !w.is_zero() {
                        pair = pair + y.0[i].clone() * Jet::constant(w.clone());
                    }
                }
                let dx = Vector(std::array::from_fn(|i| x.0[i].grad[bn].clone()));
                pair.derivative_along(&xv) - crate::invariants::bilinear(&self.omega, &dx, &yv)
            })
            .collect();
        let w = inv.apply(&rhs);
        let mut out = Vector::zero();
        for (a, wa) in w.into_iter().enumerate() {
            out.0[self.leaf[a]] = wa;
        }
        Ok(out)
    }

    /// `h_jk = g(V_j, V_k) = ω(∂b_j, V_k)` as jets.
    pub fn hessian_jets(&self) -> Mat<Jet<V>> {
        Mat::from_fn(3, 3, |j, k| {
            let bj = self.base[j];
            (0..DIM).fold(Jet::zero(), |acc, i| {
                let w = self.omega.get(bj, i);
                if w.is_zero() {
                    acc
                } else {
                    acc + self.v[k].0[i].clone() * Jet::constant(w.clone())
                }
            })
        })
    }
}

/// `g(X, Y) = ω(K⁻¹X, Y)` for leaf-tangent `X`, `Y` at `p`.
pub fn leaf_metric<C: Coef>(chart: &LeafChart<C>, x: &Vector<C::Value>, y: &Vector<C::Value>, p: &[C::Value; DIM], tol: f64) -> Result<C::Value> {
    chart.point(p, false).leaf_metric(x, y, tol)
}

/// The frame `V_j = K ∂b_j`.
pub fn d_parallel_frame<C: Coef>(chart: &LeafChart<C>) -> [VectorField<C>; 3] {
    std::array::from_fn(|j| chart.frame_field(j))
}

/// `D_X Y` at `p` for leaf-tangent fields.
pub fn connection<C: Coef>(chart: &LeafChart<C>, x: &VectorField<C>, y: &VectorField<C>, p: &[C::Value; DIM], tol: f64) -> Result<Vector<C::Value>> {
    let cp = chart.point(p, false);
    let (xj, yj) = (vector_jet(x, p, false), vector_jet(y, p, false));
    cp.require_leaf(&xj, tol)?;
    cp.require_leaf(&yj, tol)?;
    cp.connection(&xj, &yj)
}

/// `∇^B_X Y` at `p` for leaf-tangent fields.
pub fn bott_derivative<C: Coef>(chart: &LeafChart<C>, x: &VectorField<C>, y: &VectorField<C>, p: &[C::Value; DIM], tol: f64) -> Result<Vector<C::Value>> {
    let cp = chart.point(p, false);
    let (xj, yj) = (vector_jet(x, p, false), vector_jet(y, p, false));
    cp.require_leaf(&xj, tol)?;
    cp.require_leaf(&yj, tol)?;
    cp.bott(&xj, &yj)
}

/// Leaf-tangent test field `Σ c^j V_j` with polynomial coefficients.
pub fn leaf_test_field<C: Coef>(chart: &LeafChart<C>, coeffs: &[crate::patch::Poly; 3]) -> VectorField<C> {
    chart.leaf_field(&std::array::from_fn(|j| C::from_poly(&coeffs[j])))
}

#[cfg(test)]
mod tests;
