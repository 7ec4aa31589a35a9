//! Hessian data of the leaf metric in the `D`-parallel frame, curvature,
//! and the connection identities.

use rayon::prelude::*;

use super::{sup, ChartPoint, LeafChart};
use crate::error::{Error, Result};
use crate::exterior::{Vector, DIM};
use crate::linalg::Mat;
use crate::patch::{format_point, integrability_report, point_in, vector_jet, Coef, Jet, Poly, VectorField};
use crate::rng::{random_poly, seeded};
use crate::scalar::{Field, Rational, Ring};

/// Leaf geometry at one grid point.
#[derive(Clone, Debug)]
pub struct LeafPoint<V> {
    pub point: [Rational; DIM],
    /// `g(∂l_a, ∂l_b)` in the leaf coordinates.
    pub leaf_metric: Mat<V>,
    /// `V_j = K ∂b_j`.
    pub frame: [Vector<V>; 3],
    /// `h_jk = g(V_j, V_k)`.
    pub h: Mat<V>,
    /// `h_jkl = V_l h_jk`.
    pub h3: [[[V; 3]; 3]; 3],
    pub ricci: Mat<V>,
    /// `h^{jk} R_jk`.
    pub scalar: V,
    /// `¼|Dg|² = ¼ h^{st} h^{ik} h^{jl} h_{sij} h_{tkl}`.
    pub scalar_from_dg: V,
    pub det_h: V,
    /// `max_l |V_l det h| / |det h|`.
    pub det_drift: f64,
    /// Smallest eigenvalue of the Ricci matrix relative to `h`.
    pub ricci_min: f64,
}

#[derive(Clone, Debug)]
pub struct LeafGeometry<V> {
    pub points: Vec<LeafPoint<V>>,
    pub h_asymmetry: f64,
    pub h3_asymmetry: f64,
    pub det_drift: f64,
    pub ricci_min: f64,
    /// `max |S − ¼|Dg|²|`.
    pub scalar_gap: f64,
}

fn h3_asymmetry<V: Field>(h3: &[[[V; 3]; 3]; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let x = h3[j][k][l].to_f64();
                for y in [&h3[k][j][l], &h3[j][l][k], &h3[l][k][j]] {
                    worst = worst.max((x - y.to_f64()).abs());
                }
            }
        }
    }
    worst
}

/// `R_jk = ¼ h^{st} h^{lp} (h_{jps} h_{klt} − h_{jkt} h_{pls})`.
pub fn ricci<V: Field>(hinv: &Mat<V>, h3: &[[[V; 3]; 3]; 3]) -> Mat<V> {
    let quarter = V::one() / V::from_i64(4);
    Mat::from_fn(3, 3, |j, k| {
        let mut acc = V::zero();
        for s in 0..3 {
            for t in 0..3 {
                for l in 0..3 {
                    for p in 0..3 {
                        let w = hinv.get(s, t).clone() * hinv.get(l, p).clone();
                        acc = acc + w * (h3[j][p][s].clone() * h3[k][l][t].clone() - h3[j][k][t].clone() * h3[p][l][s].clone());
                    }
                }
            }
        }
        acc * quarter.clone()
    })
}

/// `¼ h^{st} h^{ik} h^{jl} h_{sij} h_{tkl}`.
pub fn dg_norm<V: Field>(hinv: &Mat<V>, h3: &[[[V; 3]; 3]; 3]) -> V {
    let mut acc = V::zero();
    for s in 0..3 {
        for t in 0..3 {
            for i in 0..3 {
                for k in 0..3 {
                    for j in 0..3 {
                        for l in 0..3 {
                            acc = acc
                                + hinv.get(s, t).clone() * hinv.get(i, k).clone() * hinv.get(j, l).clone() * h3[s][i][j].clone() * h3[t][k][l].clone();
                        }
                    }
                }
            }
        }
    }
    acc / V::from_i64(4)
}

/// Smallest generalized eigenvalue of `(R, h)` for positive definite `h`.
fn relative_min_eigen<V: Field>(r: &Mat<V>, h: &Mat<V>) -> f64 {
    let to = |m: &Mat<V>| nalgebra::Matrix3::from_fn(|i, j| m.get(i, j).to_f64());
    let (r, h) = (to(r), to(h));
    let Some(chol) = nalgebra::Cholesky::new(h) else { return f64::NAN };
    let linv = chol.l().try_inverse().unwrap_or_else(nalgebra::Matrix3::zeros);
    let m = linv * r * linv.transpose();
    let m = (m + m.transpose()) * 0.5;
    m.symmetric_eigen().eigenvalues.min()
}

fn leaf_point<C: Coef>(chart: &LeafChart<C>, p: &[Rational; DIM], tol: f64) -> Result<LeafPoint<C::Value>> {
    let pv = point_in::<C::Value>(p);
    let cp = chart.point(&pv, false);
    let at = |e: Error| Error::Domain(format!("at {}: {e}", format_point(p)));
    let frame = cp.frame_values();
    let hj = cp.hessian_jets();
    let h = hj.map(|x| x.value.clone());
    let h3: [[[C::Value; 3]; 3]; 3] =
        std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| hj.get(j, k).derivative_along(&frame[l].0))));
    let det_jet = hj.det_cofactor();
    let det_h = det_jet.value.clone();
    let drift = (0..3).map(|l| det_jet.derivative_along(&frame[l].0).to_f64().abs()).fold(0.0, f64::max) / det_h.to_f64().abs();
    let hinv = h.inverse().ok_or_else(|| at(Error::Domain("h is singular".into())))?;
    let ricci = ricci(&hinv, &h3);
    let scalar = (0..3).flat_map(|j| (0..3).map(move |k| (j, k))).fold(C::Value::zero(), |acc, (j, k)| {
        acc + hinv.get(j, k).clone() * ricci.get(j, k).clone()
    });
    let scalar_from_dg = dg_norm(&hinv, &h3);
    let leaf = chart.leaf_axes();
    let mut leaf_metric = Mat::zeros(3, 3);
    for a in 0..3 {
        for b in 0..3 {
            let g = cp.leaf_metric(&Vector::basis(leaf[a]), &Vector::basis(leaf[b]), tol).map_err(at)?;
            leaf_metric.set(a, b, g);
        }
    }
    let ricci_min = relative_min_eigen(&ricci, &h);
    Ok(LeafPoint { point: p.clone(), leaf_metric, frame, h, h3, ricci, scalar, scalar_from_dg, det_h, det_drift: drift, ricci_min })
}

/// Leaf Hessian data at every grid point. Requires `φ` to be F-harmonic on
/// the patch; fails when `h` or `Dh` is not symmetric within `tol`.
pub fn hessian_data<C: Coef>(chart: &LeafChart<C>, tol: f64) -> Result<LeafGeometry<C::Value>> {
    let report = integrability_report(chart.patch(), chart.phi(), chart.omega(), tol)?;
    if !report.f_harmonic {
        return Err(Error::Domain(format!(
            "φ is not F-harmonic on the patch (|dφ| ≤ {:.3e}, |dF(φ)| ≤ {:.3e})",
            report.closed_residual, report.f_residual
        )));
    }
    let points = hessian_points(chart, tol)?;
    let h_asymmetry = points
        .iter()
        .map(|lp| sup(&lp.h.sub(&lp.h.transpose()).entries().cloned().collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let h3_asym = points.iter().map(|lp| h3_asymmetry(&lp.h3)).fold(0.0, f64::max);
    let scale = points.iter().map(|lp| sup(lp.h.entries())).fold(1.0, f64::max);
    if h_asymmetry > tol * scale {
        return Err(Error::Inconsistent(format!("h is not symmetric (residual {h_asymmetry:.3e})")));
    }
    let scale3 = points.iter().map(|lp| lp.h3.iter().flatten().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max)).fold(1.0, f64::max);
    if h3_asym > tol * scale3 {
        return Err(Error::Inconsistent(format!("Dh is not totally symmetric (residual {h3_asym:.3e})")));
    }
    Ok(LeafGeometry {
        h_asymmetry,
        h3_asymmetry: h3_asym,
        det_drift: points.iter().map(|lp| lp.det_drift).fold(0.0, f64::max),
        ricci_min: points.iter().map(|lp| lp.ricci_min).fold(f64::INFINITY, f64::min),
        scalar_gap: points.iter().map(|lp| (lp.scalar.to_f64() - lp.scalar_from_dg.to_f64()).abs()).fold(0.0, f64::max),
        points,
    })
}

/// Leaf data at every grid point without the F-harmonicity precondition.
pub fn hessian_points<C: Coef>(chart: &LeafChart<C>, tol: f64) -> Result<Vec<LeafPoint<C::Value>>> {
    chart.patch().grid_points().par_iter().map(|p| leaf_point(chart, p, tol)).collect()
}

/// Residuals of the connection identities over the grid.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct ConnectionLaws {
    /// `|D_{V_i} V_j|`.
    pub parallel: f64,
    /// `|D_{fX}Y − f D_X Y|`.
    pub function_linear: f64,
    /// `|D_X(fY) − f D_X Y − X(f) Y|`.
    pub leibniz: f64,
    /// `|D_X Y − D_Y X − [X, Y]|`.
    pub torsion: f64,
    /// `|R(V_i, V_j) V_k|`.
    pub curvature_frame: f64,
    /// `|R(X, Y) Z|` on polynomial combinations of the frame.
    pub curvature_fields: f64,
    /// `|X g(Y, Z) − g(D_X Y, Z) − g(Y, ∇^B_X Z)|`.
    pub duality: f64,
    /// Largest entry of the quantities being compared, for relative use.
    pub scale: f64,
}

impl ConnectionLaws {
    pub fn max(&self) -> f64 {
        [self.parallel, self.function_linear, self.leibniz, self.torsion, self.curvature_frame, self.curvature_fields, self.duality]
            .into_iter()
            .fold(0.0, f64::max)
    }

    fn merge(self, o: ConnectionLaws) -> ConnectionLaws {
        ConnectionLaws {
            parallel: self.parallel.max(o.parallel),
            function_linear: self.function_linear.max(o.function_linear),
            leibniz: self.leibniz.max(o.leibniz),
            torsion: self.torsion.max(o.torsion),
            curvature_frame: self.curvature_frame.max(o.curvature_frame),
            curvature_fields: self.curvature_fields.max(o.curvature_fields),
            duality: self.duality.max(o.duality),
            scale: self.scale.max(o.scale),
        }
    }
}

/// Random test data: three leaf fields and a scalar function.
struct TestFields<C: Coef> {
    fields: [VectorField<C>; 3],
    function: C,
}

fn test_fields<C: Coef>(chart: &LeafChart<C>, seed: u64) -> TestFields<C> {
    let mut rng = seeded(seed);
    let mut poly = || Poly::one() + random_poly(&mut rng, 1, 2);
    let fields = std::array::from_fn(|_| {
        let coeffs: [Poly; 3] = std::array::from_fn(|_| poly());
        super::leaf_test_field(chart, &coeffs)
    });
    TestFields { fields, function: C::from_poly(&poly()) }
}

fn norm<V: Field>(v: &Vector<V>) -> f64 {
    sup(&v.0)
}

fn laws_at<C: Coef>(chart: &LeafChart<C>, tests: &TestFields<C>, p: &[Rational; DIM]) -> Result<ConnectionLaws> {
    let pv = point_in::<C::Value>(p);
    let cp: ChartPoint<C::Value> = chart.point(&pv, true);
    let frame2: [Vector<Jet<C::Value>>; 3] = std::array::from_fn(|j| cp.v[j].clone());
    let frame1: [Vector<Jet<C::Value>>; 3] = std::array::from_fn(|j| frame2[j].map(Jet::first_order));
    let f2: [Vector<Jet<C::Value>>; 3] = std::array::from_fn(|i| vector_jet(&tests.fields[i], &pv, true));
    let f1: [Vector<Jet<C::Value>>; 3] = std::array::from_fn(|i| f2[i].map(Jet::first_order));
    let s = tests.function.jet(&pv, false);
    let mut laws = ConnectionLaws::default();

    for i in 0..3 {
        for j in 0..3 {
            laws.parallel = laws.parallel.max(norm(&cp.connection(&frame1[i], &frame1[j])?));
            for k in 0..3 {
                laws.curvature_frame = laws.curvature_frame.max(norm(&cp.curvature(&frame2[i], &frame2[j], &frame2[k])?));
            }
        }
    }
    let (x, y, z) = (&f1[0], &f1[1], &f1[2]);
    let dxy = cp.connection(x, y)?;
    let sval = s.value.clone();
    let xs = x.map(|c| c.clone() * s.clone());
    let ys = y.map(|c| c.clone() * s.clone());
    laws.function_linear = norm(&(cp.connection(&xs, y)? - dxy.scale(&sval)));
    let xv: Vec<C::Value> = x.0.iter().map(|c| c.value.clone()).collect();
    let yv = y.map(|c| c.value.clone());
    laws.leibniz = norm(&(cp.connection(x, &ys)? - dxy.scale(&sval) - yv.scale(&s.derivative_along(&xv))));
    let dyx = cp.connection(y, x)?;
    let br = crate::patch::bracket_at(x, y);
    laws.torsion = norm(&(dxy.clone() - dyx - br));
    laws.curvature_fields = norm(&cp.curvature(&f2[0], &f2[1], &f2[2])?);

    let g = cp.leaf_metric_jet(y, z)?;
    let lhs = g.derivative_along(&xv);
    let cst = |v: &Vector<C::Value>| v.map(|c| Jet::constant(c.clone()));
    let zv = z.map(|c| c.value.clone());
    let bott = cp.bott(x, z)?;
    let rhs = cp.leaf_metric_jet(&cst(&dxy), &cst(&zv))?.value + cp.leaf_metric_jet(&cst(&yv), &cst(&bott))?.value;
    laws.duality = (lhs.clone() - rhs).to_f64().abs();
    laws.scale = [norm(&dxy), lhs.to_f64().abs(), norm(&yv)].into_iter().fold(1.0, f64::max);
    Ok(laws)
}

/// Checks `D`-parallelism of the frame, function linearity, the Leibniz
/// rule, torsion-freeness, flatness and duality with the Bott connection at
/// every grid point, using seeded polynomial combinations of the frame.
pub fn connection_laws<C: Coef>(chart: &LeafChart<C>, seed: u64) -> Result<ConnectionLaws> {
    let tests = test_fields(chart, seed);
    let points = chart.patch().grid_points();
    let laws: Vec<ConnectionLaws> = points
        .par_iter()
        .map(|p| laws_at(chart, &tests, p).map_err(|e| Error::Domain(format!("at {}: {e}", format_point(p)))))
        .collect::<Result<_>>()?;
    Ok(laws.into_iter().fold(ConnectionLaws::default(), ConnectionLaws::merge))
}

pub(crate) fn leaf_point_public<C: Coef>(chart: &LeafChart<C>, p: &[Rational; DIM], tol: f64) -> Result<LeafPoint<C::Value>> {
    leaf_point(chart, p, tol)
}
