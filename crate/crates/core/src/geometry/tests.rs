use super::examples::{LAMBDA2_NAMES, K3_NAMES};
use super::*;
use crate::patch::{constant_form, integrability_report, Expr, Poly};
use crate::scalar::{rational, rational_int, Rational};

fn identity() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn diag(a: f64, b: f64, c: f64) -> [[f64; 3]; 3] {
    [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]]
}

fn t_box(lo: i64, hi: i64) -> ([Rational; 3], [Rational; 3]) {
    ([lo, lo, lo].map(rational_int), [hi, hi, hi].map(rational_int))
}

fn torus_chart(grid: usize) -> LeafChart<Poly> {
    torus_family(rational(1, 2)).unwrap().chart(grid).unwrap()
}

fn axis(i: usize) -> Vector<Rational> {
    Vector::basis(i)
}

#[test]
fn torus_family_values() {
    let fam = torus_family(rational(1, 4)).unwrap();
    let c = fam.checks(0.0).unwrap();
    assert!(c.phi0_is_normal_form);
    assert_eq!(c.orbit_t, crate::classify::SpTag::OMinusPlus);
    assert_eq!(c.orbit_0, crate::classify::SpTag::O0Plus);
    assert_eq!(c.norm_sq, rational_int(1));
    assert_eq!(c.q, rational_int(-1));
    assert!(c.conjugate_blows_up);
    for t in [rational(1, 3), rational(7, 10), rational_int(1)] {
        let c = torus_family(t.clone()).unwrap().checks(0.0).unwrap();
        assert_eq!(c.norm_sq, rational_int(4) * t.clone());
        assert_eq!(c.q, rational_int(-16) * t.clone() * t);
    }
}

#[test]
fn torus_family_rejects_bad_parameter() {
    for t in [rational_int(0), rational(-1, 2), rational(3, 2)] {
        assert!(matches!(torus_family(t), Err(Error::Domain(_))));
    }
}

#[test]
fn torus_foliation_and_leaf_metric() {
    let chart = torus_chart(2);
    chart.check_foliation(0.0).unwrap();
    let p = point_in::<Rational>(&std::array::from_fn(|_| rational(1, 3)));
    let basis = foliation_basis(chart.phi(), chart.omega(), &p, 0.0).unwrap();
    assert_eq!(basis.len(), 3);
    let half = rational(1, 2);
    for (i, &a) in [0, 2, 4].iter().enumerate() {
        for (j, &b) in [0, 2, 4].iter().enumerate() {
            let g = leaf_metric(&chart, &axis(a), &axis(b), &p, 0.0).unwrap();
            assert_eq!(g, if i == j { half.clone() } else { rational_int(0) });
        }
    }
    let frame = d_parallel_frame(&chart);
    for (j, &x) in [0, 2, 4].iter().enumerate() {
        assert_eq!(crate::patch::eval_vector(&frame[j], &p), axis(x).scale(&rational_int(-2)));
    }
}

#[test]
fn leaf_metric_rejects_transverse_vectors() {
    let chart = torus_chart(2);
    let p = point_in::<Rational>(&std::array::from_fn(|_| rational(1, 3)));
    assert!(matches!(leaf_metric(&chart, &axis(1), &axis(0), &p, 0.0), Err(Error::Domain(_))));
}

#[test]
fn leaf_metric_scales_with_inverse_square_of_phi() {
    let fam = torus_family(rational(1, 2)).unwrap();
    let scaled = LeafChart::new(
        DegenerationFamily::patch(2),
        constant_form::<Poly>(&fam.phi_0.scale(&rational_int(3))),
        constant_form(&fam.omega),
        [0, 2, 4],
        [1, 3, 5],
    )
    .unwrap();
    let p = point_in::<Rational>(&std::array::from_fn(|_| rational(1, 5)));
    let g = leaf_metric(&scaled, &axis(2), &axis(2), &p, 0.0).unwrap();
    // K is quadratic in φ, so g = ω(K⁻¹·, ·) picks up 1/s²
    assert_eq!(g, rational(1, 18));
}

#[test]
fn torus_hessian_data_is_flat() {
    let geo = hessian_data(&torus_chart(2), 0.0).unwrap();
    for lp in &geo.points {
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(lp.h.get(j, k).clone(), if j == k { rational_int(2) } else { rational_int(0) });
                assert_eq!(lp.leaf_metric.get(j, k).clone(), if j == k { rational(1, 2) } else { rational_int(0) });
            }
        }
        assert!(lp.h3.iter().flatten().flatten().all(|x| *x == rational_int(0)));
        assert_eq!(lp.scalar, rational_int(0));
        assert_eq!(lp.det_h, rational_int(8));
    }
    assert_eq!(geo.scalar_gap, 0.0);
}

#[test]
fn torus_connection_laws_are_exact() {
    let laws = connection_laws(&torus_chart(2), 5).unwrap();
    assert_eq!(laws.max(), 0.0);
}

#[test]
fn torus_bott_derivative_of_constant_fields_vanishes() {
    let chart = torus_chart(2);
    let x = Vector::<Poly>::basis(0);
    let y = Vector::<Poly>::basis(2);
    let p = point_in::<Rational>(&std::array::from_fn(|_| rational(1, 7)));
    assert!(bott_derivative(&chart, &x, &y, &p, 0.0).unwrap().is_zero());
    let transverse = Vector::<Poly>::basis(1);
    assert!(bott_derivative(&chart, &x, &transverse, &p, 0.0).is_err());
}

#[test]
fn torus_fibration_periods() {
    let data = fibration_analysis(&torus_chart(2), 2, 1e-12).unwrap();
    let r = 2f64.sqrt();
    assert_eq!(data.fibers.len(), 8);
    for fiber in &data.fibers {
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                assert_eq!(fiber.lambda[i][j], -d);
                assert!((fiber.mu[i][j] + d / r).abs() < 1e-14);
                assert!((fiber.g_base[i][j] - d / r).abs() < 1e-14);
            }
        }
        assert!((fiber.volume - 0.5 / r).abs() < 1e-14);
    }
    assert!(data.isometry_residual <= 1e-10);
    assert!(data.monge_ampere && data.monge_ampere_consistent);
    assert!(data.richardson < 1e-14);
    assert_eq!(data.coclosed_residual, 0.0);
}

#[test]
fn fibration_requires_period_one() {
    let fam = torus_family(rational(1, 2)).unwrap();
    let mut upper: [Rational; DIM] = std::array::from_fn(|_| rational_int(1));
    upper[2] = rational_int(2);
    let patch = Patch::new(examples::TORUS_NAMES, std::array::from_fn(|_| rational_int(0)), upper).unwrap().with_grid(2);
    let chart = fam.chart(2).unwrap().with_patch(patch);
    assert!(matches!(fibration_analysis(&chart, 2, 1e-12), Err(Error::Domain(_))));
}

#[test]
fn lambda2_printed_formulas() {
    let cases = [(0.0, identity(), 1, 2), (1.0, identity(), 1, 2), (1.0, diag(1.0, 2.0, 3.0), 1, 2), (-1.0, identity(), 2, 3)];
    for (c, g, lo, hi) in cases {
        let (lo, hi) = t_box(lo, hi);
        let ex = lambda2_build(g, c, lo, hi, 2).unwrap();
        let pts = ex.chart.patch().random_points(10, 3);
        let r = ex.checks_at(&pts, 1e-8).unwrap();
        assert!(r.f_identity < 1e-10, "{r:?}");
        assert!(r.basic_identity < 1e-12 && r.d_alpha_primitive == 0.0, "{r:?}");
        assert!(r.exterior_derivative < 1e-8, "{r:?}");
        assert!(r.f_form < 1e-8, "{r:?}");
        assert!(r.frame < 1e-10 && r.h < 1e-10 && r.h_inverse < 1e-10 && r.h3 < 1e-10, "{r:?}");
        assert!(r.det_h < 1e-9, "{r:?}");
        assert!(r.scalar < 1e-6, "{r:?}");
        assert!(r.ricci_min > -1e-10, "{r:?}");
        assert_eq!(r.bott_fibre, 0.0);
    }
}

#[test]
fn lambda2_det_h_at_unit_vector() {
    let (lo, hi) = t_box(1, 2);
    let ex = lambda2_build(identity(), 1.0, lo, hi, 2).unwrap();
    let p = [0, 1, 0, 0, 0, 0].map(rational_int);
    let r = ex.checks_at(&[p], 1e-8).unwrap();
    assert!(r.det_h < 1e-12);
    assert!(r.scalar < 1e-12);
}

#[test]
fn lambda2_curvature_sign() {
    let (lo, hi) = t_box(1, 2);
    let flat = lambda2_build(identity(), 0.0, lo.clone(), hi.clone(), 2).unwrap();
    let pts = flat.chart.patch().grid_points();
    for lp in hessian::hessian_points(&flat.chart, 1e-8).unwrap() {
        assert!(lp.scalar.abs() < 1e-10);
    }
    let curved = lambda2_build(identity(), 1.0, lo, hi, 2).unwrap();
    for lp in hessian::hessian_points(&curved.chart, 1e-8).unwrap() {
        assert!(lp.scalar > 0.0);
        assert!((lp.scalar - lp.scalar_from_dg).abs() < 1e-10 * lp.scalar.abs().max(1.0));
        assert!(lp.det_drift < 1e-9);
    }
    assert_eq!(pts.len(), 8);
}

#[test]
fn lambda2_is_f_harmonic_and_foliated() {
    let (lo, hi) = t_box(1, 2);
    let ex = lambda2_build(diag(1.0, 2.0, 3.0), 1.0, lo, hi, 2).unwrap();
    ex.chart.check_foliation(1e-9).unwrap();
    let report = integrability_report(ex.chart.patch(), ex.chart.phi(), ex.chart.omega(), 1e-6).unwrap();
    assert!(report.f_harmonic, "{report:?}");
    let geo = hessian_data(&ex.chart, 1e-6).unwrap();
    assert!(geo.h3_asymmetry < 1e-9 && geo.det_drift < 1e-9);
    assert!(geo.ricci_min > -1e-10);
}

#[test]
fn lambda2_connection_laws() {
    let (lo, hi) = t_box(1, 2);
    let ex = lambda2_build(identity(), 1.0, lo, hi, 2).unwrap();
    let laws = connection_laws(&ex.chart, 9).unwrap();
    assert!(laws.max() <= 1e-8 * laws.scale, "{laws:?}");
}

#[test]
fn lambda2_rejects_bad_input() {
    let (lo, hi) = t_box(1, 2);
    let not_spd = [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    assert!(matches!(lambda2_build(not_spd, 1.0, lo.clone(), hi.clone(), 2), Err(Error::Domain(_))));
    let (zlo, zhi) = t_box(-1, 1);
    assert!(matches!(lambda2_build(identity(), 1.0, zlo, zhi, 2), Err(Error::Domain(_))));
    assert!(matches!(lambda2_build(identity(), -8.0, lo, hi, 2), Err(Error::Domain(_))));
    assert_eq!(LAMBDA2_NAMES[1], "t1");
}

fn k3_box(grid: usize) -> Patch {
    Patch::unit_box(K3_NAMES).with_grid(grid)
}

#[test]
fn k3_patch_printed_formulas() {
    let x2 = Poly::var(2);
    let y2 = Poly::var(3);
    let fs = [
        Poly::one(),
        Poly::one() + (x2.clone() * x2.clone() + y2.clone() * y2.clone()) * Poly::constant(rational(1, 4)),
        Poly::from_i64(2) + x2.clone() * y2.clone() + x2,
    ];
    for f in fs {
        let ex = k3_patch(f, k3_box(2)).unwrap();
        ex.chart.check_foliation(0.0).unwrap();
        let c = ex.checks(0.0).unwrap();
        assert!(c.all_o0_plus, "{c:?}");
        assert_eq!((c.f_form, c.k_images, c.leaf_metric), (0.0, 0.0, 0.0), "{c:?}");
        assert!(c.f_depends_on_base_pair);
        let report = integrability_report(ex.chart.patch(), &ex.phi, &ex.omega, 0.0).unwrap();
        assert!(report.closed);
    }
}

#[test]
fn k3_patch_float_backend() {
    let f = (Expr::one() + Expr::var(2) * Expr::var(2)).sqrt();
    let ex = k3_patch(f, k3_box(3)).unwrap();
    let c = ex.checks(1e-9).unwrap();
    assert!(c.all_o0_plus);
    assert!(c.f_form < 1e-9 && c.k_images < 1e-9 && c.leaf_metric < 1e-9, "{c:?}");
}

#[test]
fn k3_patch_closedness_needs_base_pair_dependence() {
    let ex = k3_patch(Poly::one() + Poly::var(0), k3_box(2)).unwrap();
    assert!(!ex.checks(0.0).unwrap().f_depends_on_base_pair);
    let report = integrability_report(ex.chart.patch(), &ex.phi, &ex.omega, 0.0).unwrap();
    assert!(!report.closed);
}

#[test]
fn k3_patch_rejects_nonpositive_f() {
    let f = Poly::var(2) - Poly::constant(rational(1, 2));
    assert!(matches!(k3_patch(f, k3_box(2)), Err(Error::Domain(_))));
}
