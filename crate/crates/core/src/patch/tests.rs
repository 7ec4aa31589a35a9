use super::*;
use crate::classify::SpTag;
use crate::invariants::standard_omega;
use crate::rng::{primitive_basis, random_poly, random_primitive_field, random_vector_field, seeded};
use crate::scalar::{rational, rational_int};

const NAMES: [&str; DIM] = ["x1", "y1", "x2", "y2", "x3", "y3"];

fn unit() -> Patch {
    Patch::unit_box(NAMES).with_grid(2)
}

fn poly_omega() -> Form<Poly> {
    constant_form(&standard_omega::<Rational>())
}

fn torus_limit() -> Form<Poly> {
    let mut phi = Form::zero(3);
    for idx in [[1, 4, 6], [2, 3, 6], [2, 4, 5]] {
        phi = phi + Form::term(Poly::one(), &idx);
    }
    phi
}

fn random_poly_form(rng: &mut crate::rng::SplitMix64, grade: usize, degree: usize) -> Form<Poly> {
    let blades = Blade::all_of_grade(grade);
    let mut f = Form::zero(grade);
    for _ in 0..3 {
        let b = blades[rand::Rng::gen_range(rng, 0..blades.len())];
        f.add_term(b, random_poly(rng, degree, 2));
    }
    f
}

#[test]
fn d_of_coordinate_one_form() {
    let alpha = Form::term(Poly::var(0), &[2]);
    let da = d(&unit(), &alpha).unwrap();
    assert_eq!(da, Form::term(Poly::one(), &[1, 2]));
}

#[test]
fn d_of_constant_form_vanishes() {
    assert!(d(&unit(), &torus_limit()).unwrap().is_zero());
}

#[test]
fn d_rejects_top_degree() {
    let top = Form::term(Poly::one(), &[1, 2, 3, 4, 5, 6]);
    assert!(matches!(d(&unit(), &top), Err(Error::Grade { .. })));
}

#[test]
fn d_squared_is_zero() {
    let mut rng = seeded(11);
    let patch = unit();
    for n in 0..100 {
        let grade = n % 5;
        let f = random_poly_form(&mut rng, grade, 3);
        let dd = d(&patch, &d(&patch, &f).unwrap()).unwrap();
        assert!(dd.is_zero(), "{f:?}");
    }
}

#[test]
fn leibniz_rule() {
    let mut rng = seeded(12);
    let patch = unit();
    for _ in 0..20 {
        let a = random_poly_form(&mut rng, 1, 2);
        let b = random_poly_form(&mut rng, 2, 2);
        let lhs = d(&patch, &a.wedge(&b)).unwrap();
        let rhs = d(&patch, &a).unwrap().wedge(&b) - a.wedge(&d(&patch, &b).unwrap());
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bracket_examples() {
    let patch = unit();
    let d1 = Vector::<Poly>::basis(0);
    let d2 = Vector::<Poly>::basis(2);
    assert!(lie_bracket(&patch, &d1, &d2).is_zero());
    let x = Vector::<Poly>::basis(2).scale(&Poly::var(0));
    assert_eq!(lie_bracket(&patch, &x, &d1), -Vector::<Poly>::basis(2));
}

#[test]
fn jacobi_identity() {
    let mut rng = seeded(13);
    let patch = unit();
    for _ in 0..10 {
        let x = random_vector_field(&mut rng, 2);
        let y = random_vector_field(&mut rng, 2);
        let z = random_vector_field(&mut rng, 2);
        let br = |a: &Vector<Poly>, b: &Vector<Poly>| lie_bracket(&patch, a, b);
        let sum = br(&x, &br(&y, &z)) + br(&y, &br(&z, &x)) + br(&z, &br(&x, &y));
        assert!(sum.is_zero());
        assert_eq!(br(&x, &y), -br(&y, &x));
    }
}

#[test]
fn bracket_jets_agree_with_field_bracket() {
    let mut rng = seeded(14);
    let patch = unit();
    let x = random_vector_field(&mut rng, 2);
    let y = random_vector_field(&mut rng, 2);
    let field = lie_bracket(&patch, &x, &y);
    for p in patch.random_points(5, 1) {
        let at = bracket_at(&vector_jet(&x, &p, false), &vector_jet(&y, &p, false));
        assert_eq!(at, eval_vector(&field, &p));
        let jet = bracket_jet(&vector_jet(&x, &p, true), &vector_jet(&y, &p, true));
        assert_eq!(jet_values(&jet), at);
    }
}

#[test]
fn nijenhuis_of_constant_endomorphism_vanishes() {
    let mut rng = seeded(15);
    let k = crate::rng::random_gl(&mut rng).map(|c| Poly::constant(c.clone()));
    let x = random_vector_field(&mut rng, 2);
    let y = random_vector_field(&mut rng, 2);
    for p in unit().random_points(5, 2) {
        assert!(nijenhuis(&k, &x, &y, &p).is_zero());
    }
}

#[test]
fn nijenhuis_of_torus_limit_vanishes() {
    let k = k_field(&torus_limit(), &poly_omega()).unwrap();
    let mut rng = seeded(16);
    let x = random_vector_field(&mut rng, 2);
    let y = random_vector_field(&mut rng, 2);
    for p in unit().random_points(5, 3) {
        assert!(nijenhuis(&k, &x, &y, &p).is_zero());
    }
}

#[test]
fn nijenhuis_is_tensorial() {
    let mut rng = seeded(17);
    let basis = primitive_basis();
    let phi = random_primitive_field(&mut rng, &basis, 1);
    let k = k_field(&phi, &poly_omega()).unwrap();
    let x = random_vector_field(&mut rng, 1);
    let y = random_vector_field(&mut rng, 1);
    for p in unit().random_points(4, 4) {
        // g(p) = 1 with nonzero gradient at p
        let g = Poly::one() + (Poly::var(1) - Poly::constant(p[1].clone())) * random_poly(&mut rng, 1, 2)
            + Poly::var(3)
            - Poly::constant(p[3].clone());
        let base = nijenhuis(&k, &x, &y, &p);
        assert_eq!(nijenhuis(&k, &x.scale(&g), &y, &p), base);
        assert_eq!(nijenhuis(&k, &x, &y.scale(&g), &p), base);
    }
}

#[test]
fn nijenhuis_field_matches_pointwise() {
    let mut rng = seeded(18);
    let basis = primitive_basis();
    let phi = random_primitive_field(&mut rng, &basis, 1);
    let k = k_field(&phi, &poly_omega()).unwrap();
    let x = random_vector_field(&mut rng, 1);
    let y = random_vector_field(&mut rng, 1);
    let patch = unit();
    let field = nijenhuis_field(&patch, &k, &x, &y);
    for p in patch.random_points(3, 5) {
        assert_eq!(eval_vector(&field, &p), nijenhuis(&k, &x, &y, &p));
    }
}

#[test]
fn three_term_identity_holds_and_printed_form_does_not() {
    let mut rng = seeded(19);
    let basis = primitive_basis();
    let omega = poly_omega();
    let patch = unit();
    let mut mixed_seen = false;
    for n in 0..4 {
        let phi = random_primitive_field(&mut rng, &basis, 2);
        let k = k_field(&phi, &omega).unwrap();
        let x = random_vector_field(&mut rng, 1);
        let y = random_vector_field(&mut rng, 1);
        for p in patch.random_points(5, n) {
            let terms = nijenhuis_terms(&phi, &omega, &x, &y, &p).unwrap();
            let lhs = nijenhuis(&k, &x, &y, &p);
            assert_eq!(terms.three_term(), lhs);
            let mixed = terms.mixed_vector();
            assert_eq!(terms.four_term(), lhs - mixed.clone());
            mixed_seen |= !mixed.is_zero();
        }
    }
    assert!(mixed_seen);
}

#[test]
fn rhs_vanishes_for_constant_form() {
    let mut rng = seeded(20);
    let x = random_vector_field(&mut rng, 2);
    let y = random_vector_field(&mut rng, 2);
    let p = [rational(1, 3), rational(1, 2), rational_int(0), rational(2, 3), rational(1, 5), rational(3, 4)];
    let rhs = nijenhuis_rhs(&torus_limit(), &poly_omega(), &x, &y, &p).unwrap();
    assert!(rhs.is_zero());
}

#[test]
fn torus_limit_report() {
    let patch = Patch::unit_box(NAMES).with_grid(3);
    let report = integrability_report(&patch, &torus_limit(), &poly_omega(), 1e-9).unwrap();
    assert!(report.closed && report.f_integrable && report.q_integrable && report.f_harmonic);
    assert_eq!(report.q_spread, 0.0);
    assert_eq!(report.q_max, 0.0);
    assert_eq!(report.pointwise_orbits.len(), 3usize.pow(6));
    assert_eq!(report.uniform_orbit(), Some(SpTag::O0Plus));
}

#[test]
fn non_primitive_field_is_reported_with_location() {
    let omega = poly_omega();
    let phi = omega.wedge(&Form::term(Poly::var(0), &[2])) + Form::term(Poly::one(), &[1, 3, 5]);
    let err = integrability_report(&unit(), &phi, &omega, 1e-9).unwrap_err();
    match err {
        Error::NotPrimitiveAt(loc) => assert!(loc.starts_with('(')),
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn finite_difference_d_matches_exact_d() {
    let mut rng = seeded(21);
    let patch = Patch::unit_box(NAMES).with_grid(3);
    for grade in 0..5 {
        let f = random_poly_form(&mut rng, grade, 3);
        let exact = d(&patch, &f).unwrap().map(Expr::from_poly);
        let numeric = d(&patch, &f.map(Expr::from_poly)).unwrap();
        assert!(max_difference_on_grid(&patch, &exact, &numeric) < 1e-6);
    }
}

#[test]
fn float_report_on_polynomial_field() {
    let patch = Patch::unit_box(NAMES).with_grid(2);
    let omega = poly_omega().map(Expr::from_poly);
    let phi = torus_limit().map(Expr::from_poly) + Form::term(Expr::var(0) * Expr::var(0), &[1, 3, 5]);
    let report = integrability_report(&patch, &phi, &omega, 1e-9).unwrap();
    assert!(report.closed);
    assert!(!report.f_integrable);
    assert!(!report.f_harmonic);
}
