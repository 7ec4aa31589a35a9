//! Property tests over small-integer rational forms.

use proptest::prelude::*;

use threeform::classify::{gl_classify, sp_classify};
use threeform::config::{Overrides, Settings};
use threeform::exterior::{Blade, Form};
use threeform::invariants::{f_of, k_of, q_scalar, SymplecticFrame};
use threeform::io::{form_to_string, parse_form, AnyForm};
use threeform::linalg::Mat;
use threeform::rng::{primitive_basis, random_gl, random_symplectic, seeded};
use threeform::scalar::{rational_int, Rational};

fn form_from(grade: usize, coeffs: &[i64]) -> Form<Rational> {
    Form::from_terms(grade, Blade::all_of_grade(grade).into_iter().zip(coeffs).map(|(b, &c)| (b, rational_int(c))))
}

fn three_form() -> impl Strategy<Value = Form<Rational>> {
    prop::collection::vec(-3i64..=3, 20).prop_map(|c| form_from(3, &c))
}

/// Forms with few nonzero terms reach the degenerate orbits often.
fn sparse_three_form() -> impl Strategy<Value = Form<Rational>> {
    prop::collection::vec((0usize..20, -2i64..=2), 1..6).prop_map(|terms| {
        let mut c = vec![0; 20];
        for (i, v) in terms {
            c[i] = v;
        }
        form_from(3, &c)
    })
}

fn primitive_form() -> impl Strategy<Value = Form<Rational>> {
    let n = primitive_basis().len();
    prop::collection::vec(-2i64..=2, n).prop_map(|c| {
        primitive_basis().iter().zip(c).fold(Form::zero(3), |acc, (b, k)| acc + b.scale(&rational_int(k)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn k_squares_to_quarter_q(phi in three_form()) {
        let k = k_of(&phi);
        let q = q_scalar(&phi);
        prop_assert_eq!(k.mul(&k), Mat::identity(6).scale(&(q / rational_int(4))));
    }

    #[test]
    fn f_composes_through_k_and_q(phi in three_form()) {
        let q = q_scalar(&phi);
        let f = f_of(&phi);
        prop_assert_eq!(k_of(&f), k_of(&phi).scale(&-q.clone()));
        prop_assert_eq!(f_of(&f), phi.scale(&-(q.clone() * q)));
    }

    #[test]
    fn q_is_quartic(phi in three_form(), c in -4i64..=4) {
        let c = rational_int(c);
        let c4 = c.clone() * c.clone() * c.clone() * c.clone();
        prop_assert_eq!(q_scalar(&phi.scale(&c)), q_scalar(&phi) * c4);
    }

    #[test]
    fn gl_orbit_is_invariant(phi in sparse_three_form(), seed in any::<u64>()) {
        let a = random_gl(&mut seeded(seed));
        prop_assert_eq!(gl_classify(&phi, 0.0).unwrap(), gl_classify(&phi.pullback(&a), 0.0).unwrap());
    }

    #[test]
    fn sp_orbit_is_invariant(phi in primitive_form(), seed in any::<u64>()) {
        let frame = SymplecticFrame::standard();
        let a = random_symplectic(&mut seeded(seed));
        let before = sp_classify(&frame, &phi, 0.0).unwrap();
        let after = sp_classify(&frame, &phi.pullback(&a), 0.0).unwrap();
        prop_assert_eq!(before.tag, after.tag);
        prop_assert_eq!(before.mu4, after.mu4);
    }

    #[test]
    fn wedge_is_graded_commutative(a in prop::collection::vec(-3i64..=3, 15), b in prop::collection::vec(-3i64..=3, 6)) {
        let (a, b) = (form_from(2, &a), form_from(1, &b));
        prop_assert_eq!(a.wedge(&b), b.wedge(&a));
        prop_assert!(b.wedge(&b).is_zero());
    }

    #[test]
    fn rational_json_round_trips(phi in three_form(), den in 1i64..=9) {
        let phi = phi.scale(&(rational_int(1) / rational_int(den)));
        prop_assert_eq!(parse_form(&form_to_string(&phi)).unwrap(), AnyForm::Rational(phi));
    }

    #[test]
    fn float_json_round_trips(c in prop::collection::vec(-1e6f64..1e6, 20)) {
        let phi = Form::from_terms(3, Blade::all_of_grade(3).into_iter().zip(c));
        prop_assert_eq!(parse_form(&form_to_string(&phi)).unwrap(), AnyForm::Float(phi));
    }

    #[test]
    fn flags_override_config_file(file_seed in any::<u64>(), flag_seed in proptest::option::of(any::<u64>()), samples in 1usize..500) {
        let file = Overrides::parse(&format!("seed={file_seed}\nsamples = {samples}\n")).unwrap();
        let flags = Overrides { seed: flag_seed, ..Default::default() };
        let s = Settings::resolve(&flags, Some(&file)).unwrap();
        prop_assert_eq!(s.seed, flag_seed.unwrap_or(file_seed));
        prop_assert_eq!(s.samples, samples);
        prop_assert_eq!(s.grid, Settings::default().grid);
    }
}
