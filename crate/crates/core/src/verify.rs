//! Seeded verification suites and the example runs behind the CLI.
//!
//! Every sampled item draws from its own stream `sample_rng(seed, index)`,
//! so results do not depend on thread scheduling and are collected in
//! sample order.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::json;

use crate::classify::{
    block_matrix, classify, gl_classify, gl_normal_form, is_density_stabilizer, is_stabilizer, normal_form, sp_classify, verify_f_orbit,
    GlOrbit, SpTag,
};
use crate::config::Settings;
use crate::error::{Error, Result};
use crate::exterior::{kernel, Form, Vector, DIM};
use crate::geometry::{
    connection_laws, fibration_analysis, hessian::hessian_points, hessian_data, k3_patch, lambda2_build, torus_family, DegenerationFamily, LeafChart,
};
use crate::geometry::examples::K3_NAMES;
use crate::invariants::{column_space, f_of, f_with_k, k_of, q_formulas, q_of, q_with_f, subspace_profile, SymplecticFrame};
use crate::io::{classification_json, matrix_json, JsonScalar};
use crate::linalg::{same_span, LinearAlgebra, Mat};
use crate::patch::{
    constant_form, eval_vector, expr, integrability_report, k_field, nijenhuis, nijenhuis_field, nijenhuis_terms, point_in, Coef, Expr, Patch, Poly,
};
use crate::report::{Check, Report};
use crate::rng::{
    primitive_basis, random_form, random_nonzero_rational, random_primitive, random_primitive_field, random_rational, random_symplectic,
    random_vector, random_vector_field, sample_rng,
};
use crate::scalar::{format_rational, parse_rational, rational, rational_int, Field, Rational, Ring};

pub const SUITES: [&str; 10] =
    ["prop2_6", "lemma3_2", "thm3_3", "prop2_10", "prop2_11", "prop2_12", "prop2_9", "thm5_2", "bott_duality", "thm5_8"];

/// Runs a named suite. Unknown names are parse errors.
pub fn run_suite(name: &str, settings: &Settings) -> Result<Report> {
    let mut report = Report::new(format!("verify {name} --seed {} --samples {}", settings.seed, settings.samples));
    let (seed, n) = (settings.seed, settings.samples);
    match name {
        "prop2_6" => report.checks_section("identities", || Ok(algebraic_identities(seed, n))),
        "lemma3_2" => report.checks_section("identities", || Ok(contraction_identities(seed, n))),
        // each field is checked at a fixed number of points
        "thm3_3" => report.checks_section("nijenhuis", || Ok(nijenhuis_identity(seed, n, 20))),
        "prop2_10" => report.checks_section("f_orbits", || f_orbit_mapping(seed, n)),
        "prop2_11" => report.checks_section("q_formulas", || Ok(q_formula_agreement(seed, n))),
        "prop2_12" => report.checks_section("signatures", || signature_cases(seed, n)),
        "prop2_9" => {
            report.checks_section("catalog", catalog_round_trip);
            report.checks_section("o0_structure", || o0_structure(seed, n));
        }
        "thm5_2" | "bott_duality" => {
            let duality_only = name == "bott_duality";
            let tol = settings.tolerance_exactness_proxy;
            report.checks_section("torus", || {
                let chart = torus_family(rational(1, 2))?.chart(CONSTANT_GRID)?;
                connection_checks("torus", &chart, seed, 0.0, duality_only)
            });
            report.checks_section("lambda2", || {
                let ex = lambda2_build(IDENTITY, 1.0, unit_t_box(1), unit_t_box(2), settings.grid)?;
                connection_checks("lambda2", &ex.chart, seed, tol, duality_only)
            });
        }
        "thm5_8" => report.checks_section("fibration", || {
            let chart = torus_family(rational(1, 2))?.chart(CONSTANT_GRID)?;
            torus_fibration_checks(&chart, 1e-10)
        }),
        other => return Err(Error::Parse(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
    Ok(report)
}

fn samples_of<T: Send>(seed: u64, samples: usize, f: impl Fn(&mut crate::rng::SplitMix64) -> T + Sync + Send) -> Vec<T> {
    (0..samples).into_par_iter().map(|i| f(&mut sample_rng(seed, i as u64))).collect()
}

fn count<const N: usize>(rows: &[[bool; N]], i: usize) -> usize {
    rows.iter().filter(|r| !r[i]).count()
}

/// `K∘K = (Q/4)·id`, `K(F(φ)) = −K(φ)Q(φ)`, `F(F(φ)) = −φQ(φ)²` over the
/// rationals for random 3-forms.
pub fn algebraic_identities(seed: u64, samples: usize) -> Vec<Check> {
    let rows = samples_of(seed, samples, |rng| {
        let phi = random_form(rng, 3, 0.5);
        let k = k_of(&phi);
        let f = f_with_k(&phi, &k);
        let q = q_with_f(&phi, &f);
        [
            k.mul(&k) == Mat::identity(DIM).scale(&(q.clone() * rational(1, 4))),
            k_of(&f) == k.scale(&-q.clone()),
            f_of(&f) == phi.scale(&-(q.clone() * q)),
        ]
    });
    vec![
        Check::exact("k_squared", count(&rows, 0), samples),
        Check::exact("k_of_f", count(&rows, 1), samples),
        Check::exact("f_of_f", count(&rows, 2), samples),
    ]
}

fn interior2(a: &Form<Rational>, first: &Vector<Rational>, second: &Vector<Rational>) -> Form<Rational> {
    a.interior(first).and_then(|b| b.interior(second)).expect("grade at least 2")
}

/// Contraction identities between `φ` and `F(φ)` for random `φ`, `X`, `Y`.
pub fn contraction_identities(seed: u64, samples: usize) -> Vec<Check> {
    let rows = samples_of(seed, samples, |rng| {
        let phi = random_form(rng, 3, 0.5);
        let (x, y) = (random_vector(rng), random_vector(rng));
        let f = f_of(&phi);
        let ix = |a: &Form<Rational>, v: &Vector<Rational>| a.interior(v).expect("positive grade");
        let lhs = ix(&phi, &x).wedge(&f);
        let mid = -phi.wedge(&ix(&f, &x));
        let top = ix(&phi.wedge(&f), &x).scale(&rational(1, 2));
        let mixed = ix(&phi, &x).wedge(&ix(&f, &y)) + ix(&phi, &y).wedge(&ix(&f, &x));
        let double = interior2(&phi, &x, &y).wedge(&f) == phi.wedge(&interior2(&f, &x, &y));
        [lhs == mid, mid == top, mixed.is_zero(), double]
    });
    vec![
        Check::exact("single_contraction", count(&rows, 0), samples),
        Check::exact("single_contraction_top", count(&rows, 1), samples),
        Check::exact("mixed_contraction", count(&rows, 2), samples),
        Check::exact("double_contraction", count(&rows, 3), samples),
    ]
}

/// The three formulas for `q(ω, φ)` on random primitive forms, with
/// symmetry and a signature from the case list.
pub fn q_formula_agreement(seed: u64, samples: usize) -> Vec<Check> {
    let basis = primitive_basis();
    let frame = SymplecticFrame::standard();
    let allowed: BTreeSet<_> = SpTag::ALL.iter().map(|t| t.signature()).collect();
    let rows = samples_of(seed, samples, |rng| {
        let phi = random_primitive(rng, &basis, 3);
        let qf = q_formulas(&frame, &phi);
        let sig = Rational::signature(&qf.via_k);
        [
            qf.via_k == qf.via_wedge && qf.via_k == qf.via_pairing,
            qf.via_k == qf.via_k.transpose(),
            allowed.contains(&sig),
        ]
    });
    vec![
        Check::exact("three_formulas_agree", count(&rows, 0), samples),
        Check::exact("symmetric", count(&rows, 1), samples),
        Check::exact("signature_in_case_list", count(&rows, 2), samples),
    ]
}

/// Signature and orbit of every Sp catalog form and of `samples` random
/// symplectic conjugates of each.
pub fn signature_cases(seed: u64, samples: usize) -> Result<Vec<Check>> {
    let frame = SymplecticFrame::standard();
    let mut checks = Vec::new();
    let mut seen = BTreeSet::new();
    for (t, tag) in SpTag::ALL.into_iter().enumerate() {
        let phi = normal_form(tag, tag.has_mu().then(|| rational_int(1)))?;
        let sig = q_of(&frame, &phi, 0.0)?.signature;
        seen.insert(sig);
        checks.push(Check::flag(&format!("catalog_{}", tag.label()), sig == tag.signature()));
        let rows = samples_of(seed.wrapping_add(t as u64 * 0x1000), samples, |rng| {
            let m = random_symplectic(rng);
            let conj = phi.pullback(&m);
            let sig = q_of(&frame, &conj, 0.0).map(|q| q.signature);
            let orbit = sp_classify(&frame, &conj, 0.0).map(|o| o.tag);
            [sig.ok() == Some(tag.signature()), orbit.ok() == Some(tag)]
        });
        checks.push(Check::exact(&format!("conjugates_{}_signature", tag.label()), count(&rows, 0), samples));
        checks.push(Check::exact(&format!("conjugates_{}_orbit", tag.label()), count(&rows, 1), samples));
    }
    checks.push(Check::flag("eight_distinct_triples", seen.len() == 8).with_note(format!("{seen:?}")));
    Ok(checks)
}

/// `F` on the stable Sp families (`μ ↦ 4μ³` on `O₋^±`, `μ ↦ 2μ³` on `O₊`)
/// and `O₀^± → O₃`, on normal forms and on random symplectic conjugates.
pub fn f_orbit_mapping(seed: u64, samples: usize) -> Result<Vec<Check>> {
    let frame = SymplecticFrame::standard();
    let mus = [rational(1, 2), rational_int(1), rational_int(2), rational_int(3)];
    let expected = |tag: SpTag, mu: &Rational| {
        let cube = mu.clone() * mu.clone() * mu.clone();
        if tag == SpTag::OPlus {
            cube * rational_int(2)
        } else {
            cube * rational_int(4)
        }
    };
    let check_one = |tag: SpTag, phi: &Form<Rational>, mu: &Rational| -> bool {
        match verify_f_orbit(&frame, phi, 0.0) {
            Ok((a, b)) => a.tag == tag && a.mu.as_ref() == Some(mu) && b.tag == tag && b.mu == Some(expected(tag, mu)),
            Err(_) => false,
        }
    };
    let mut checks = Vec::new();
    for tag in [SpTag::OMinusPlus, SpTag::OMinusMinus, SpTag::OPlus] {
        let mut bad = 0;
        for mu in &mus {
            if !check_one(tag, &normal_form(tag, Some(mu.clone()))?, mu) {
                bad += 1;
            }
        }
        checks.push(Check::exact(&format!("normal_form_{}", tag.label()), bad, mus.len()));
        let rows = samples_of(seed, samples, |rng| {
            let mu = mus[rand::Rng::gen_range(rng, 0..mus.len())].clone();
            let phi = normal_form(tag, Some(mu.clone())).expect("stable tag").pullback(&random_symplectic(rng));
            [check_one(tag, &phi, &mu)]
        });
        checks.push(Check::exact(&format!("conjugates_{}", tag.label()), count(&rows, 0), samples));
    }
    for tag in [SpTag::O0Plus, SpTag::O0Minus] {
        let (a, b) = verify_f_orbit(&frame, &normal_form::<Rational>(tag, None)?, 0.0)?;
        checks.push(Check::flag(&format!("f_of_{}_is_o3", tag.label()), a.tag == tag && b.tag == SpTag::O3Prim));
    }
    Ok(checks)
}

/// Both normal-form tables classify back to their own labels.
pub fn catalog_round_trip() -> Result<Vec<Check>> {
    let frame = SymplecticFrame::standard();
    let mut checks = Vec::new();
    for orbit in GlOrbit::ALL {
        let got = gl_classify(&gl_normal_form::<Rational>(orbit), 0.0)?;
        checks.push(Check::flag(&format!("gl_{}", orbit.label()), got == orbit));
    }
    for tag in SpTag::ALL {
        let got = sp_classify(&frame, &normal_form(tag, tag.has_mu().then(|| rational_int(1)))?, 0.0)?.tag;
        checks.push(Check::flag(&format!("sp_{}", tag.label()), got == tag));
    }
    Ok(checks)
}

fn random_gl3(rng: &mut crate::rng::SplitMix64) -> Mat<Rational> {
    loop {
        let m = Mat::from_fn(3, 3, |_, _| random_rational(rng, 3, 2));
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// `K`, `F`, the Lagrangian `ker K = Im K = ker F` and the block
/// stabilizers of the `O₀` normal form.
pub fn o0_structure(seed: u64, samples: usize) -> Result<Vec<Check>> {
    let phi = normal_form::<Rational>(SpTag::O0Plus, None)?;
    let k = k_of(&phi);
    let f = f_of(&phi);
    let x = |j: usize| Vector::<Rational>::basis(2 * j);
    let y = |j: usize| Vector::<Rational>::basis(2 * j + 1);
    let kx = (0..3).all(|j| Vector::apply(&k, &x(j)).is_zero());
    let ky = (0..3).all(|j| Vector::apply(&k, &y(j)) == x(j).scale(&rational_int(-2)));
    let f_ok = f == Form::e(&[2, 4, 6]).scale(&rational_int(4));

    let ker_k = Rational::null_space(&k);
    let im_k = column_space(&k);
    let ker_f: Vec<Vec<Rational>> = kernel(&f).into_iter().map(|v| v.to_vec()).collect();
    let frame = SymplecticFrame::<Rational>::standard();
    let lagrangian = ker_k.len() == 3
        && ker_k.iter().all(|u| ker_k.iter().all(|v| frame.pair(&Vector::from_slice(u), &Vector::from_slice(v)).is_zero()));
    let restrict_zero = |a: &Form<Rational>| {
        let vs: Vec<Vector<Rational>> = ker_k.iter().map(|v| Vector::from_slice(v)).collect();
        a.evaluate(&vs).map(|c| c.is_zero()).unwrap_or(false)
    };
    let profile = subspace_profile(&phi);

    let rows = samples_of(seed, samples, |rng| {
        let c = random_gl3(rng);
        let det = c.det();
        let a = c.scale(&(Rational::one() / det));
        let b = Mat::from_fn(3, 3, |_, _| random_rational(rng, 3, 2));
        let cinv = c.inverse().expect("invertible");
        let tr = b.mul(&cinv).trace();
        // B − (Tr(BC⁻¹)/3)·C has Tr((·)C⁻¹) = 0
        let b0 = b.sub(&c.scale(&(tr * rational(1, 3))));
        let good = block_matrix(&a, &b0, &c);
        let eps = random_nonzero_rational(rng, 3, 2);
        let bad = block_matrix(&a, &b0.add(&c.scale(&eps)), &c);
        [
            is_stabilizer(&good, &phi, 0.0),
            is_density_stabilizer(&good, &f, 1, 0.0),
            !is_stabilizer(&bad, &phi, 0.0),
        ]
    });
    Ok(vec![
        Check::flag("k_kills_x", kx),
        Check::flag("k_maps_y_to_minus_two_x", ky),
        Check::flag("f_is_four_dy123", f_ok),
        Check::flag("ker_k_eq_im_k_eq_ker_f", same_span(&ker_k, &im_k) && same_span(&ker_k, &ker_f) && ker_k.len() == 3),
        Check::flag("lagrangian", lagrangian),
        Check::flag("phi_and_f_vanish_on_kernel", restrict_zero(&phi) && restrict_zero(&f)),
        Check::flag("dims_0_3_3_6", profile.dims == [0, 3, 3, 6]),
        Check::exact("stabilizer_parametrization", count(&rows, 0), samples),
        Check::exact("stabilizer_of_f_with_density", count(&rows, 1), samples),
        Check::exact("trace_condition_needed", count(&rows, 2), samples),
    ])
}

/// Counts for the Nijenhuis identity on random primitive polynomial fields
/// of degree at most two, `points` rational points per field.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NijenhuisCounts {
    pub fields: usize,
    /// Evaluation points over all fields.
    pub points: usize,
    /// Jet-based `N_K` differs from the field-level bracket computation.
    pub two_path_mismatches: usize,
    /// Four-term right-hand side differs from `N_K`.
    pub printed_mismatches: usize,
    /// Three-term right-hand side differs from `N_K`.
    pub corrected_mismatches: usize,
}

pub fn nijenhuis_counts(seed: u64, fields: usize, points: usize) -> Result<NijenhuisCounts> {
    let basis = primitive_basis();
    let omega: Form<Poly> = crate::patch::constant_form(&crate::invariants::standard_omega::<Rational>());
    let patch = Patch::unit_box(crate::geometry::examples::TORUS_NAMES).with_grid(2);
    let rows: Vec<[usize; 3]> = (0..fields)
        .into_par_iter()
        .map(|i| -> Result<[usize; 3]> {
            let mut rng = sample_rng(seed, i as u64);
            let phi = random_primitive_field(&mut rng, &basis, 2);
            let x = random_vector_field(&mut rng, 1);
            let y = random_vector_field(&mut rng, 1);
            let k = k_field(&phi, &omega)?;
            let field = nijenhuis_field(&patch, &k, &x, &y);
            let mut out = [0; 3];
            for p in patch.random_points(points, seed.wrapping_add(i as u64)) {
                let lhs = nijenhuis(&k, &x, &y, &p);
                let terms = nijenhuis_terms(&phi, &omega, &x, &y, &p)?;
                out[0] += usize::from(eval_vector(&field, &p) != lhs);
                out[1] += usize::from(terms.four_term() != lhs);
                out[2] += usize::from(terms.three_term() != lhs);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let sum = |j: usize| rows.iter().map(|r| r[j]).sum();
    Ok(NijenhuisCounts {
        fields,
        points: fields * points,
        two_path_mismatches: sum(0),
        printed_mismatches: sum(1),
        corrected_mismatches: sum(2),
    })
}

pub fn nijenhuis_identity(seed: u64, fields: usize, points: usize) -> Vec<Check> {
    match nijenhuis_counts(seed, fields, points) {
        Ok(c) => vec![
            Check::exact("nijenhuis_two_paths", c.two_path_mismatches, c.points),
            Check::exact("four_term_identity", c.printed_mismatches, c.points)
                .with_note("ι_Yι_X dφ∧F − dφ∧ι_Yι_X F + 2φ∧(ι_Yι_{KX} − ι_Xι_{KY})dφ + φ∧ι_Yι_X dF"),
            Check::exact("three_term_identity", c.corrected_mismatches, c.points)
                .with_note("the four-term expression without dφ∧ι_Yι_X F"),
        ],
        Err(e) => vec![Check::from_error("nijenhuis", &e)],
    }
}

/// Grid for the flat torus, whose fields have constant coefficients.
const CONSTANT_GRID: usize = 2;

pub const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn unit_t_box(v: i64) -> [Rational; 3] {
    [v, v, v].map(rational_int)
}

/// Connection identities and leaf Hessian symmetries on a chart. Residuals
/// are absolute.
pub fn connection_checks<C: Coef>(label: &str, chart: &LeafChart<C>, seed: u64, tol: f64, duality_only: bool) -> Result<Vec<Check>> {
    let laws = connection_laws(chart, seed)?;
    let name = |s: &str| format!("{label}_{s}");
    if duality_only {
        return Ok(vec![Check::numeric(&name("bott_duality"), laws.duality, tol)]);
    }
    let geo = hessian_data(chart, tol.max(1e-12))?;
    Ok(vec![
        Check::numeric(&name("frame_parallel"), laws.parallel, tol),
        Check::numeric(&name("function_linear"), laws.function_linear, tol),
        Check::numeric(&name("leibniz"), laws.leibniz, tol),
        Check::numeric(&name("torsion_free"), laws.torsion, tol),
        Check::numeric(&name("flat_in_frame"), laws.curvature_frame, tol),
        Check::numeric(&name("flat_on_fields"), laws.curvature_fields, tol),
        Check::numeric(&name("dg_totally_symmetric"), geo.h3_asymmetry, tol),
        Check::numeric(&name("det_h_leaf_constant"), geo.det_drift, tol),
        Check::numeric(&name("bott_duality"), laws.duality, tol),
        Check::flag(&name("ricci_nonnegative"), geo.ricci_min >= -tol),
    ])
}

fn max_dev(m: &[[f64; 3]; 3], want: impl Fn(usize, usize) -> f64) -> f64 {
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (m[i][j] - want(i, j)).abs()).fold(0.0, f64::max)
}

/// Periods, base metric, fiber volume, isometry and the Monge-Ampère flag
/// for the flat torus chart.
pub fn torus_fibration_checks<C: Coef>(chart: &LeafChart<C>, tol: f64) -> Result<Vec<Check>> {
    let data = fibration_analysis(chart, 2, tol)?;
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let lambda = data.fibers.iter().map(|f| max_dev(&f.lambda, |i, j| -delta(i, j))).fold(0.0, f64::max);
    let g_base = data.fibers.iter().map(|f| max_dev(&f.g_base, |i, j| s * delta(i, j))).fold(0.0, f64::max);
    let volume = data.fibers.iter().map(|f| (f.volume - s * s * s).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::numeric("periods_minus_identity", lambda, tol),
        Check::numeric("base_metric", g_base, tol),
        Check::numeric("fiber_volume", volume, tol),
        Check::numeric("isometry", data.isometry_residual, tol),
        Check::flag("monge_ampere", data.monge_ampere && data.monge_ampere_consistent),
    ])
}

fn rational_json(q: &Rational) -> serde_json::Value {
    q.to_json()
}

/// `example torus`: the degeneration family at `t` and its limit.
pub fn example_torus(t: &str, settings: &Settings) -> Result<Report> {
    let t = parse_rational(t).ok_or_else(|| Error::Parse(format!("bad rational t {t:?}")))?;
    let fam = torus_family(t.clone())?;
    let mut report = Report::new(format!("example torus --t {}", format_rational(&t)));
    report.section("pointwise", |r| {
        let c = fam.checks(0.0)?;
        r.insert("t", rational_json(&t));
        r.insert("norm_sq", rational_json(&c.norm_sq));
        r.insert("Q", rational_json(&c.q));
        r.insert("orbit_t", c.orbit_t.label());
        r.insert("orbit_0", c.orbit_0.label());
        r.push(Check::flag("limit_is_o0_normal_form", c.phi0_is_normal_form));
        r.push(Check::flag("norm_sq_is_4t", c.norm_sq == rational_int(4) * t.clone()));
        r.push(Check::flag("q_is_minus_16t2", c.q == rational_int(-16) * t.clone() * t.clone()));
        r.push(Check::flag("orbit_t_is_o-+", c.orbit_t == SpTag::OMinusPlus));
        r.push(Check::flag("limit_orbit_is_o0+", c.orbit_0 == SpTag::O0Plus));
        r.push(Check::flag("f_of_limit_is_o3", c.f0_orbit == SpTag::O3Prim));
        r.push(Check::flag("conjugate_blows_up", c.conjugate_blows_up));
        Ok(())
    });
    let grid = settings.grid;
    report.section("limit_field", |r| {
        let integ = integrability_report(&DegenerationFamily::patch(grid), &constant_form::<Poly>(&fam.phi_0), &constant_form(&fam.omega), 0.0)?;
        r.push(Check::flag("limit_f_harmonic", integ.f_harmonic));
        r.push(Check::flag("limit_o0+_on_grid", integ.uniform_orbit() == Some(SpTag::O0Plus)));
        // constant coefficients: the leaf geometry is the same at every point
        let chart = fam.chart(CONSTANT_GRID)?;
        r.insert("geometry_grid", CONSTANT_GRID);
        let geo = hessian_data(&chart, 0.0)?;
        let p = &geo.points[0];
        let delta = |i: usize, j: usize| if i == j { rational_int(1) } else { rational_int(0) };
        let h_ok = geo.points.iter().all(|lp| (0..3).all(|i| (0..3).all(|j| *lp.h.get(i, j) == delta(i, j) * rational_int(2))));
        let g_ok = geo.points.iter().all(|lp| (0..3).all(|i| (0..3).all(|j| *lp.leaf_metric.get(i, j) == delta(i, j) * rational(1, 2))));
        r.insert("h", matrix_json(&p.h));
        r.insert("leaf_metric", matrix_json(&p.leaf_metric));
        r.insert("det_h", rational_json(&p.det_h));
        r.push(Check::flag("h_is_2_delta", h_ok));
        r.push(Check::flag("leaf_metric_is_half_delta", g_ok));
        r.push(Check::flag("det_h_is_8", geo.points.iter().all(|lp| lp.det_h == rational_int(8))));
        r.extend(connection_checks("limit", &chart, settings.seed, 0.0, false)?);
        Ok(())
    });
    report.section("fibration", |r| {
        let chart = fam.chart(CONSTANT_GRID)?;
        let data = fibration_analysis(&chart, 2, 1e-10)?;
        if let Some(f) = data.fibers.first() {
            r.insert("periods", f.lambda);
            r.insert("base_metric", f.g_base);
            r.insert("fiber_volume", f.volume);
        }
        r.extend(torus_fibration_checks(&chart, 1e-10)?);
        Ok(())
    });
    Ok(report)
}

/// Parses `identity`, `diag:a,b,c` or nine comma-separated entries.
pub fn parse_metric(text: &str) -> Result<[[f64; 3]; 3]> {
    let bad = || Error::Parse(format!("bad metric {text:?}; use identity, diag:a,b,c or nine entries"));
    let nums = |s: &str| -> Result<Vec<f64>> { s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect() };
    if text == "identity" {
        return Ok(IDENTITY);
    }
    if let Some(rest) = text.strip_prefix("diag:") {
        let d = nums(rest)?;
        if d.len() != 3 {
            return Err(bad());
        }
        return Ok(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { d[i] } else { 0.0 })));
    }
    let v = nums(&text.replace(';', ","))?;
    if v.len() != 9 {
        return Err(bad());
    }
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| v[3 * i + j])))
}

/// Smallest integer box `[n, n+1]³` on which the example is defined.
fn lambda2_default_box(g: [[f64; 3]; 3], c: f64, grid: usize) -> Result<crate::geometry::Lambda2Example> {
    let mut last = None;
    for n in 1..=64 {
        match lambda2_build(g, c, unit_t_box(n), unit_t_box(n + 1), grid) {
            Ok(ex) => return Ok(ex),
            Err(e @ Error::Domain(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Domain("no admissible box".into())))
}

/// `example lambda2`: the displayed closed forms, F-harmonicity and the
/// leaf geometry on the default box.
pub fn example_lambda2(c: f64, g: [[f64; 3]; 3], settings: &Settings) -> Result<Report> {
    let ex = lambda2_default_box(g, c, settings.grid)?;
    let mut report = Report::new(format!("example lambda2 --C {c} --g {g:?}"));
    let proxy = settings.tolerance_exactness_proxy;
    let tol = settings.tolerance_numeric;
    report.insert("t_box", [ex.chart.patch().lower()[1].to_f64(), ex.chart.patch().upper()[1].to_f64()]);
    report.section("closed_forms", |r| {
        let mut pts = ex.chart.patch().grid_points();
        pts.extend(ex.chart.patch().random_points(settings.samples, settings.seed));
        let k = ex.checks_at(&pts, proxy)?;
        r.insert("closed_form_residuals", &k);
        r.push(Check::numeric("f_identity", k.f_identity, proxy));
        r.push(Check::numeric("basic_identity", k.basic_identity, proxy));
        r.push(Check::numeric("f_form", k.f_form, proxy));
        r.push(Check::numeric("frame", k.frame, proxy));
        r.push(Check::numeric("h", k.h, proxy));
        r.push(Check::numeric("h_inverse", k.h_inverse, proxy));
        r.push(Check::numeric("h3", k.h3, proxy));
        r.push(Check::numeric("det_h_is_8_det_g", k.det_h, proxy));
        r.push(Check::numeric("scalar_curvature", k.scalar, tol));
        r.push(Check::flag("ricci_nonnegative", k.ricci_min >= -proxy));
        let per_point: Vec<_> = hessian_points(&ex.chart, proxy)?
            .iter()
            .map(|lp| {
                let rho = ex.r.eval(&point_in(&lp.point));
                json!({
                    "point": lp.point.iter().map(Field::to_f64).collect::<Vec<_>>(),
                    "h": matrix_json(&lp.h),
                    "det_h": lp.det_h,
                    "S": lp.scalar,
                    "S_closed_form": ex.scalar_closed_form(rho),
                })
            })
            .collect();
        r.insert("grid_points", per_point);
        Ok(())
    });
    report.section("integrability", |r| {
        let integ = integrability_report(ex.chart.patch(), ex.chart.phi(), ex.chart.omega(), tol)?;
        r.push(Check::flag("f_harmonic", integ.f_harmonic));
        r.push(Check::flag("o0+_on_grid", integ.uniform_orbit() == Some(SpTag::O0Plus)));
        ex.chart.check_foliation(proxy)?;
        r.push(Check::flag("lagrangian_foliation", true));
        Ok(())
    });
    report.checks_section("connection", || connection_checks("lambda2", &ex.chart, settings.seed, proxy, false));
    Ok(report)
}

fn k3_kernel_checks<C: Coef>(chart: &LeafChart<C>, tol: f64) -> Result<Check> {
    let leaf = [0, 1, 4];
    let mut worst: f64 = 0.0;
    for p in chart.patch().grid_points() {
        let k = chart.point(&point_in(&p), false).k_value();
        if k.rank() != 3 {
            return Ok(Check::flag("kernel_is_leaf_span", false).with_note(format!("rank of K is {}", k.rank())));
        }
        for &j in &leaf {
            worst = (0..DIM).map(|i| k.get(i, j).to_f64().abs()).fold(worst, f64::max);
        }
    }
    Ok(Check::numeric("kernel_is_leaf_span", worst, tol))
}

fn k3_run<C: Coef>(f: C, settings: &Settings, tol: f64, report: &mut Report) -> Result<()> {
    let patch = Patch::unit_box(K3_NAMES).with_grid(settings.grid.min(3));
    let ex = k3_patch(f, patch)?;
    report.section("patch", |r| {
        let c = ex.checks(tol)?;
        r.insert("points", c.points);
        r.push(Check::flag("o0+_everywhere", c.all_o0_plus));
        r.push(k3_kernel_checks(&ex.chart, tol)?);
        r.push(Check::numeric("f_is_4f_dx2_dy2_dy", c.f_form, tol));
        r.push(Check::numeric("k_images", c.k_images, tol));
        r.push(Check::numeric("leaf_metric", c.leaf_metric, tol));
        let integ = integrability_report(ex.chart.patch(), &ex.phi, &ex.omega, tol.max(settings.tolerance_numeric))?;
        let note = if c.f_depends_on_base_pair { "f depends on (x2, y2) only" } else { "f depends on more than (x2, y2)" };
        r.push(Check::flag("closed", integ.closed).with_note(note));
        ex.chart.check_foliation(tol)?;
        r.push(Check::flag("lagrangian_foliation", true));
        Ok(())
    });
    Ok(())
}

/// `example k3patch`: `f` is parsed over `x1 y1 x2 y2 x y`; polynomial `f`
/// runs exactly, anything else in floats.
pub fn example_k3(f_text: &str, settings: &Settings) -> Result<Report> {
    let names: [String; DIM] = K3_NAMES.map(String::from);
    let ast = expr::parse(f_text, &names)?;
    let mut report = Report::new(format!("example k3patch --f {f_text:?}"));
    match ast.to_poly() {
        Some(p) => {
            report.insert("backend", "rational");
            k3_run(p, settings, 0.0, &mut report)?;
        }
        None => {
            report.insert("backend", "float");
            let proxy = settings.tolerance_exactness_proxy;
            k3_run::<Expr>(ast.to_expr(), settings, proxy, &mut report)?;
        }
    }
    Ok(report)
}

/// `classify`: the classification record, with `ω` when given.
pub fn classify_report<S: JsonScalar>(phi: &Form<S>, omega: Option<&Form<S>>, tol: f64) -> Result<Report> {
    let frame = omega.map(|w| SymplecticFrame::new(w.clone())).transpose()?;
    let mut report = Report::new("classify");
    let c = classify(phi, frame.as_ref(), tol);
    match c {
        Ok(c) => {
            report.data.insert("classification".into(), classification_json(&c));
            report.push(Check::flag("classified", true));
        }
        Err(e @ Error::Indeterminate(_)) => report.push(Check::from_error("classified", &e)),
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// `invariants`: `K`, `F`, `Q`, `q` (when primitive) and the subspace
/// dimensions.
pub fn invariants_report<S: JsonScalar>(phi: &Form<S>, omega: Option<&Form<S>>, tol: f64) -> Result<Report> {
    if phi.grade() != 3 {
        return Err(Error::Grade { expected: 3, got: phi.grade() });
    }
    let frame = match omega {
        Some(w) => SymplecticFrame::new(w.clone())?,
        None => SymplecticFrame::standard(),
    };
    let mut report = Report::new("invariants");
    let k = k_of(phi);
    let f = f_with_k(phi, &k);
    let q = q_with_f(phi, &f);
    report.data.insert("K".into(), matrix_json(&k));
    report.data.insert("F".into(), serde_json::to_value(crate::io::FormJson::from_form(&f))?);
    report.data.insert("Q".into(), q.to_json());
    let profile = subspace_profile(phi);
    report.insert("dims", profile.dims);
    match q_of(&frame, phi, tol) {
        Ok(sym) => {
            report.data.insert("q".into(), crate::io::q_json(&sym));
        }
        Err(Error::NotPrimitive) => {
            report.data.insert("q".into(), json!(null));
        }
        Err(e) => report.push(Check::from_error("q", &e)),
    }
    report.push(Check::flag("computed", true));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_parsing() {
        assert_eq!(parse_metric("identity").unwrap(), IDENTITY);
        assert_eq!(parse_metric("diag:1,2,3").unwrap()[2][2], 3.0);
        assert_eq!(parse_metric("1,0,0;0,2,0;0,0,3").unwrap()[1][1], 2.0);
        assert!(parse_metric("diag:1,2").is_err());
        assert!(parse_metric("eye").is_err());
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nosuch", &Settings::default()), Err(Error::Parse(_))));
    }

    #[test]
    fn small_algebraic_runs_pass() {
        assert!(algebraic_identities(1, 20).iter().all(Check::passed));
        assert!(contraction_identities(1, 20).iter().all(Check::passed));
        assert!(q_formula_agreement(1, 10).iter().all(Check::passed));
    }
}
