//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints its `PASS`/`FAIL` line; exits nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use threeform::config::Settings;
use threeform::geometry::{lambda2_build, torus_family};
use threeform::report::{Check, Report};
use threeform::scalar::{rational, rational_int, Rational};
use threeform::verify;

const SEED: u64 = 20240611;

fn summary(checks: &[Check]) -> String {
    if checks.len() > 12 {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        let worst = checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max);
        return format!("{}/{} checks passed, max residual {worst:.2e} {}", checks.len() - failed.len(), checks.len(), failed.join(" "));
    }
    checks
        .iter()
        .map(|c| match (c.residual, c.mismatches, c.samples) {
            (Some(r), _, _) => format!("{}={r:.2e}", c.name),
            (_, Some(m), Some(n)) => format!("{}={m}/{n}", c.name),
            _ => format!("{}={:?}", c.name, c.status).to_lowercase(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Prints the criterion line and returns whether every check passed.
fn verdict(id: u32, title: &str, checks: &[Check], extra: &str) -> bool {
    let ok = !checks.is_empty() && checks.iter().all(Check::passed);
    println!("criterion {id:>2} [{}] {title}: {} {extra}", if ok { "PASS" } else { "FAIL" }, summary(checks));
    ok
}

fn report_checks(report: &Report) -> Vec<Check> {
    report.checks.clone()
}

fn unit_box(v: i64) -> [Rational; 3] {
    [v, v, v].map(rational_int)
}

fn algebraic_identities_exact_for_1000_forms() -> bool {
    let start = Instant::now();
    let mut checks = verify::algebraic_identities(SEED, 1000);
    let elapsed = start.elapsed();
    checks.push(Check::numeric("runtime_s", elapsed.as_secs_f64(), 10.0));
    verdict(1, "K∘K, K(F), F(F) identities over 1000 forms", &checks, "") && elapsed < Duration::from_secs(10)
}

fn catalog_forms_classify_to_their_tags() -> bool {
    let mut checks = verify::catalog_round_trip().unwrap();
    checks.extend(verify::o0_structure(SEED, 100).unwrap());
    assert!(checks.iter().filter(|c| c.name.starts_with("gl_") || c.name.starts_with("sp_")).count() >= 12);
    verdict(2, "catalog round trip and O0 structure", &checks, "")
}

fn signature_triples_on_catalog_and_conjugates() -> bool {
    let checks = verify::signature_cases(SEED, 100).unwrap();
    verdict(3, "eight q signature triples, 100 conjugates each", &checks, "")
}

fn f_maps_stable_orbits_by_cubing() -> bool {
    let checks = verify::f_orbit_mapping(SEED, 100).unwrap();
    verdict(4, "F orbit mapping for mu in {1/2,1,2,3}", &checks, "")
}

fn contraction_identities_and_q_formulas() -> bool {
    let mut checks = verify::contraction_identities(SEED, 1000);
    checks.extend(verify::q_formula_agreement(SEED, 1000));
    verdict(5, "contraction identities and q formulas over 1000 samples", &checks, "")
}

fn nijenhuis_four_term_identity() -> bool {
    let counts = verify::nijenhuis_counts(SEED, 50, 20).unwrap();
    let total = counts.points;
    assert_eq!(total, 50 * 20);
    let checks = vec![Check::exact("four_term_identity", counts.printed_mismatches, total)];
    let extra = format!(
        "(two_path_mismatches={}/{total} three_term_mismatches={}/{total})",
        counts.two_path_mismatches, counts.corrected_mismatches
    );
    verdict(6, "Nijenhuis tensor against the four-term expression", &checks, &extra)
}

fn torus_degeneration_family() -> bool {
    let mut checks = Vec::new();
    for t in ["1", "1/2", "1/4", "1/9", "3/7"] {
        let report = verify::example_torus(t, &Settings::default()).unwrap();
        checks.extend(report_checks(&report).into_iter().map(|mut c| {
            c.name = format!("t={t}:{}", c.name);
            c
        }));
    }
    verdict(7, "torus family at five rational t", &checks, "")
}

fn lambda2_closed_forms_at_random_points() -> bool {
    let cases: [(f64, [[f64; 3]; 3], i64, &str); 4] = [
        (0.0, verify::IDENTITY, 1, "C=0,g=I"),
        (1.0, verify::IDENTITY, 1, "C=1,g=I"),
        (1.0, [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]], 1, "C=1,g=diag(1,2,3)"),
        (-1.0, verify::IDENTITY, 2, "C=-1,g=I"),
    ];
    let mut checks = Vec::new();
    for (c, g, box_start, label) in cases {
        let ex = lambda2_build(g, c, unit_box(box_start), unit_box(box_start + 1), 2).unwrap();
        let points = ex.chart.patch().random_points(50, SEED);
        let k = ex.checks_at(&points, 1e-8).unwrap();
        assert_eq!(k.points, 50);
        checks.push(Check::numeric(&format!("{label}:f_identity"), k.f_identity, 1e-10));
        checks.push(Check::numeric(&format!("{label}:f_form"), k.f_form, 1e-8));
        checks.push(Check::numeric(&format!("{label}:det_h_rel"), k.det_h, 1e-9));
        checks.push(Check::numeric(&format!("{label}:scalar_rel"), k.scalar, 1e-6));
        // a positive semidefinite test on floats allows for rounding
        checks.push(Check::numeric(&format!("{label}:ricci_min_neg"), (-k.ricci_min).max(0.0), 1e-10));
    }
    verdict(8, "cone example closed forms at 50 points per case", &checks, "")
}

fn k3_patch_kernel_form_and_leaf_metric() -> bool {
    let settings = Settings { grid: 3, ..Settings::default() };
    let mut checks = Vec::new();
    for f in ["1", "1 + (x2^2 + y2^2)/4", "2 + x2*y2 - y2^3/3"] {
        let report = verify::example_k3(f, &settings).unwrap();
        assert_eq!(report.data["backend"], "rational");
        for name in ["o0+_everywhere", "kernel_is_leaf_span", "f_is_4f_dx2_dy2_dy", "leaf_metric"] {
            let mut c = report.check(name).unwrap_or_else(|| panic!("missing check {name}")).clone();
            if let Some(r) = c.residual {
                c = Check::numeric(name, r, 1e-9);
            }
            c.name = format!("f={f}:{name}");
            checks.push(c);
        }
    }
    verdict(9, "K3 patch for three positive f", &checks, "")
}

fn torus_fibration_periods_metric_volume_isometry() -> bool {
    let chart = torus_family(rational(1, 2)).unwrap().chart(2).unwrap();
    let checks = verify::torus_fibration_checks(&chart, 1e-10).unwrap();
    verdict(10, "torus fibration periods, base metric, volume, isometry", &checks, "")
}

fn connection_laws_on_cone_example() -> bool {
    let ex = lambda2_build(verify::IDENTITY, 1.0, unit_box(1), unit_box(2), 3).unwrap();
    let wanted = ["torsion_free", "flat_in_frame", "dg_totally_symmetric", "det_h_leaf_constant", "bott_duality"];
    let checks: Vec<Check> = verify::connection_checks("cone", &ex.chart, SEED, 1e-8, false)
        .unwrap()
        .into_iter()
        .filter(|c| wanted.iter().any(|w| c.name.ends_with(w)))
        .collect();
    assert_eq!(checks.len(), wanted.len());
    verdict(11, "connection laws on the cone example", &checks, "")
}

fn main() {
    let criteria: [(u32, fn() -> bool); 11] = [
        (1, algebraic_identities_exact_for_1000_forms),
        (2, catalog_forms_classify_to_their_tags),
        (3, signature_triples_on_catalog_and_conjugates),
        (4, f_maps_stable_orbits_by_cubing),
        (5, contraction_identities_and_q_formulas),
        (6, nijenhuis_four_term_identity),
        (7, torus_degeneration_family),
        (8, lambda2_closed_forms_at_random_points),
        (9, k3_patch_kernel_form_and_leaf_metric),
        (10, torus_fibration_periods_metric_volume_isometry),
        (11, connection_laws_on_cone_example),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        ran += 1;
        let ok = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| {
            println!("criterion {id:>2} [FAIL] panicked");
            false
        });
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {ran} of {ran} criteria passed");
    } else {
        println!("acceptance: {} of {ran} criteria passed, failed {failed:?}", ran - failed.len());
        std::process::exit(1);
    }
}
