//! Seeded generators for random exact test data.
//!
//! All randomness flows from [`SplitMix64`], so a `(seed, samples)` pair
//! reproduces the same data on every platform.

use rand::{Rng, SeedableRng};
pub use rand_xoshiro::SplitMix64;

use crate::exterior::{Blade, Form, Vector, DIM};
use crate::invariants::standard_omega;
use crate::linalg::{LinearAlgebra, Mat};
use crate::patch::Poly;
use crate::scalar::{rational, rational_int, Rational, Ring};

pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Derives an independent stream for sample `index`, so samples can be
/// generated in parallel and still be deterministic.
pub fn sample_rng(seed: u64, index: u64) -> SplitMix64 {
    let mut base = seeded(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    SplitMix64::seed_from_u64(base.gen())
}

/// Rational `p/q` with `|p| ≤ max_num`, `1 ≤ q ≤ max_den`.
pub fn random_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    rational(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn random_nonzero_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    loop {
        let r = random_rational(rng, max_num, max_den);
        if !Ring::is_zero(&r) {
            return r;
        }
    }
}

/// Random form with each coefficient present with probability `density`.
pub fn random_form(rng: &mut impl Rng, grade: usize, density: f64) -> Form<Rational> {
    let mut out = Form::zero(grade);
    for b in Blade::all_of_grade(grade) {
        if rng.gen_bool(density) {
            out.add_term(b, random_rational(rng, 4, 3));
        }
    }
    out
}

pub fn random_vector(rng: &mut impl Rng) -> Vector<Rational> {
    Vector(std::array::from_fn(|_| random_rational(rng, 4, 3)))
}

/// Random invertible matrix as a product of unit-triangular factors and a
/// nonzero diagonal.
pub fn random_gl(rng: &mut impl Rng) -> Mat<Rational> {
    let lower = Mat::from_fn(DIM, DIM, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => rational_int(1),
        std::cmp::Ordering::Greater => random_rational(rng, 2, 2),
        std::cmp::Ordering::Less => rational_int(0),
    });
    let upper = Mat::from_fn(DIM, DIM, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Equal => random_nonzero_rational(rng, 2, 2),
        std::cmp::Ordering::Less => random_rational(rng, 2, 2),
        std::cmp::Ordering::Greater => rational_int(0),
    });
    let perm = random_permutation(rng);
    lower.mul(&upper).mul(&perm)
}

fn random_permutation(rng: &mut impl Rng) -> Mat<Rational> {
    let mut p: Vec<usize> = (0..DIM).collect();
    for i in (1..DIM).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    Mat::from_fn(DIM, DIM, |r, c| if p[r] == c { rational_int(1) } else { rational_int(0) })
}

/// Symplectic transvection `x ↦ x + c·ω(v, x)·v` for the standard `ω`.
pub fn transvection(v: &[Rational], c: &Rational) -> Mat<Rational> {
    let omega = crate::invariants::two_form_matrix(&standard_omega::<Rational>());
    // ω(v, x) = vᵀ Ω x, so the map is I + c v (vᵀ Ω).
    let row = omega.transpose().apply(v);
    Mat::from_fn(DIM, DIM, |r, s| {
        let id = if r == s { rational_int(1) } else { rational_int(0) };
        id + c.clone() * v[r].clone() * row[s].clone()
    })
}

/// Random exact element of `Sp(V, ω)` for the standard `ω`: transvections
/// interleaved with permutations of the Darboux pairs and quarter turns
/// inside a pair.
pub fn random_symplectic(rng: &mut impl Rng) -> Mat<Rational> {
    let mut m = Mat::identity(DIM);
    for _ in 0..4 {
        let v: Vec<Rational> = (0..DIM).map(|_| random_rational(rng, 2, 2)).collect();
        let c = random_nonzero_rational(rng, 2, 2);
        m = m.mul(&transvection(&v, &c));
        if rng.gen_bool(0.5) {
            m = m.mul(&pair_swap(rng.gen_range(0..3), rng.gen_range(0..3)));
        }
        if rng.gen_bool(0.5) {
            m = m.mul(&quarter_turn(rng.gen_range(0..3)));
        }
    }
    m
}

/// Exchanges the Darboux pairs `(e_{2a+1}, e_{2a+2})` and `(e_{2b+1}, e_{2b+2})`.
pub fn pair_swap(a: usize, b: usize) -> Mat<Rational> {
    let mut p: Vec<usize> = (0..DIM).collect();
    p.swap(2 * a, 2 * b);
    p.swap(2 * a + 1, 2 * b + 1);
    Mat::from_fn(DIM, DIM, |r, c| if p[c] == r { rational_int(1) } else { rational_int(0) })
}

/// `e_{2a+1} ↦ e_{2a+2}`, `e_{2a+2} ↦ −e_{2a+1}`.
pub fn quarter_turn(a: usize) -> Mat<Rational> {
    let mut m = Mat::identity(DIM);
    let (x, y) = (2 * a, 2 * a + 1);
    m.set(x, x, rational_int(0));
    m.set(y, y, rational_int(0));
    m.set(y, x, rational_int(1));
    m.set(x, y, rational_int(-1));
    m
}

/// Exact basis (14 forms) of the primitive 3-forms for the standard `ω`.
pub fn primitive_basis() -> Vec<Form<Rational>> {
    let omega = standard_omega::<Rational>();
    let cols = Blade::all_of_grade(3);
    let rows = Blade::all_of_grade(5);
    let images: Vec<Form<Rational>> = cols.iter().map(|b| omega.wedge(&Form::from_terms(3, [(*b, rational_int(1))]))).collect();
    let m = Mat::from_fn(rows.len(), cols.len(), |r, c| images[c].coeff(rows[r]));
    Rational::null_space(&m)
        .into_iter()
        .map(|v| Form::from_terms(3, cols.iter().copied().zip(v)))
        .collect()
}

/// Random primitive 3-form: a random combination of `terms` basis elements.
pub fn random_primitive(rng: &mut impl Rng, basis: &[Form<Rational>], terms: usize) -> Form<Rational> {
    let mut out = Form::zero(3);
    for _ in 0..terms {
        let b = &basis[rng.gen_range(0..basis.len())];
        out = out + b.scale(&random_nonzero_rational(rng, 3, 2));
    }
    out
}

/// Random element of `O₋` whose `√(−λ)` is rational: a GL pullback of the
/// normal form.
pub fn random_o_minus(rng: &mut impl Rng) -> Form<Rational> {
    let phi = crate::classify::gl_normal_form::<Rational>(crate::classify::GlOrbit::OMinus);
    phi.pullback(&random_gl(rng))
}

/// Random polynomial with `terms` monomials of total degree at most `degree`.
pub fn random_poly(rng: &mut impl Rng, degree: usize, terms: usize) -> Poly {
    let mut out = Poly::zero();
    for _ in 0..terms {
        let mut m = [0u8; DIM];
        for _ in 0..rng.gen_range(0..=degree) {
            m[rng.gen_range(0..DIM)] += 1;
        }
        out = out + Poly::monomial(m, random_nonzero_rational(rng, 3, 2));
    }
    out
}

/// Primitive 3-form field for the standard `ω`: basis forms with random
/// polynomial coefficients.
pub fn random_primitive_field(rng: &mut impl Rng, basis: &[Form<Rational>], degree: usize) -> Form<Poly> {
    let mut out = Form::zero(3);
    for _ in 0..4 {
        let b = &basis[rng.gen_range(0..basis.len())];
        let c = random_poly(rng, degree, 3);
        out = out + b.map(|x| Poly::constant(x.clone()) * c.clone());
    }
    out
}

pub fn random_vector_field(rng: &mut impl Rng, degree: usize) -> Vector<Poly> {
    Vector(std::array::from_fn(|_| random_poly(rng, degree, 2)))
}
