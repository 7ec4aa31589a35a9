//! The shared JSON schemas: forms, classification records, `q` and the
//! Hitchin package.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify::Classification;
use crate::error::{Error, Result};
use crate::exterior::{sort_sign, Form, DIM};
use crate::hitchin::HitchinPackage;
use crate::invariants::SymBilinear;
use crate::linalg::{LinearAlgebra, Mat};
use crate::scalar::{format_rational, parse_rational, Backend, Field, Rational};

/// Scalars with a JSON encoding: rationals as `"p/q"` strings, floats as
/// numbers.
pub trait JsonScalar: LinearAlgebra {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s).ok_or_else(|| Error::Parse(format!("bad rational coefficient {s:?}"))),
            other => Err(Error::Parse(format!("rational coefficients are \"p/q\" strings, got {other}"))),
        }
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        // `+ 0.0` folds -0.0 into 0.0
        serde_json::Number::from_f64(*self + 0.0).map_or(Value::Null, Value::Number)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_f64().ok_or_else(|| Error::Parse(format!("float coefficients are JSON numbers, got {v}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub coeff: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub grade: usize,
    pub backend: Backend,
    pub terms: Vec<TermJson>,
}

impl FormJson {
    pub fn from_form<S: JsonScalar>(form: &Form<S>) -> FormJson {
        FormJson {
            grade: form.grade(),
            backend: S::BACKEND,
            terms: form
                .terms()
                .map(|(b, c)| TermJson { indices: b.indices().iter().map(|i| i + 1).collect(), coeff: c.to_json() })
                .collect(),
        }
    }

    /// Converts to a form over `S`; the declared backend must match.
    pub fn to_form<S: JsonScalar>(&self) -> Result<Form<S>> {
        if self.backend != S::BACKEND {
            return Err(Error::BackendMismatch(self.backend, S::BACKEND));
        }
        if self.grade > DIM {
            return Err(Error::Parse(format!("grade {} exceeds {DIM}", self.grade)));
        }
        let mut form = Form::zero(self.grade);
        for t in &self.terms {
            if t.indices.len() != self.grade {
                return Err(Error::Parse(format!("term {:?} does not have grade {}", t.indices, self.grade)));
            }
            let zero_based = t
                .indices
                .iter()
                .map(|&i| if (1..=DIM).contains(&i) { Ok(i - 1) } else { Err(Error::Parse(format!("index {i} is outside 1..={DIM}"))) })
                .collect::<Result<Vec<_>>>()?;
            let (sign, blade) = sort_sign(&zero_based).ok_or_else(|| Error::Parse(format!("repeated index in {:?}", t.indices)))?;
            let c = S::from_json(&t.coeff)?;
            form.add_term(blade, if sign < 0 { -c } else { c });
        }
        Ok(form)
    }
}

/// A form whose backend is chosen by its JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyForm {
    Rational(Form<Rational>),
    Float(Form<f64>),
}

impl AnyForm {
    pub fn backend(&self) -> Backend {
        match self {
            AnyForm::Rational(_) => Backend::Rational,
            AnyForm::Float(_) => Backend::Float,
        }
    }

    pub fn grade(&self) -> usize {
        match self {
            AnyForm::Rational(f) => f.grade(),
            AnyForm::Float(f) => f.grade(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<AnyForm> {
        Ok(match j.backend {
            Backend::Rational => AnyForm::Rational(j.to_form()?),
            Backend::Float => AnyForm::Float(j.to_form()?),
        })
    }

    pub fn to_json(&self) -> FormJson {
        match self {
            AnyForm::Rational(f) => FormJson::from_form(f),
            AnyForm::Float(f) => FormJson::from_form(f),
        }
    }

    /// Float copy; rationals convert exactly up to rounding.
    pub fn to_float(&self) -> Form<f64> {
        match self {
            AnyForm::Rational(f) => f.map(|c| c.to_f64()),
            AnyForm::Float(f) => f.clone(),
        }
    }
}

pub fn parse_form(text: &str) -> Result<AnyForm> {
    let j: FormJson = serde_json::from_str(text)?;
    AnyForm::from_json(&j)
}

pub fn form_to_string<S: JsonScalar>(form: &Form<S>) -> String {
    serde_json::to_string(&FormJson::from_form(form)).expect("form JSON is always serializable")
}

pub fn matrix_json<S: JsonScalar>(m: &Mat<S>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array((0..m.cols()).map(|c| m.get(r, c).to_json()).collect())).collect())
}

fn opt<S: JsonScalar>(x: &Option<S>) -> Value {
    x.as_ref().map_or(Value::Null, JsonScalar::to_json)
}

/// `{"gl":…,"sp":{"tag":…,"mu":…,"mu4":…},"Q":…,"dims":[…],"signature":[…]}`.
pub fn classification_json<S: JsonScalar>(c: &Classification<S>) -> Value {
    let sp = c.sp.as_ref().map_or(Value::Null, |sp| json!({"tag": sp.tag.label(), "mu": opt(&sp.mu), "mu4": opt(&sp.mu4)}));
    json!({
        "gl": c.gl.label(),
        "sp": sp,
        "Q": c.q.to_json(),
        "dims": c.dims,
        "signature": c.signature.map(|(a, b, d)| [a, b, d]),
    })
}

/// `{"matrix":[[…]],"signature":[n0,np,nm]}`.
pub fn q_json<S: JsonScalar>(q: &SymBilinear<S>) -> Value {
    let (a, b, c) = q.signature;
    json!({"matrix": matrix_json(&q.matrix), "signature": [a, b, c]})
}

pub fn package_json<S: JsonScalar>(p: &HitchinPackage<S>) -> Value {
    json!({
        "J": matrix_json(&p.j),
        "phi_hat": FormJson::from_form(&p.phi_hat),
        "lambda": p.lambda.to_json(),
        "mu": opt(&p.mu),
        "norm_sq": opt(&p.norm_sq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, normal_form, SpTag};
    use crate::invariants::SymplecticFrame;
    use crate::scalar::rational;

    #[test]
    fn round_trip_rational() {
        let phi = Form::e(&[1, 3, 5]).scale(&rational(-3, 7)) + Form::e(&[2, 4, 6]);
        let text = form_to_string(&phi);
        assert!(text.contains("\"coeff\":\"-3/7\""));
        assert_eq!(parse_form(&text).unwrap(), AnyForm::Rational(phi));
    }

    #[test]
    fn round_trip_float_and_unsorted_indices() {
        let text = r#"{"grade":3,"backend":"float","terms":[{"indices":[3,1,5],"coeff":2.5}]}"#;
        let f = parse_form(text).unwrap();
        assert_eq!(f, AnyForm::Float(Form::e(&[1, 3, 5]).scale(&-2.5)));
        assert_eq!(AnyForm::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,1,2],"coeff":"1"}]}"#,
            r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,2],"coeff":"1"}]}"#,
            r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,2,7],"coeff":"1"}]}"#,
            r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,2,3],"coeff":1}]}"#,
            r#"{"grade":3,"backend":"rational","terms":[{"indices":[1,2,3],"coeff":"1/0"}]}"#,
            r#"{"grade":3,"backend":"float","terms":[{"indices":[1,2,3],"coeff":"1"}]}"#,
            r#"{"grade":3,"backend":"complex","terms":[]}"#,
        ] {
            assert!(matches!(parse_form(bad), Err(Error::Parse(_) | Error::Json(_))), "{bad}");
        }
    }

    #[test]
    fn backend_must_match_target() {
        let j = FormJson::from_form(&Form::<f64>::e(&[1, 2, 3]));
        assert!(matches!(j.to_form::<Rational>(), Err(Error::BackendMismatch(Backend::Float, Backend::Rational))));
    }

    #[test]
    fn classification_schema() {
        let phi = normal_form::<Rational>(SpTag::O0Plus, None).unwrap();
        let c = classify(&phi, Some(&SymplecticFrame::standard()), 0.0).unwrap();
        let v = classification_json(&c);
        assert_eq!(v["gl"], "O0");
        assert_eq!(v["sp"]["tag"], "O0+");
        assert_eq!(v["sp"]["mu"], Value::Null);
        assert_eq!(v["Q"], "0");
        assert_eq!(v["dims"], json!([0, 3, 3, 6]));
        assert_eq!(v["signature"], json!([3, 3, 0]));
    }
}
