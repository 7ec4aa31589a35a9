use thiserror::Error;

use crate::scalar::Backend;

#[derive(Debug, Error)]
pub enum Error {
    #[error("backend mismatch: {0} and {1} values cannot be combined")]
    BackendMismatch(Backend, Backend),
    #[error("expected a form of grade {expected}, got grade {got}")]
    Grade { expected: usize, got: usize },
    #[error("form is not primitive with respect to omega")]
    NotPrimitive,
    #[error("form is not primitive at {0}")]
    NotPrimitiveAt(String),
    #[error("wrong orbit: {0}")]
    WrongOrbit(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
