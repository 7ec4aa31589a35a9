pub mod error;
pub mod exterior;
pub mod linalg;
pub mod scalar;
pub mod invariants;
pub mod classify;
pub mod hitchin;
pub mod rng;
pub mod patch;
pub mod geometry;
pub mod io;
pub mod report;
pub mod config;
pub mod verify;
pub mod cli;
