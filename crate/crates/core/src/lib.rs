//! Leading-term asymptotics for coefficients of multivariate rational
//! generating functions `F = G/H` at strictly minimal multiple points.
//!
//! The pipeline is: parse and validate a problem ([`model`]), locate the
//! multiple point and its local sheet data ([`locus`]), build the direction
//! matrix and its cone ([`cone`]), assemble the phase Hessians ([`local`]),
//! and dispatch to the matching leading-term formula ([`engine`]). Every
//! prediction can be checked against the exact coefficient oracle in
//! [`poly::series`] with the tools in [`verify`].

pub mod cone;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod local;
pub mod locus;
pub mod model;
pub mod poly;
pub mod verify;

pub use error::{Error, Result};

/// Exact rational scalar used throughout the oracle and the exact paths.
pub type Q = num_rational::BigRational;

/// Complex double scalar.
pub type C64 = num_complex::Complex64;
