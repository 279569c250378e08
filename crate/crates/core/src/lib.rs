//! Exact finite-difference calculus on finitely generated abelian
//! groups: Smith-normal-form generation checks, exponential polynomials
//! with translation/difference operators, brute-force window kernels,
//! and end-to-end verification of the mixed-differences Montel pipeline.

pub mod diffcalc;
pub mod error;
pub mod exppoly;
pub mod group;
pub mod linalg;
pub mod montel;
pub mod poly;
pub mod scalar;
pub mod solver;

pub use error::CoreError;
