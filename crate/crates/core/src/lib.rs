//! Spectral analysis and first-order factorization of regular complex matrix
//! polynomials.
//!
//! The crate computes eigenvalues, Jordan chains and maximal standard pairs
//! of `P(λ) = Σ A_i λ^i`, enumerates its solvents, cosolvents and separable
//! bisolvents, and turns every separable bisolvent into a verified regular
//! right factor `λS₂ - S₁` together with its left quotient.

pub mod error;
pub mod factor;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod linearize;
pub mod oracle;
pub mod poly;
pub mod solvents;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
pub use poly::MatrixPolynomial;
