//! Classification of 3×3 quasiconvex quadratic forms.
//!
//! A quadratic form `f(ξ) = Σ C_ijkl ξ_ij ξ_kl` on `d×d` matrices is
//! quasiconvex when `f(x⊗y) ≥ 0` for all vectors `x, y`. This crate decides,
//! for `d = 3`, whether such a form spans an extreme ray of the cone of
//! quasiconvex forms or is polyconvex (a sum of squares of bilinear forms
//! modulo 2×2 minors), by exact determinant computations on the acoustic
//! tensor `T(y)` and semidefinite certificates.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod classifier;
pub mod convexity;
pub mod error;
pub mod extremality;
pub mod poly;
pub mod psd;
pub mod scalar;
pub mod structure;
pub mod suites;
mod sphere;
pub mod tensor;

pub use error::{Error, Result};
pub use poly::{HomPoly, LinearForm, Monomial, QuadForm};
pub use psd::SymMatrix;
pub use scalar::Scalar;
pub use tensor::{BiquadraticForm, ElastTensor, PolynomialMatrix};

use num_rational::BigRational;

/// Exact rational polynomial.
pub type RatPoly = HomPoly<BigRational>;
/// Double-precision polynomial.
pub type FloatPoly = HomPoly<f64>;
/// Single-precision polynomial.
pub type Float32Poly = HomPoly<f32>;
/// Exact quadratic form.
pub type RatQuadForm = QuadForm<BigRational>;
/// Exact linear form.
pub type RatLinearForm = LinearForm<BigRational>;
/// Exact polynomial matrix.
pub type RatPolyMatrix = PolynomialMatrix<BigRational>;
