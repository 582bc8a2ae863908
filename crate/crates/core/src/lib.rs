//! Numerical toolkit for bilinear spectral multiplier operators
//! `B_m(f1, f2)(x) = m(L1, L2)(f1 (x) f2)(x, x)` in three concrete settings:
//! the discrete Laplacian on `Z^d`, Jacobi trigonometric polynomial
//! expansions, and the rank-one Dunkl transform. Ships the accompanying
//! paradifferential machinery (dyadic decompositions, localized-symbol
//! Fourier coefficients, square and maximal functions, spectral-support
//! checks) and fractional Leibniz-rule experiment harnesses.

pub mod discrete;
pub mod dunkl;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod lattice;
pub mod leibniz;
pub mod paradiff;
pub mod quadrature;
pub mod special;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
