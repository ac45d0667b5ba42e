//! Exact and numerical toolkit for Gentile (intermediate) statistics.
//!
//! A single mode holding at most `n` particles is realized on the
//! `(n+1)`-dimensional Fock space. The crate provides exact Laurent
//! arithmetic in the phase `q = e^{i2π/(n+1)}`, the matrix representation of
//! the ladder operators, a symbolic engine for the deformed bracket
//! `[u,v]_n = uv − q·vu`, an identity audit, coherent states, the oscillator
//! spectrum and su(2) representations built from one set of ladder operators.

pub mod laurent;
pub mod matrix;
pub mod eigen;
pub mod dd;
pub mod json;
pub mod rep;
pub mod symbolic;
pub mod audit;
pub mod coherent;
pub mod oscillator;
pub mod su2;

pub use laurent::{laurent_eval, LaurentScalar};
pub use matrix::{max_abs_diff, CMatrix, DimensionMismatch};
pub use eigen::{hermitian_eigen, matrix_function, EigenError, HermitianEigen};

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
