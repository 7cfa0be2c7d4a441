//! Exact arithmetic: Gaussian rationals, sparse polynomials, dense linear algebra.

mod gaussian;
pub mod json;
pub mod linalg;
mod poly;
mod scalar;

pub use gaussian::{parse_rational, GaussianRational};
pub use linalg::{det3, Matrix};
pub use poly::{Monomial, Poly, SparsePolynomial, VariableContext};
pub use scalar::Ring;
