//! Exact construction and verification of the genus-2 Hitchin Hamiltonians,
//! together with the quadratic line complex geometry behind them.

pub mod error;
pub mod exact;
pub mod flows;
pub mod hamiltonians;
pub mod harness;
pub mod kummer;
pub mod lines;
pub mod roots;
pub mod weierstrass;

pub use error::{Error, Result};
pub use exact::{GaussianRational, Poly, SparsePolynomial, VariableContext};
pub use hamiltonians::{CurveConfig, FiberConic, HamiltonianSet};
pub use lines::{HomPoint4, KleinVector, PluckerLine};
