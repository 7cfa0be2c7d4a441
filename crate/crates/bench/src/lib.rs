//! Shared fixtures for the criterion benchmarks.

use hitchin_core::flows::FlowConfig;
use hitchin_core::hamiltonians::{CurveConfig, HamiltonianSet};
use hitchin_core::lines::HomPoint4;
use hitchin_core::GaussianRational;

pub fn reference_set() -> HamiltonianSet {
    HamiltonianSet::build(&CurveConfig::reference()).expect("reference curve builds")
}

pub fn fiber_point() -> HomPoint4<GaussianRational> {
    HomPoint4::new([
        GaussianRational::from_int(3),
        GaussianRational::ratio(-1, 2),
        GaussianRational::from_int(2),
        GaussianRational::ratio(5, 3),
    ])
    .expect("nonzero point")
}

/// 1000 RK4 steps of size 1e-3.
pub fn short_flow() -> FlowConfig {
    FlowConfig::new(1e-3, 1000, 1e-6).expect("valid flow configuration")
}
