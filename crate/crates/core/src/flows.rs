//! Hamiltonian flows of the affine Hamiltonians on the real cotangent chart.
//!
//! Integration is classical fourth-order Runge–Kutta. It is not symplectic,
//! so conservation of every `H_j` along the flow of `H_i` measures the
//! involution property instead of being built into the scheme.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::exact::{Poly, VariableContext};
use crate::hamiltonians::HamiltonianSet;

pub const DRIFT_FLOOR: f64 = 1e-12;

/// Generic real start whose flows all stay in the affine chart for `t ≤ 10`.
///
/// Every `H_i^a` is quadratic in the momenta, so scaling the momenta by `c`
/// rescales time by `1/c`; real orbits escape the chart in finite time, and
/// small momenta keep the escape time well beyond the integration window.
pub const CONSERVATION_START: FlowState = FlowState {
    x: -0.44,
    y: -0.55,
    z: 0.14,
    u: 4.4e-4,
    v: -1.6e-4,
    w: 4.1e-4,
};

/// Generic real start for short-time flow commutation.
pub const COMMUTATION_START: FlowState = FlowState {
    x: 0.3,
    y: -0.2,
    z: 0.25,
    u: 0.1,
    v: 0.05,
    w: -0.08,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl FlowState {
    pub fn new(x: f64, y: f64, z: f64, u: f64, v: f64, w: f64) -> Self {
        FlowState { x, y, z, u, v, w }
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        let [x, y, z, u, v, w] = a;
        FlowState { x, y, z, u, v, w }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.u, self.v, self.w]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn distance(&self, other: &FlowState) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl std::str::FromStr for FlowState {
    type Err = FlowError;

    /// Parses `x,y,z,u,v,w`.
    fn from_str(s: &str) -> Result<Self, FlowError> {
        let values: Vec<f64> = s
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| FlowError::InvalidConfig(format!("bad state {s:?}: {e}")))?;
        let arr: [f64; 6] = values
            .try_into()
            .map_err(|v: Vec<f64>| FlowError::InvalidConfig(format!("state needs 6 values, got {}", v.len())))?;
        let state = FlowState::from_array(arr);
        if !state.is_finite() {
            return Err(FlowError::InvalidConfig("state must be finite".into()));
        }
        Ok(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub step: f64,
    pub steps: usize,
    pub drift_tolerance: f64,
}

impl FlowConfig {
    pub fn new(step: f64, steps: usize, drift_tolerance: f64) -> Result<Self, FlowError> {
        let cfg = FlowConfig {
            step,
            steps,
            drift_tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(FlowError::InvalidConfig(format!("step must be positive, got {}", self.step)));
        }
        if self.steps == 0 {
            return Err(FlowError::InvalidConfig("steps must be at least 1".into()));
        }
        if !(self.drift_tolerance.is_finite() && self.drift_tolerance > 0.0) {
            return Err(FlowError::InvalidConfig(format!(
                "drift tolerance must be positive, got {}",
                self.drift_tolerance
            )));
        }
        Ok(())
    }
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            step: 1e-3,
            steps: 10_000,
            drift_tolerance: 1e-6,
        }
    }
}

/// A real polynomial in `(x, y, z, u, v, w)` flattened for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, [u16; 6])>,
}

impl CompiledPoly {
    pub fn new(poly: &Poly) -> Result<Self, FlowError> {
        check_context(poly.context())?;
        let mut terms = Vec::with_capacity(poly.term_count());
        for (m, c) in poly.terms() {
            if !c.is_real() {
                return Err(FlowError::InvalidConfig("flows need real coefficients".into()));
            }
            let e = m.exps();
            terms.push((c.to_complex64().re, [e[0], e[1], e[2], e[3], e[4], e[5]]));
        }
        Ok(CompiledPoly { terms })
    }

    pub fn evaluate(&self, s: &[f64; 6]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter()
                    .zip(s)
                    .fold(*c, |acc, (&k, &v)| if k == 0 { acc } else { acc * v.powi(k as i32) })
            })
            .sum()
    }
}

fn check_context(ctx: &VariableContext) -> Result<(), FlowError> {
    if ctx != &VariableContext::affine() {
        return Err(FlowError::WrongContext(ctx.names().to_vec()));
    }
    Ok(())
}

/// A Hamiltonian with its six partial derivatives compiled.
#[derive(Clone, Debug)]
pub struct CompiledHamiltonian {
    pub value: CompiledPoly,
    partials: [CompiledPoly; 6],
}

impl CompiledHamiltonian {
    pub fn new(h: &Poly) -> Result<Self> {
        check_context(h.context())?;
        let names = ["x", "y", "z", "u", "v", "w"];
        let mut partials = Vec::with_capacity(6);
        for n in names {
            partials.push(CompiledPoly::new(&h.partial_derivative(n)?)?);
        }
        Ok(CompiledHamiltonian {
            value: CompiledPoly::new(h)?,
            partials: partials.try_into().expect("six partials"),
        })
    }

    /// `(∂H/∂u, ∂H/∂v, ∂H/∂w, −∂H/∂x, −∂H/∂y, −∂H/∂z)`.
    pub fn field(&self, s: &[f64; 6]) -> [f64; 6] {
        let d: [f64; 6] = std::array::from_fn(|k| self.partials[k].evaluate(s));
        [d[3], d[4], d[5], -d[0], -d[1], -d[2]]
    }
}

pub fn hamiltonian_vector_field(h: &Poly, state: &FlowState) -> Result<[f64; 6]> {
    let field = CompiledHamiltonian::new(h)?.field(&state.to_array());
    if field.iter().any(|c| !c.is_finite()) {
        return Err(FlowError::Divergence { step: 0 }.into());
    }
    Ok(field)
}

fn rk4_step(h: &CompiledHamiltonian, s: &[f64; 6], dt: f64) -> [f64; 6] {
    let add = |a: &[f64; 6], b: &[f64; 6], c: f64| -> [f64; 6] { std::array::from_fn(|k| a[k] + c * b[k]) };
    let k1 = h.field(s);
    let k2 = h.field(&add(s, &k1, dt / 2.0));
    let k3 = h.field(&add(s, &k2, dt / 2.0));
    let k4 = h.field(&add(s, &k3, dt));
    std::array::from_fn(|k| s[k] + dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]))
}

/// RK4 trajectory of `steps + 1` states, starting with `state0`.
pub fn integrate_compiled(
    h: &CompiledHamiltonian,
    state0: &FlowState,
    cfg: &FlowConfig,
) -> Result<Vec<FlowState>, FlowError> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.steps + 1);
    let mut s = state0.to_array();
    out.push(*state0);
    for step in 1..=cfg.steps {
        s = rk4_step(h, &s, cfg.step);
        let state = FlowState::from_array(s);
        if !state.is_finite() {
            return Err(FlowError::Divergence { step });
        }
        out.push(state);
    }
    Ok(out)
}

pub fn integrate(h: &Poly, state0: &FlowState, cfg: &FlowConfig) -> Result<Vec<FlowState>> {
    Ok(integrate_compiled(&CompiledHamiltonian::new(h)?, state0, cfg)?)
}

/// Flow of `h` for time `time`, in equal steps no longer than `max_step`.
pub fn flow_map(h: &CompiledHamiltonian, state: &FlowState, time: f64, max_step: f64) -> Result<FlowState, FlowError> {
    if time == 0.0 {
        return Ok(*state);
    }
    let steps = (time.abs() / max_step).ceil().max(1.0) as usize;
    let mut s = state.to_array();
    let dt = time / steps as f64;
    for step in 1..=steps {
        s = rk4_step(h, &s, dt);
        if s.iter().any(|c| !c.is_finite()) {
            return Err(FlowError::Divergence { step });
        }
    }
    Ok(FlowState::from_array(s))
}

/// `max_t |f(state_t) − f(state_0)| / max(|f(state_0)|, floor)`.
pub fn max_relative_drift(f: &CompiledPoly, trajectory: &[FlowState]) -> f64 {
    let Some(first) = trajectory.first() else {
        return 0.0;
    };
    let f0 = f.evaluate(&first.to_array());
    let scale = f0.abs().max(DRIFT_FLOOR);
    trajectory
        .iter()
        .map(|s| (f.evaluate(&s.to_array()) - f0).abs() / scale)
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConservationReport {
    pub flow_index: usize,
    pub initial_values: [f64; 6],
    pub drifts: [f64; 6],
    pub tolerance: f64,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.drifts.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_drift() < self.tolerance
    }
}

/// Compiled affine Hamiltonians `H_1^a, …, H_6^a`.
pub fn compile_set(set: &HamiltonianSet) -> Result<Vec<CompiledHamiltonian>> {
    set.affine.iter().map(CompiledHamiltonian::new).collect()
}

/// Drift of every `H_j^a` along the flow of `H_i^a`.
pub fn conservation_report(
    set: &HamiltonianSet,
    i: usize,
    state0: &FlowState,
    cfg: &FlowConfig,
) -> Result<ConservationReport> {
    let compiled = compile_set(set)?;
    conservation_report_compiled(&compiled, i, state0, cfg)
}

pub fn conservation_report_compiled(
    compiled: &[CompiledHamiltonian],
    i: usize,
    state0: &FlowState,
    cfg: &FlowConfig,
) -> Result<ConservationReport> {
    let flow = compiled
        .get(i.wrapping_sub(1))
        .ok_or_else(|| FlowError::InvalidConfig(format!("flow index {i} outside 1..=6")))?;
    let trajectory = integrate_compiled(flow, state0, cfg)?;
    let s0 = state0.to_array();
    Ok(ConservationReport {
        flow_index: i,
        initial_values: std::array::from_fn(|j| compiled[j].value.evaluate(&s0)),
        drifts: std::array::from_fn(|j| max_relative_drift(&compiled[j].value, &trajectory)),
        tolerance: cfg.drift_tolerance,
    })
}

/// Conservation reports for all six flows, computed in parallel and returned in flow order.
pub fn conservation_reports(set: &HamiltonianSet, state0: &FlowState, cfg: &FlowConfig) -> Result<Vec<ConservationReport>> {
    let compiled = compile_set(set)?;
    (1..=6)
        .into_par_iter()
        .map(|i| conservation_report_compiled(&compiled, i, state0, cfg))
        .collect()
}

/// `‖φ_f^s ∘ φ_g^t (state0) − φ_g^t ∘ φ_f^s (state0)‖`.
pub fn commutator_distance(
    f: &CompiledHamiltonian,
    g: &CompiledHamiltonian,
    state0: &FlowState,
    s: f64,
    t: f64,
    max_step: f64,
) -> Result<f64, FlowError> {
    let fg = flow_map(f, &flow_map(g, state0, t, max_step)?, s, max_step)?;
    let gf = flow_map(g, &flow_map(f, state0, s, max_step)?, t, max_step)?;
    Ok(fg.distance(&gf))
}

pub const COMMUTATION_STEP: f64 = 1e-4;

pub fn flow_commutation_check(
    set: &HamiltonianSet,
    i: usize,
    j: usize,
    state0: &FlowState,
    s: f64,
    t: f64,
) -> Result<f64> {
    let pick = |k: usize| {
        set.affine
            .get(k.wrapping_sub(1))
            .ok_or_else(|| FlowError::InvalidConfig(format!("flow index {k} outside 1..=6")))
    };
    let f = CompiledHamiltonian::new(pick(i)?)?;
    let g = CompiledHamiltonian::new(pick(j)?)?;
    Ok(commutator_distance(&f, &g, state0, s, t, COMMUTATION_STEP)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::GaussianRational;

    fn affine(terms: &[([u16; 6], i64)]) -> Poly {
        Poly::from_terms(
            &VariableContext::affine(),
            terms.iter().map(|(e, c)| (e.to_vec(), GaussianRational::from_int(*c))),
        )
        .unwrap()
    }

    #[test]
    fn trivial_fields() {
        let s = FlowState::new(1.5, 2.0, -1.0, 3.0, 0.5, -2.0);
        let u2 = affine(&[([0, 0, 0, 2, 0, 0], 1)]);
        assert_eq!(hamiltonian_vector_field(&u2, &s).unwrap(), [6.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let xu = affine(&[([1, 0, 0, 1, 0, 0], 1)]);
        assert_eq!(hamiltonian_vector_field(&xu, &s).unwrap(), [1.5, 0.0, 0.0, -3.0, 0.0, 0.0]);
    }

    #[test]
    fn free_motion_is_straight() {
        let free = affine(&[([0, 0, 0, 2, 0, 0], 1), ([0, 0, 0, 0, 2, 0], 1), ([0, 0, 0, 0, 0, 2], 1)])
            .scale(&GaussianRational::ratio(1, 2));
        let s0 = FlowState::new(0.1, 0.2, 0.3, 1.0, -2.0, 0.5);
        let cfg = FlowConfig::new(0.01, 100, 1e-6).unwrap();
        let last = *integrate(&free, &s0, &cfg).unwrap().last().unwrap();
        let expected = FlowState::new(1.1, -1.8, 0.8, 1.0, -2.0, 0.5);
        assert!(last.distance(&expected) < 1e-12);
    }

    #[test]
    fn constant_hamiltonian_is_stationary() {
        let c = affine(&[([0; 6], 7)]);
        let s0 = FlowState::new(0.1, 0.2, 0.3, 1.0, -2.0, 0.5);
        let traj = integrate(&c, &s0, &FlowConfig::new(0.1, 10, 1e-6).unwrap()).unwrap();
        assert!(traj.iter().all(|s| *s == s0));
    }

    #[test]
    fn step_halving_shows_fourth_order() {
        // pendulum-like H = u²/2 + x⁴/4 + x²/2
        let h = affine(&[([0, 0, 0, 2, 0, 0], 2), ([4, 0, 0, 0, 0, 0], 1), ([2, 0, 0, 0, 0, 0], 2)])
            .scale(&GaussianRational::ratio(1, 4));
        let c = CompiledHamiltonian::new(&h).unwrap();
        let s0 = FlowState::new(0.8, 0.0, 0.0, 0.3, 0.0, 0.0);
        let reference = flow_map(&c, &s0, 1.0, 1e-4).unwrap();
        let err = |dt: f64| flow_map(&c, &s0, 1.0, dt).unwrap().distance(&reference);
        let ratio = err(0.05) / err(0.025);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_configs_and_contexts() {
        assert!(FlowConfig::new(0.0, 10, 1e-6).is_err());
        assert!(FlowConfig::new(1e-3, 0, 1e-6).is_err());
        assert!(FlowConfig::new(1e-3, 10, -1.0).is_err());
        let p = Poly::var(&VariableContext::projective(), "x").unwrap();
        assert!(CompiledHamiltonian::new(&p).is_err());
        assert!("1,2,3".parse::<FlowState>().is_err());
        assert!("1,2,3,4,5,nan".parse::<FlowState>().is_err());
        assert_eq!(
            "1,2,3,4,5,6".parse::<FlowState>().unwrap(),
            FlowState::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
        );
    }

    #[test]
    fn divergence_is_reported() {
        // ẋ = x³ blows up in finite time
        let h = affine(&[([3, 0, 0, 1, 0, 0], 1)]);
        let s0 = FlowState::new(10.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        let err = integrate(&h, &s0, &FlowConfig::new(0.1, 1000, 1e-6).unwrap()).unwrap_err();
        assert!(matches!(err, crate::Error::Flow(FlowError::Divergence { .. })));
    }
}
