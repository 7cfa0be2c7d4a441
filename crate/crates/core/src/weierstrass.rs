//! Recovering the branch values from a single fiber.
//!
//! The six restricted conics of a fiber lie in a 3-dimensional span and, in
//! the projectivized span, on one smooth conic. Parametrizing that conic as
//! `(s:t) ↦ s²Q₁ + 2st·Q₂ + t²Q₃` puts the six degenerate members at six
//! points of P¹, which are the branch values up to a fractional linear map.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::exact::{GaussianRational, Matrix};
use crate::hamiltonians::{fiber_conics, tangent_sextic, FiberConic, HamiltonianSet};
use crate::lines::HomPoint4;
use crate::roots::{binary_form_roots, match_up_to_mobius, MobiusMatch, ProjectivePoint};

/// Veronese parametrization of the fiber's pencil of tangent conics.
#[derive(Clone, Debug)]
pub struct QuadraticSystem {
    pub q1: FiberConic,
    pub q2: FiberConic,
    pub q3: FiberConic,
    /// Exact parameter `(s:t)` of each input conic.
    pub parameters: [[GaussianRational; 2]; 6],
}

impl QuadraticSystem {
    /// `s²Q₁ + 2st·Q₂ + t²Q₃`.
    pub fn member(&self, s: &GaussianRational, t: &GaussianRational) -> FiberConic {
        let two_st = &GaussianRational::from_int(2) * &(s * t);
        FiberConic::combine(&[(&(s * s), &self.q1), (&two_st, &self.q2), (&(t * t), &self.q3)])
    }

    pub fn sextic(&self) -> [GaussianRational; 7] {
        tangent_sextic(&self.q1, &self.q2, &self.q3)
    }
}

/// Coordinates of `target` in the span of `basis`, if it lies there.
fn coordinates_in_span(
    basis: &[[GaussianRational; 6]],
    target: &[GaussianRational; 6],
) -> Option<Vec<GaussianRational>> {
    let n = basis.len();
    let rows = (0..6)
        .map(|r| {
            basis
                .iter()
                .map(|b| b[r].clone())
                .chain(std::iter::once(target[r].clone()))
                .collect()
        })
        .collect();
    let (rref, pivots) = Matrix::from_rows(rows).ok()?.rref();
    if pivots.contains(&n) || pivots.len() < n {
        return None;
    }
    Some((0..n).map(|k| rref.get(k, n).clone()).collect())
}

/// Builds the parametrization from six fiber conics.
///
/// The first three conics are used as a basis of the span and sit at the
/// parameters `(0:1)`, `(1:0)`, `(1:−1)`.
pub fn quadratic_system(conics: &[FiberConic]) -> Result<QuadraticSystem> {
    if conics.len() != 6 {
        return Err(GeometryError::Degenerate(format!("expected 6 conics, got {}", conics.len())).into());
    }
    let vectors: Vec<[GaussianRational; 6]> = conics.iter().map(FiberConic::coefficient_vector).collect();
    let basis = &vectors[..3];
    let degenerate = |msg: &str| GeometryError::Degenerate(msg.to_owned());
    let mut coords = Vec::with_capacity(3);
    for v in &vectors[3..] {
        let c = coordinates_in_span(basis, v)
            .ok_or_else(|| degenerate("first three conics do not span the fiber system"))?;
        coords.push(c);
    }
    // conic a·βγ + b·αγ + c·αβ = 0 through the coordinate points and the remaining three
    let rows = coords
        .iter()
        .map(|c| vec![&c[1] * &c[2], &c[0] * &c[2], &c[0] * &c[1]])
        .collect();
    let kernel = Matrix::from_rows(rows)?.null_space();
    let [a, b, c] = match kernel.as_slice() {
        [k] => [k[0].clone(), k[1].clone(), k[2].clone()],
        _ => return Err(degenerate("the six conics do not lie on a unique conic").into()),
    };
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(degenerate("conic through the six members is singular").into());
    }
    let half = GaussianRational::ratio(1, 2);
    let q1 = conics[1].scaled(&b);
    let q3 = conics[0].scaled(&a);
    let q2 = FiberConic::combine(&[(&a, &conics[0]), (&b, &conics[1]), (&-&c, &conics[2])]).scaled(&half);
    let mut parameters: [[GaussianRational; 2]; 6] = [
        [GaussianRational::zero(), GaussianRational::from_int(1)],
        [GaussianRational::from_int(1), GaussianRational::zero()],
        [GaussianRational::from_int(1), GaussianRational::from_int(-1)],
        Default::default(),
        Default::default(),
        Default::default(),
    ];
    for (k, co) in coords.iter().enumerate() {
        // α/β = a t / (b s)
        parameters[k + 3] = [&a * &co[1], &b * &co[0]];
    }
    Ok(QuadraticSystem { q1, q2, q3, parameters })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeierstrassReport {
    /// Sextic coefficients as `[re, im]` pairs, `a^6` first.
    pub sextic: Vec<[f64; 2]>,
    /// Numeric roots `(a:b)` as `[[re, im], [re, im]]`.
    pub roots: Vec<[[f64; 2]; 2]>,
    /// `permutation[k]` = root matched with `λ_{k+1}`.
    pub permutation: Vec<usize>,
    pub max_error: f64,
}

/// Builds the fiber system at `q`, finds the sextic's roots numerically and
/// matches them against the branch values.
pub fn weierstrass_recovery(set: &HamiltonianSet, q: &HomPoint4<GaussianRational>) -> Result<WeierstrassReport> {
    let conics = fiber_conics(set, q)?;
    let system = quadratic_system(&conics)?;
    let sextic = system.sextic();
    let numeric: Vec<Complex64> = sextic.iter().map(GaussianRational::to_complex64).collect();
    let zero_flags: Vec<bool> = sextic.iter().map(Zero::is_zero).collect();
    let roots = binary_form_roots(&numeric, &zero_flags);
    if roots.len() != 6 {
        return Err(GeometryError::Degenerate(format!("sextic has {} roots", roots.len())).into());
    }
    let targets: Vec<ProjectivePoint> = set
        .config
        .lambdas()
        .iter()
        .map(|l| [l.to_complex64(), Complex64::new(1.0, 0.0)])
        .collect();
    let MobiusMatch { permutation, max_error } = match_up_to_mobius(&roots, &targets);
    Ok(WeierstrassReport {
        sextic: numeric.iter().map(|c| [c.re, c.im]).collect(),
        roots: roots.iter().map(|r| [[r[0].re, r[0].im], [r[1].re, r[1].im]]).collect(),
        permutation,
        max_error,
    })
}

/// Exact cross-ratio `[a,c][b,d]/([a,d][b,c])` on P¹ over ℚ(i).
pub fn exact_cross_ratio(
    a: &[GaussianRational; 2],
    b: &[GaussianRational; 2],
    c: &[GaussianRational; 2],
    d: &[GaussianRational; 2],
) -> Option<GaussianRational> {
    let br = |p: &[GaussianRational; 2], q: &[GaussianRational; 2]| &(&p[0] * &q[1]) - &(&p[1] * &q[0]);
    (&br(a, c) * &br(b, d)).checked_div(&(&br(a, d) * &br(b, c))).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::CurveConfig;

    #[test]
    fn parameters_are_roots_of_the_sextic() {
        let set = HamiltonianSet::build(&CurveConfig::reference()).unwrap();
        let q = HomPoint4::from_ints([2, -3, 1, 4]).unwrap();
        let system = quadratic_system(&fiber_conics(&set, &q).unwrap()).unwrap();
        let sextic = system.sextic();
        for [s, t] in &system.parameters {
            let value = (0..7).fold(GaussianRational::zero(), |acc, k| {
                acc + &(&sextic[k] * &(&s.pow(6 - k as u32) * &t.pow(k as u32)))
            });
            assert!(value.is_zero());
            assert!(system.member(s, t).determinant().is_zero());
        }
    }

    #[test]
    fn members_are_proportional_to_the_input_conics() {
        let set = HamiltonianSet::build(&CurveConfig::reference()).unwrap();
        let q = HomPoint4::from_ints([1, 1, -2, 3]).unwrap();
        let conics = fiber_conics(&set, &q).unwrap();
        let system = quadratic_system(&conics).unwrap();
        for (conic, [s, t]) in conics.iter().zip(&system.parameters) {
            let member = system.member(s, t).coefficient_vector();
            assert!(crate::lines::proportional(&member, &conic.coefficient_vector()));
        }
    }

    #[test]
    fn identity_correspondence_is_exact() {
        let cfg = CurveConfig::from_ints([2, 3, 7, -1, 4, 10]).unwrap();
        let set = HamiltonianSet::build(&cfg).unwrap();
        let q = HomPoint4::from_ints([5, 1, -2, 3]).unwrap();
        let system = quadratic_system(&fiber_conics(&set, &q).unwrap()).unwrap();
        let lam: Vec<[GaussianRational; 2]> = cfg
            .lambdas()
            .iter()
            .map(|l| [l.clone(), GaussianRational::from_int(1)])
            .collect();
        let p = &system.parameters;
        for k in 3..6 {
            assert_eq!(
                exact_cross_ratio(&p[0], &p[1], &p[2], &p[k]),
                exact_cross_ratio(&lam[0], &lam[1], &lam[2], &lam[k]),
            );
        }
    }
}
