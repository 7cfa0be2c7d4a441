//! The quadratic line complex `X = G ∩ F`, its singular lines
//! `Σ = G ∩ F ∩ F₂`, and the Kummer surface of foci.
//!
//! In Klein coordinates the three quadrics are diagonal:
//! `G = ΣX_k²`, `F = Σλ_k X_k²`, `F₂ = Σλ_k² X_k²`.
//!
//! Points of Σ are rarely rational, so sampling, pencils and foci use complex
//! floating point. Residuals are relative: a quadratic form `Σd_k x_k²` is
//! reported as `|Σd_k x_k²| / Σ|d_k||x_k|²`, which is invariant under scaling
//! of both `x` and the form.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::exact::{det3, GaussianRational, Matrix, Poly, Ring, VariableContext};
use crate::hamiltonians::CurveConfig;
use crate::lines::{klein_coords, plucker_coords, plucker_from_klein, PluckerLine};

pub type C64 = Complex64;

pub const CONSTRUCTION_TOL: f64 = 1e-10;

/// The diagonal quadrics `G`, `F`, `F₂` of a curve configuration.
#[derive(Clone, Debug)]
pub struct ComplexForms {
    pub lambdas: [C64; 6],
    pub g: [C64; 6],
    pub f: [C64; 6],
    pub f2: [C64; 6],
}

impl ComplexForms {
    pub fn new(cfg: &CurveConfig) -> Self {
        let lambdas = cfg.lambdas().clone().map(|l| l.to_complex64());
        ComplexForms {
            lambdas,
            g: [C64::new(1.0, 0.0); 6],
            f: lambdas,
            f2: lambdas.map(|l| l * l),
        }
    }
}

pub fn quadratic_value(diag: &[C64; 6], x: &[C64; 6]) -> C64 {
    diag.iter().zip(x).map(|(d, v)| d * v * v).sum()
}

pub fn relative_residual(diag: &[C64; 6], x: &[C64; 6]) -> f64 {
    let scale: f64 = diag.iter().zip(x).map(|(d, v)| d.norm() * v.norm_sqr()).sum();
    if scale == 0.0 {
        return 0.0;
    }
    quadratic_value(diag, x).norm() / scale
}

fn sup_normalize<const N: usize>(x: &[C64; N]) -> [C64; N] {
    let m = x.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    if m == 0.0 {
        return *x;
    }
    x.map(|v| v / m)
}

/// `(G(x), F(x), F₂(x))`.
pub fn sigma_residuals(forms: &ComplexForms, x: &[C64; 6]) -> [C64; 3] {
    [
        quadratic_value(&forms.g, x),
        quadratic_value(&forms.f, x),
        quadratic_value(&forms.f2, x),
    ]
}

fn relative_sigma_residuals(forms: &ComplexForms, x: &[C64; 6]) -> [f64; 3] {
    [
        relative_residual(&forms.g, x),
        relative_residual(&forms.f, x),
        relative_residual(&forms.f2, x),
    ]
}

/// `x′ = (λ₁x₁ : … : λ₆x₆)`.
pub fn prime_point(forms: &ComplexForms, x: &[C64; 6]) -> [C64; 6] {
    std::array::from_fn(|k| forms.lambdas[k] * x[k])
}

/// A singular line of the complex, with its relative `(G, F, F₂)` residuals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub klein: [C64; 6],
    pub residuals: [f64; 3],
}

impl SigmaPoint {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Exact basis of `{y : Σy_k = Σλ_k y_k = Σλ_k² y_k = 0}`.
pub fn power_kernel(cfg: &CurveConfig) -> Vec<Vec<GaussianRational>> {
    power_matrix(cfg).null_space()
}

pub fn power_matrix(cfg: &CurveConfig) -> Matrix {
    let l = cfg.lambdas();
    let rows = (0..3)
        .map(|p| l.iter().map(|v| v.pow(p)).collect())
        .collect();
    Matrix::from_rows(rows).expect("rectangular")
}

/// Samples Σ by drawing `y` from the kernel of the power matrix and taking
/// square roots `x_k = ±√y_k` with random signs. Deterministic in `seed`.
pub fn sample_sigma(cfg: &CurveConfig, seed: u64) -> SigmaPoint {
    let forms = ComplexForms::new(cfg);
    let kernel: Vec<Vec<C64>> = power_kernel(cfg)
        .iter()
        .map(|v| v.iter().map(GaussianRational::to_complex64).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let coeffs: Vec<C64> = kernel
            .iter()
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let y: [C64; 6] = std::array::from_fn(|k| {
            kernel.iter().zip(&coeffs).map(|(v, c)| v[k] * c).sum()
        });
        let largest = y.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
        if largest == 0.0 || y.iter().any(|v| v.norm() < 1e-3 * largest) {
            continue;
        }
        let x = sup_normalize(&std::array::from_fn(|k| {
            let root = y[k].sqrt();
            if rng.random_bool(0.5) {
                -root
            } else {
                root
            }
        }));
        let residuals = relative_sigma_residuals(&forms, &x);
        if residuals.iter().all(|&r| r < CONSTRUCTION_TOL) {
            return SigmaPoint { klein: x, residuals };
        }
    }
}

/// A member `x_λ = λx + x′` of the pencil through a singular line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilSample {
    pub base: SigmaPoint,
    pub lambda: C64,
    pub point: [C64; 6],
}

pub fn pencil_point(forms: &ComplexForms, x: &SigmaPoint, lambda: C64) -> PencilSample {
    let point = std::array::from_fn(|k| (lambda + forms.lambdas[k]) * x.klein[k]);
    PencilSample {
        base: x.clone(),
        lambda,
        point,
    }
}

/// Relative residuals of `x_λ` against `G`, `F^(λ) = Σ(λ+λ_k)⁻¹X_k²` and
/// `F₂^(λ) = Σ(λ+λ_k)⁻²X_k²`. Fails at the poles `λ = −λ_k`.
pub fn pencil_residuals(forms: &ComplexForms, sample: &PencilSample) -> Result<[f64; 3], GeometryError> {
    let shifts: [C64; 6] = std::array::from_fn(|k| sample.lambda + forms.lambdas[k]);
    let scale = forms.lambdas.iter().map(|l| l.norm()).fold(1.0_f64, f64::max);
    if let Some(k) = shifts.iter().position(|s| s.norm() <= 1e-12 * scale) {
        return Err(GeometryError::Degenerate(format!(
            "pencil parameter is the pole -lambda_{}",
            k + 1
        )));
    }
    let f_lambda = shifts.map(|s| s.inv());
    let f2_lambda = shifts.map(|s| (s * s).inv());
    let z = sup_normalize(&sample.point);
    Ok([
        relative_residual(&forms.g, &z),
        relative_residual(&f_lambda, &z),
        relative_residual(&f2_lambda, &z),
    ])
}

/// Returns the unique `i` with `z_i = 0` and `Σ_{j≠i} z_j²/(λ_i − λ_j) = 0` (within `tol`).
pub fn bitangent_test(forms: &ComplexForms, z: &[C64; 6], tol: f64) -> Result<Option<usize>, GeometryError> {
    let z = sup_normalize(z);
    if z.iter().all(|v| v.is_zero()) {
        return Err(GeometryError::ZeroPoint);
    }
    if relative_residual(&forms.g, &z) > tol {
        return Err(GeometryError::Degenerate("point is not on the Grassmannian".into()));
    }
    let mut hits = Vec::new();
    for i in 0..6 {
        if z[i].norm() > tol {
            continue;
        }
        let weights: [C64; 6] = std::array::from_fn(|j| {
            if j == i {
                C64::zero()
            } else {
                (forms.lambdas[i] - forms.lambdas[j]).inv()
            }
        });
        if relative_residual(&weights, &z) <= tol {
            hits.push(i + 1);
        }
    }
    match hits.as_slice() {
        [] => Ok(None),
        [i] => Ok(Some(*i)),
        _ => Err(GeometryError::Degenerate(format!("several indices pass: {hits:?}"))),
    }
}

/// The common point of the lines `l_x` and `l_{x′}` of a singular line `x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FocusPoint {
    pub point: [C64; 4],
    /// Relative incidence residuals of the point with the two lines.
    pub incidence: [f64; 2],
}

fn matrix_norm(m: &[[C64; 4]; 4]) -> f64 {
    m.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn vec_norm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn mat_vec(m: &[[C64; 4]; 4], v: &[C64; 4]) -> [C64; 4] {
    std::array::from_fn(|r| (0..4).map(|c| m[r][c] * v[c]).sum())
}

/// Relative residual of "point `p` lies on the line".
pub fn point_on_line_residual(line: &PluckerLine<C64>, p: &[C64; 4]) -> f64 {
    let d = line.dual_matrix();
    vec_norm(&mat_vec(&d, p)) / (matrix_norm(&d) * vec_norm(p))
}

/// Relative residual of "the line lies in the plane `h`".
pub fn line_in_plane_residual(line: &PluckerLine<C64>, h: &[C64; 4]) -> f64 {
    let m = line.primal_matrix();
    vec_norm(&mat_vec(&m, h)) / (matrix_norm(&m) * vec_norm(h))
}

/// Intersection point of two coplanar lines given by Klein coordinates.
pub fn intersect_lines(a: &[C64; 6], b: &[C64; 6], tol: f64) -> Result<FocusPoint, GeometryError> {
    let la = PluckerLine { coords: plucker_from_klein(a) };
    let lb = PluckerLine { coords: plucker_from_klein(b) };
    // lines meet iff their Klein vectors are orthogonal for the polarized G
    let meet: C64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
    let skew = meet.norm() / (vec_norm(a) * vec_norm(b));
    if skew > tol {
        return Err(GeometryError::SkewLines(skew));
    }
    // columns of the primal matrix are points of the line; take the best-conditioned pair
    let pm = la.primal_matrix();
    let cols: Vec<[C64; 4]> = (0..4).map(|k| std::array::from_fn(|r| pm[r][k])).collect();
    let mut best = (0, 1, -1.0);
    for j in 0..4 {
        for k in j + 1..4 {
            let span = vec_norm(&plucker_coords(&cols[j], &cols[k]));
            if span > best.2 {
                best = (j, k, span);
            }
        }
    }
    let (pa, pb) = (cols[best.0], cols[best.1]);
    let dual_b = lb.dual_matrix();
    let (da, db) = (mat_vec(&dual_b, &pa), mat_vec(&dual_b, &pb));
    let r = (0..4)
        .max_by(|&i, &j| {
            (da[i].norm() + db[i].norm())
                .partial_cmp(&(da[j].norm() + db[j].norm()))
                .unwrap()
        })
        .unwrap();
    let (alpha, beta) = (db[r], -da[r]);
    let point = if alpha.norm() + beta.norm() == 0.0 {
        // line B contains both points: the lines coincide
        return Err(GeometryError::Degenerate("lines coincide".into()));
    } else {
        sup_normalize(&std::array::from_fn(|k| alpha * pa[k] + beta * pb[k]))
    };
    let incidence = [
        point_on_line_residual(&la, &point),
        point_on_line_residual(&lb, &point),
    ];
    Ok(FocusPoint { point, incidence })
}

/// `p = l_x ∩ l_{x′}` for a singular line `x`.
pub fn focus_point(forms: &ComplexForms, x: &SigmaPoint) -> Result<FocusPoint, GeometryError> {
    let xp = prime_point(forms, &x.klein);
    intersect_lines(&x.klein, &xp, 1e-8)
}

/// `M_ab = F(K(⟨p, e_a⟩), K(⟨p, e_b⟩))` over the three coordinate vectors
/// `e_a`, `a ≠ drop`.
pub fn membership_matrix<T: Ring>(lambdas: &[T; 6], p: &[T; 4], drop: usize) -> [[T; 3]; 3] {
    let zero = p[0].clone() - p[0].clone();
    let one_at = |a: usize| -> [T; 4] {
        std::array::from_fn(|k| if k == a { p[0].one_like() } else { zero.clone() })
    };
    let others: Vec<usize> = (0..4).filter(|&a| a != drop).collect();
    let images: Vec<[T; 6]> = others
        .iter()
        .map(|&a| klein_coords(&plucker_coords(p, &one_at(a))))
        .collect();
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            (0..6)
                .map(|k| lambdas[k].clone() * images[a][k].clone() * images[b][k].clone())
                .reduce(|acc, v| acc + v)
                .unwrap()
        })
    })
}

/// `det M` for the pivot `drop = argmax |p_k|`; vanishes iff `p ∈ S`.
///
/// Equals `p_drop² · D(p)` where `D` is the Kummer quartic, so its vanishing
/// does not depend on the pivot.
pub fn kummer_membership_value(forms: &ComplexForms, p: &[C64; 4]) -> C64 {
    let drop = (0..4)
        .max_by(|&i, &j| p[i].norm().partial_cmp(&p[j].norm()).unwrap())
        .unwrap();
    det3(&membership_matrix(&forms.f, p, drop))
}

/// `|det M| / Π_a ‖M_a‖`: the membership value scaled by its Hadamard bound.
pub fn kummer_membership_residual(forms: &ComplexForms, p: &[C64; 4]) -> f64 {
    let p = sup_normalize(p);
    let drop = (0..4)
        .max_by(|&i, &j| p[i].norm().partial_cmp(&p[j].norm()).unwrap())
        .unwrap();
    let m = membership_matrix(&forms.f, &p, drop);
    let bound: f64 = m.iter().map(vec_norm).product();
    if bound == 0.0 {
        return 0.0;
    }
    det3(&m).norm() / bound
}

/// `|Σ c_m m(p)| / Σ |c_m||m(p)|`.
pub fn relative_poly_value(poly: &Poly, p: &[C64]) -> f64 {
    let (value, scale) = poly.terms().fold((C64::zero(), 0.0), |(v, s), (m, c)| {
        let term = m
            .exps()
            .iter()
            .zip(p)
            .fold(c.to_complex64(), |acc, (&e, x)| acc * x.powu(e as u32));
        (v + term, s + term.norm())
    });
    if scale == 0.0 {
        0.0
    } else {
        value.norm() / scale
    }
}

/// The Kummer quartic `D` with `det M_k(p) = p_k² · D(p)` for every pivot `k`.
#[derive(Clone, Debug)]
pub struct KummerSurface {
    /// Homogeneous in `(x, y, z, t)`.
    pub quartic: Poly,
    /// `D(x, y, z, 1)`.
    pub chart: Poly,
    gradient: [Poly; 4],
}

impl KummerSurface {
    pub fn new(cfg: &CurveConfig) -> Result<Self> {
        let ctx = VariableContext::new(&["x", "y", "z", "t"])?;
        let vars = Poly::vars(&ctx);
        let p: [Poly; 4] = std::array::from_fn(|k| vars[k].clone());
        let lambdas: [Poly; 6] = cfg.lambdas().clone().map(|l| Poly::constant(&ctx, l));
        let det = det3(&membership_matrix(&lambdas, &p, 3));
        let mut terms = Vec::with_capacity(det.term_count());
        for (m, c) in det.terms() {
            let mut e = m.exps().to_vec();
            if e[3] < 2 {
                return Err(GeometryError::Degenerate("membership determinant not divisible by t^2".into()).into());
            }
            e[3] -= 2;
            terms.push((e, c.clone()));
        }
        let quartic = Poly::from_terms(&ctx, terms)?;
        if quartic.is_zero() {
            return Err(GeometryError::Degenerate("Kummer quartic vanishes identically".into()).into());
        }
        let chart_ctx = VariableContext::new(&["x", "y", "z"])?;
        let chart_vars = Poly::vars(&chart_ctx);
        let chart = quartic.compose(
            &chart_ctx,
            &[
                chart_vars[0].clone(),
                chart_vars[1].clone(),
                chart_vars[2].clone(),
                Poly::one(&chart_ctx),
            ],
        )?;
        let gradient = [
            quartic.partial_derivative("x")?,
            quartic.partial_derivative("y")?,
            quartic.partial_derivative("z")?,
            quartic.partial_derivative("t")?,
        ];
        Ok(KummerSurface { quartic, chart, gradient })
    }

    pub fn evaluate(&self, p: &[C64; 4]) -> C64 {
        eval_complex(&self.quartic, p)
    }

    /// Relative value of the quartic at `p`.
    pub fn residual(&self, p: &[C64; 4]) -> f64 {
        relative_poly_value(&self.quartic, &sup_normalize(p))
    }

    /// The tangent plane `∇D(p)` as a dual vector; fails at singular points.
    pub fn tangent_plane(&self, p: &[C64; 4]) -> Result<[C64; 4], GeometryError> {
        let p = sup_normalize(p);
        let h: [C64; 4] = std::array::from_fn(|k| eval_complex(&self.gradient[k], &p));
        let scale: f64 = self
            .gradient
            .iter()
            .map(|g| g.terms().map(|(_, c)| c.magnitude_f64()).sum::<f64>())
            .fold(0.0, f64::max);
        if vec_norm(&h) <= 1e-10 * scale.max(1.0) {
            return Err(GeometryError::SingularPoint(format!("{p:?}")));
        }
        Ok(sup_normalize(&h))
    }
}

fn eval_complex(poly: &Poly, p: &[C64]) -> C64 {
    poly.evaluate_with(p, GaussianRational::to_complex64, C64::new(1.0, 0.0))
}

/// Residual of "the pencil line `l_{x_λ}` lies in the plane `h`".
pub fn pencil_in_plane_residual(sample: &PencilSample, h: &[C64; 4]) -> f64 {
    let line = PluckerLine {
        coords: plucker_from_klein(&sup_normalize(&sample.point)),
    };
    line_in_plane_residual(&line, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lines::HomPoint4;

    fn forms() -> (CurveConfig, ComplexForms) {
        let cfg = CurveConfig::reference();
        let f = ComplexForms::new(&cfg);
        (cfg, f)
    }

    #[test]
    fn samples_lie_on_sigma_and_are_reproducible() {
        let (cfg, forms) = forms();
        for seed in 0..20 {
            let x = sample_sigma(&cfg, seed);
            assert!(x.max_residual() < CONSTRUCTION_TOL);
            assert_eq!(x.klein, sample_sigma(&cfg, seed).klein);
            let xp = prime_point(&forms, &x.klein);
            assert!(relative_residual(&forms.g, &xp) < 1e-10);
        }
        assert_ne!(sample_sigma(&cfg, 1).klein, sample_sigma(&cfg, 2).klein);
    }

    #[test]
    fn pencil_members_satisfy_the_shifted_forms() {
        let (cfg, forms) = forms();
        let x = sample_sigma(&cfg, 7);
        for lambda in [C64::new(0.5, 0.0), C64::new(-2.5, 1.0), C64::new(10.0, -3.0)] {
            let r = pencil_residuals(&forms, &pencil_point(&forms, &x, lambda)).unwrap();
            assert!(r.iter().all(|&v| v < 1e-10), "{r:?}");
        }
        let pole = pencil_point(&forms, &x, C64::new(-2.0, 0.0));
        assert!(pencil_residuals(&forms, &pole).is_err());
    }

    #[test]
    fn bitangents_sit_at_the_poles() {
        let (cfg, forms) = forms();
        let x = sample_sigma(&cfg, 3);
        for i in 1..=6 {
            let z = pencil_point(&forms, &x, -forms.lambdas[i - 1]).point;
            assert_eq!(bitangent_test(&forms, &z, 1e-9).unwrap(), Some(i));
        }
        let z = pencil_point(&forms, &x, C64::new(0.3, 0.2)).point;
        assert_eq!(bitangent_test(&forms, &z, 1e-9).unwrap(), None);
        assert!(bitangent_test(&forms, &[C64::zero(); 6], 1e-9).is_err());
    }

    #[test]
    fn focus_is_symmetric_and_on_both_lines() {
        let (cfg, forms) = forms();
        let x = sample_sigma(&cfg, 11);
        let xp = prime_point(&forms, &x.klein);
        let a = intersect_lines(&x.klein, &xp, 1e-8).unwrap();
        let b = intersect_lines(&xp, &x.klein, 1e-8).unwrap();
        assert!(a.incidence.iter().all(|&r| r < 1e-10));
        let cross = vec_norm(&plucker_coords(&a.point, &b.point));
        assert!(cross < 1e-10);
        assert!(kummer_membership_residual(&forms, &a.point) < 1e-8);
    }

    #[test]
    fn skew_and_coincident_lines_are_rejected() {
        let e = |k: usize| -> [C64; 4] { std::array::from_fn(|j| C64::new((j == k) as u8 as f64, 0.0)) };
        let line = |a: usize, b: usize| klein_coords(&plucker_coords(&e(a), &e(b)));
        assert!(matches!(intersect_lines(&line(0, 1), &line(2, 3), 1e-8), Err(GeometryError::SkewLines(_))));
        assert!(matches!(intersect_lines(&line(0, 1), &line(0, 1), 1e-8), Err(GeometryError::Degenerate(_))));
        let meet = intersect_lines(&line(0, 1), &line(0, 2), 1e-8).unwrap();
        assert!(vec_norm(&plucker_coords(&meet.point, &e(0))) < 1e-14);
    }

    #[test]
    fn quartic_matches_every_pivot_exactly() {
        let cfg = CurveConfig::reference();
        let surface = KummerSurface::new(&cfg).unwrap();
        assert_eq!(surface.quartic.total_degree(), Some(4));
        assert_eq!(surface.quartic.degrees_in(&["x", "y", "z", "t"]).unwrap().into_iter().collect::<Vec<_>>(), vec![4]);
        assert_eq!(surface.chart.total_degree(), Some(4));
        let p = HomPoint4::from_ints([3, -1, 2, 5]).unwrap();
        let d = surface.quartic.evaluate(p.coords()).unwrap();
        for k in 0..4 {
            let det = det3(&membership_matrix(cfg.lambdas(), p.coords(), k));
            assert_eq!(det, &d * &p.coords()[k].pow(2));
        }
    }

    #[test]
    fn foci_lie_on_the_quartic_and_pencils_in_its_tangent_planes() {
        let (cfg, forms) = forms();
        let surface = KummerSurface::new(&cfg).unwrap();
        for seed in 0..5 {
            let x = sample_sigma(&cfg, seed);
            let p = focus_point(&forms, &x).unwrap().point;
            assert!(surface.residual(&p) < 1e-8);
            let h = surface.tangent_plane(&p).unwrap();
            for lambda in [C64::new(0.7, 0.0), C64::new(-4.0, 2.0), C64::new(1.5, -1.0)] {
                let r = pencil_in_plane_residual(&pencil_point(&forms, &x, lambda), &h);
                assert!(r < 1e-7, "seed {seed}: {r}");
            }
        }
    }

    #[test]
    fn generic_points_are_off_the_surface() {
        let (cfg, forms) = forms();
        let surface = KummerSurface::new(&cfg).unwrap();
        let p = [C64::new(0.3, 0.1), C64::new(-1.0, 0.4), C64::new(0.8, 0.0), C64::new(0.2, -0.5)];
        assert!(surface.residual(&p) > 1e-3);
        assert!(kummer_membership_residual(&forms, &p) > 1e-3);
    }
}
