//! The six Hamiltonians of the genus-2 system and their verification.
//!
//! For a point `q = (x:y:z:t)` and a dual point `p = (u:v:w:s)` incident with
//! it, `H_i(p, q) = Σ_{j≠i} X_j(⟨ε_i(q), p⟩)² / (λ_i − λ_j)`. Polynomials are
//! stored with the common denominator `Π_{j≠i}(λ_i − λ_j)` cleared, so each
//! `H_i` is fixed only up to a nonzero constant.
//!
//! The affine Hamiltonians live on `T*C³` with coordinates `(x,y,z,u,v,w)` and
//! are obtained by `t ← 1`, `s ← −(xu + yv + zw)`.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, ConfigError, Error, GeometryError, Result};
use crate::exact::json::PolyDoc;
use crate::exact::{det3, GaussianRational, Matrix, Poly, VariableContext};
use crate::lines::{
    epsilon_section, incidence_plane_basis, klein_coords, plucker_coords, HomPoint4,
};

pub const POSITIONS: [&str; 3] = ["x", "y", "z"];
pub const MOMENTA: [&str; 3] = ["u", "v", "w"];
pub const POINT_BLOCK: [&str; 4] = ["x", "y", "z", "t"];
pub const DUAL_BLOCK: [&str; 4] = ["u", "v", "w", "s"];

/// Six pairwise distinct branch values `λ₁…λ₆` of `y² = Π(x − λ_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveConfig {
    lambdas: [GaussianRational; 6],
}

impl CurveConfig {
    pub fn new(lambdas: [GaussianRational; 6]) -> Result<Self, ConfigError> {
        for i in 0..6 {
            for j in i + 1..6 {
                if lambdas[i] == lambdas[j] {
                    return Err(ConfigError::DuplicateLambdas { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(CurveConfig { lambdas })
    }

    pub fn from_ints(l: [i64; 6]) -> Result<Self, ConfigError> {
        Self::new(l.map(GaussianRational::from_int))
    }

    /// Parses six `num/den` strings.
    pub fn parse<S: AsRef<str>>(values: &[S]) -> Result<Self> {
        if values.len() != 6 {
            return Err(ConfigError::WrongLambdaCount(values.len()).into());
        }
        let parsed = values
            .iter()
            .map(|s| s.as_ref().parse::<GaussianRational>())
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        let lambdas: [GaussianRational; 6] = parsed.try_into().expect("length checked");
        Ok(Self::new(lambdas)?)
    }

    /// `λ = (0, 1, −1, 2, 3, 5)`.
    pub fn reference() -> Self {
        Self::from_ints([0, 1, -1, 2, 3, 5]).expect("distinct")
    }

    pub fn lambdas(&self) -> &[GaussianRational; 6] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> &GaussianRational {
        &self.lambdas[i - 1]
    }

    pub fn is_real(&self) -> bool {
        self.lambdas.iter().all(GaussianRational::is_real)
    }

    /// Applies the fractional linear map sending `(λ₁, λ₂, λ₃)` to `(0, 1, −1)`.
    ///
    /// Fails if one of `λ₄…λ₆` is sent to infinity.
    pub fn normalized(&self) -> Result<Self, ConfigError> {
        let [l1, l2, l3, ..] = &self.lambdas;
        let denom = &(l2 + l3) - &(l1 + l1);
        let image = |z: &GaussianRational| -> Option<GaussianRational> {
            if denom.is_zero() {
                // pole at infinity: z ↦ (z − λ₁)/(λ₂ − λ₁)
                return (z - l1).checked_div(&(l2 - l1)).ok();
            }
            let pole = (&(&(l2 - l1) * l3) + &(&(l3 - l1) * l2)).checked_div(&denom).ok()?;
            let k = (l2 - &pole).checked_div(&(l2 - l1)).ok()?;
            (&k * &(z - l1)).checked_div(&(z - &pole)).ok()
        };
        let mapped: Vec<GaussianRational> = self
            .lambdas
            .iter()
            .map(|z| {
                image(z).ok_or_else(|| {
                    ConfigError::Invalid(format!("normalization sends {z} to infinity"))
                })
            })
            .collect::<Result<_, _>>()?;
        CurveConfig::new(mapped.try_into().expect("six values"))
    }

    /// `Π_{k ∉ {i,j}} (λ_i − λ_k)`: the weight of `X_j²` in `H_i` after clearing denominators.
    fn weight(&self, i: usize, j: usize) -> GaussianRational {
        (1..=6)
            .filter(|&k| k != i && k != j)
            .fold(GaussianRational::one(), |acc, k| {
                &acc * &(self.lambda(i) - self.lambda(k))
            })
    }
}

fn check_index(i: usize) -> Result<(), GeometryError> {
    if (1..=6).contains(&i) {
        Ok(())
    } else {
        Err(GeometryError::IndexOutOfRange(i))
    }
}

/// The six Klein coordinates of `⟨ε_i(q), p⟩` as polynomials in `(x,y,z,t,u,v,w,s)`.
pub fn join_klein_polynomials(i: usize) -> Result<[Poly; 6], GeometryError> {
    let ctx = VariableContext::projective();
    let vars = Poly::vars(&ctx);
    let q: [Poly; 4] = vars[..4].to_vec().try_into().expect("four");
    let p: [Poly; 4] = vars[4..].to_vec().try_into().expect("four");
    let eps = epsilon_section(i, &q)?;
    Ok(klein_coords(&plucker_coords(&eps, &p)))
}

/// How the `i`-th Klein coordinate of `⟨ε_i(q), p⟩` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonVanishing {
    pub i: usize,
    /// `X_i` is `c·(xu + yv + zw + ts)` for a unit `c ∈ {±1, ±i}`.
    pub unit_multiple_of_incidence: bool,
    /// `X_i` vanishes identically on the incidence locus.
    pub affine_zero: bool,
}

impl EpsilonVanishing {
    pub fn holds(&self) -> bool {
        self.unit_multiple_of_incidence && self.affine_zero
    }
}

pub fn epsilon_vanishing(i: usize) -> Result<EpsilonVanishing> {
    let k = join_klein_polynomials(i)?;
    let xi = &k[i - 1];
    let ctx = VariableContext::projective();
    let v = Poly::vars(&ctx);
    let incidence = (0..4).fold(Poly::zero(&ctx), |acc, k| &acc + &(&v[k] * &v[k + 4]));
    let units = [
        GaussianRational::from_int(1),
        GaussianRational::from_int(-1),
        GaussianRational::i(),
        -GaussianRational::i(),
    ];
    Ok(EpsilonVanishing {
        i,
        unit_multiple_of_incidence: units.iter().any(|c| (xi - &incidence.scale(c)).is_zero()),
        affine_zero: affinize(xi)?.is_zero(),
    })
}

/// `H_i` as a bidegree-(2,2) polynomial in `(x,y,z,t; u,v,w,s)`.
pub fn build_projective_hamiltonian(i: usize, cfg: &CurveConfig) -> Result<Poly> {
    check_index(i)?;
    let klein = join_klein_polynomials(i)?;
    let ctx = VariableContext::projective();
    let mut h = Poly::zero(&ctx);
    for j in (1..=6).filter(|&j| j != i) {
        let xj = &klein[j - 1];
        h = &h + &(xj * xj).scale(&cfg.weight(i, j));
    }
    Ok(h)
}

/// `H_i^a(x,y,z,u,v,w) = H_i((x:y:z:1), (u:v:w:−(xu+yv+zw)))`.
pub fn build_affine_hamiltonian(i: usize, cfg: &CurveConfig) -> Result<Poly> {
    affinize(&build_projective_hamiltonian(i, cfg)?)
}

/// Restricts a polynomial on `P³ × P³*` to the affine chart of `T*C³`.
pub fn affinize(projective: &Poly) -> Result<Poly> {
    let proj = projective.context().clone();
    let aff = VariableContext::affine();
    let one = Poly::one(&proj);
    let v = |n: &str| Poly::var(&aff, n).expect("affine variable");
    let pairing = &(&(&v("x") * &v("u")) + &(&v("y") * &v("v"))) + &(&v("z") * &v("w"));
    let chart = projective.substitute("t", &one)?;
    Ok(chart.substitute("s", &-&pairing)?)
}

/// `{f, g} = Σ_k ∂f/∂q_k ∂g/∂p_k − ∂f/∂p_k ∂g/∂q_k` with `q = (x,y,z)`, `p = (u,v,w)`.
pub fn poisson_bracket(f: &Poly, g: &Poly) -> Result<Poly, AlgebraError> {
    let aff = VariableContext::affine();
    for h in [f, g] {
        if *h.context() != aff {
            return Err(AlgebraError::ContextMismatch {
                left: h.context().names().to_vec(),
                right: aff.names().to_vec(),
            });
        }
    }
    let mut out = Poly::zero(&aff);
    for (q, p) in POSITIONS.iter().zip(MOMENTA) {
        let a = f.partial_derivative(q)?.checked_mul(&g.partial_derivative(p)?)?;
        let b = f.partial_derivative(p)?.checked_mul(&g.partial_derivative(q)?)?;
        out = out.checked_add(&a)?.checked_sub(&b)?;
    }
    Ok(out)
}

/// Projective and affine Hamiltonians for one curve.
#[derive(Clone, Debug)]
pub struct HamiltonianSet {
    pub config: CurveConfig,
    pub projective: Vec<Poly>,
    pub affine: Vec<Poly>,
}

impl HamiltonianSet {
    pub fn build(cfg: &CurveConfig) -> Result<Self> {
        let built: Vec<(Poly, Poly)> = (1..=6)
            .into_par_iter()
            .map(|i| {
                let proj = build_projective_hamiltonian(i, cfg)?;
                let aff = affinize(&proj)?;
                Ok((proj, aff))
            })
            .collect::<Result<_>>()?;
        let (projective, affine) = built.into_iter().unzip();
        Ok(HamiltonianSet {
            config: cfg.clone(),
            projective,
            affine,
        })
    }

    /// `H_i^a` (1-based).
    pub fn affine(&self, i: usize) -> &Poly {
        &self.affine[i - 1]
    }

    pub fn projective(&self, i: usize) -> &Poly {
        &self.projective[i - 1]
    }

    /// Copy with `delta` added to the leading coefficient of `H_i^a`; a negative control.
    pub fn with_perturbed_affine(&self, i: usize, delta: &GaussianRational) -> Result<Self> {
        check_index(i)?;
        let mut out = self.clone();
        let h = &self.affine[i - 1];
        let (lead, _) = h
            .terms()
            .next_back()
            .ok_or_else(|| GeometryError::Degenerate("zero Hamiltonian".into()))?;
        let bump = Poly::from_terms(h.context(), vec![(lead.exps().to_vec(), delta.clone())])?;
        out.affine[i - 1] = h.checked_add(&bump)?;
        Ok(out)
    }

    pub fn check_invariants(&self) -> InvariantReport {
        let real_expected = self.config.is_real();
        let projective_bidegree = self.projective.iter().all(|h| {
            !h.is_zero()
                && h.degrees_in(&POINT_BLOCK).unwrap().into_iter().eq([2])
                && h.degrees_in(&DUAL_BLOCK).unwrap().into_iter().eq([2])
        });
        let affine_momentum_quadratic = self
            .affine
            .iter()
            .all(|h| !h.is_zero() && h.degrees_in(&MOMENTA).unwrap().into_iter().eq([2]));
        let max_position_degree = self
            .affine
            .iter()
            .filter_map(|h| h.degree_in(&POSITIONS).unwrap())
            .max()
            .unwrap_or(0);
        let real_coefficients = self
            .projective
            .iter()
            .chain(&self.affine)
            .all(Poly::has_real_coefficients);
        InvariantReport {
            projective_bidegree,
            affine_momentum_quadratic,
            max_position_degree,
            real_coefficients,
            real_expected,
        }
    }

    /// Rank of the six projective `H_i` as vectors of (2,2)-form coefficients.
    pub fn projective_span_rank(&self) -> usize {
        let mut monomials: Vec<Vec<u16>> = self
            .projective
            .iter()
            .flat_map(|h| h.terms().map(|(m, _)| m.exps().to_vec()))
            .collect();
        monomials.sort();
        monomials.dedup();
        let rows = self
            .projective
            .iter()
            .map(|h| monomials.iter().map(|m| h.coefficient(m)).collect())
            .collect();
        Matrix::from_rows(rows).expect("rectangular").rank()
    }

    pub fn to_document(&self) -> HamiltonianDocument {
        HamiltonianDocument {
            lambdas: self
                .config
                .lambdas()
                .iter()
                .map(lambda_string)
                .collect(),
            projective: self.projective.iter().map(PolyDoc::from).collect(),
            affine: self.affine.iter().map(PolyDoc::from).collect(),
        }
    }
}

pub(crate) fn lambda_string(l: &GaussianRational) -> String {
    if l.is_real() {
        l.re.to_string()
    } else {
        format!("{},{}", l.re, l.im)
    }
}

/// Combined emission format `{"lambdas":[...], "projective":[...], "affine":[...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianDocument {
    pub lambdas: Vec<String>,
    pub projective: Vec<PolyDoc>,
    pub affine: Vec<PolyDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub projective_bidegree: bool,
    pub affine_momentum_quadratic: bool,
    pub max_position_degree: u32,
    pub real_coefficients: bool,
    pub real_expected: bool,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.projective_bidegree
            && self.affine_momentum_quadratic
            && self.max_position_degree <= 4
            && (self.real_coefficients || !self.real_expected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketResult {
    pub i: usize,
    pub j: usize,
    pub zero: bool,
    pub bracket_terms: usize,
    pub left_terms: usize,
    pub right_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionReport {
    pub pairs: Vec<BracketResult>,
}

impl InvolutionReport {
    pub fn all_zero(&self) -> bool {
        self.pairs.iter().all(|p| p.zero)
    }

    pub fn failing(&self) -> impl Iterator<Item = &BracketResult> {
        self.pairs.iter().filter(|p| !p.zero)
    }
}

/// Computes all 15 brackets `{H_i^a, H_j^a}`, `i < j`, exactly.
pub fn verify_involution(cfg: &CurveConfig) -> Result<InvolutionReport> {
    verify_involution_of(&HamiltonianSet::build(cfg)?)
}

pub fn verify_involution_of(set: &HamiltonianSet) -> Result<InvolutionReport> {
    let pairs: Vec<(usize, usize)> = (1..=6)
        .flat_map(|i| (i + 1..=6).map(move |j| (i, j)))
        .collect();
    let pairs = pairs
        .into_par_iter()
        .map(|(i, j)| {
            let (f, g) = (set.affine(i), set.affine(j));
            let b = poisson_bracket(f, g)?;
            Ok(BracketResult {
                i,
                j,
                zero: b.is_zero(),
                bracket_terms: b.term_count(),
                left_terms: f.term_count(),
                right_terms: g.term_count(),
            })
        })
        .collect::<Result<Vec<_>, AlgebraError>>()?;
    Ok(InvolutionReport { pairs })
}

/// Requires `q·p = 0`; returns `(H_1(p,q), …, H_6(p,q))`.
pub fn hitchin_map_eval(
    set: &HamiltonianSet,
    q: &HomPoint4<GaussianRational>,
    p: &HomPoint4<GaussianRational>,
) -> Result<[GaussianRational; 6]> {
    if !q.pair(p).is_zero() {
        return Err(GeometryError::NotIncident.into());
    }
    let point: Vec<GaussianRational> = q.0.iter().chain(p.0.iter()).cloned().collect();
    let values = set
        .projective
        .iter()
        .map(|h| h.evaluate(&point))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(values.try_into().expect("six Hamiltonians"))
}

/// A quadratic form on the incidence plane of a fixed `q`, in the basis of
/// [`incidence_plane_basis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberConic {
    pub matrix: [[GaussianRational; 3]; 3],
}

impl FiberConic {
    pub fn determinant(&self) -> GaussianRational {
        det3(&self.matrix)
    }

    /// `cᵀ M c`.
    pub fn evaluate(&self, c: &[GaussianRational; 3]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for a in 0..3 {
            for b in 0..3 {
                acc += &(&(&c[a] * &c[b]) * &self.matrix[a][b]);
            }
        }
        acc
    }

    /// `(M11, M22, M33, M12, M13, M23)`.
    pub fn coefficient_vector(&self) -> [GaussianRational; 6] {
        let m = &self.matrix;
        [
            m[0][0].clone(),
            m[1][1].clone(),
            m[2][2].clone(),
            m[0][1].clone(),
            m[0][2].clone(),
            m[1][2].clone(),
        ]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|a| (0..3).all(|b| self.matrix[a][b] == self.matrix[b][a]))
    }

    pub fn scaled(&self, c: &GaussianRational) -> FiberConic {
        FiberConic {
            matrix: std::array::from_fn(|a| std::array::from_fn(|b| &self.matrix[a][b] * c)),
        }
    }

    pub fn combine(terms: &[(&GaussianRational, &FiberConic)]) -> FiberConic {
        let mut matrix: [[GaussianRational; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| GaussianRational::zero()));
        for (c, conic) in terms {
            for (row, src) in matrix.iter_mut().zip(&conic.matrix) {
                for (entry, v) in row.iter_mut().zip(src) {
                    *entry += &(*c * v);
                }
            }
        }
        FiberConic { matrix }
    }
}

/// Restricts a projective `H` to `{(q, p) : p ∈ T*_q}` as a conic in plane coordinates.
pub fn restrict_to_fiber_conic(h: &Poly, q: &HomPoint4<GaussianRational>) -> Result<FiberConic> {
    let proj = VariableContext::projective();
    if *h.context() != proj {
        return Err(AlgebraError::ContextMismatch {
            left: h.context().names().to_vec(),
            right: proj.names().to_vec(),
        }
        .into());
    }
    let plane = VariableContext::new(&["c1", "c2", "c3"])?;
    let c = Poly::vars(&plane);
    let basis = incidence_plane_basis(q);
    let mut images: Vec<Poly> = q
        .0
        .iter()
        .map(|qk| Poly::constant(&plane, qk.clone()))
        .collect();
    for k in 0..4 {
        let mut coord = Poly::zero(&plane);
        for (a, h_a) in basis.iter().enumerate() {
            coord = &coord + &c[a].scale(&h_a.0[k]);
        }
        images.push(coord);
    }
    let form = h.compose(&plane, &images)?;
    let half = GaussianRational::ratio(1, 2);
    let matrix = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let mut exps = [0u16; 3];
            exps[a] += 1;
            exps[b] += 1;
            let coeff = form.coefficient(&exps);
            if a == b {
                coeff
            } else {
                &coeff * &half
            }
        })
    });
    Ok(FiberConic { matrix })
}

pub fn fiber_conics(set: &HamiltonianSet, q: &HomPoint4<GaussianRational>) -> Result<Vec<FiberConic>> {
    set.projective
        .iter()
        .map(|h| restrict_to_fiber_conic(h, q))
        .collect()
}

/// Rank of the 6×6 matrix of conic coefficient vectors.
pub fn conic_span_rank(conics: &[FiberConic]) -> usize {
    let rows = conics
        .iter()
        .map(|c| c.coefficient_vector().to_vec())
        .collect();
    Matrix::from_rows(rows).expect("rectangular").rank()
}

pub fn fiber_span_rank(set: &HamiltonianSet, q: &HomPoint4<GaussianRational>) -> Result<usize> {
    Ok(conic_span_rank(&fiber_conics(set, q)?))
}

/// Exact rank of the gradients of the selected `H_i^a` at a point of `T*C³`.
pub fn jacobian_rank(
    set: &HamiltonianSet,
    indices: &[usize],
    point: &[GaussianRational; 6],
) -> Result<usize> {
    let rows = indices
        .iter()
        .map(|&i| {
            check_index(i)?;
            let h = set.affine(i);
            let names = h.context().names().to_vec();
            names
                .iter()
                .map(|n| Ok(h.partial_derivative(n)?.evaluate(point)?))
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Matrix::from_rows(rows)?.rank())
}

/// Coefficients of the binary sextic `det(a²A + 2ab·B + b²C)`; entry `k` multiplies `a^(6−k) b^k`.
pub fn tangent_sextic(
    a: &FiberConic,
    b: &FiberConic,
    c: &FiberConic,
) -> [GaussianRational; 7] {
    let ctx = VariableContext::new(&["a", "b"]).expect("distinct names");
    let va = Poly::var(&ctx, "a").unwrap();
    let vb = Poly::var(&ctx, "b").unwrap();
    let aa = &va * &va;
    let ab = (&va * &vb).scale(&GaussianRational::from_int(2));
    let bb = &vb * &vb;
    let pencil: [[Poly; 3]; 3] = std::array::from_fn(|r| {
        std::array::from_fn(|s| {
            &(&aa.scale(&a.matrix[r][s]) + &ab.scale(&b.matrix[r][s])) + &bb.scale(&c.matrix[r][s])
        })
    });
    let det = det3(&pencil);
    std::array::from_fn(|k| det.coefficient(&[(6 - k) as u16, k as u16]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn diag(d: [i64; 3]) -> FiberConic {
        FiberConic {
            matrix: std::array::from_fn(|a| {
                std::array::from_fn(|b| if a == b { g(d[a]) } else { g(0) })
            }),
        }
    }

    #[test]
    fn duplicate_lambdas_are_rejected() {
        assert_eq!(
            CurveConfig::from_ints([0, 1, 2, 3, 1, 5]).unwrap_err(),
            ConfigError::DuplicateLambdas { i: 2, j: 5 }
        );
        assert!(CurveConfig::parse(&["0", "1", "2"]).is_err());
        assert!(CurveConfig::parse(&["0", "1/2", "2/4", "3", "4", "5"]).is_err());
        assert!(build_projective_hamiltonian(7, &CurveConfig::reference()).is_err());
    }

    #[test]
    fn normalization_fixes_three_values() {
        let cfg = CurveConfig::from_ints([2, 3, 7, -1, 4, 10]).unwrap();
        let n = cfg.normalized().unwrap();
        assert_eq!(n.lambdas()[..3], [g(0), g(1), g(-1)]);
        // already-normalized values are left alone
        let r = CurveConfig::reference();
        assert_eq!(r.normalized().unwrap(), r);
    }

    #[test]
    fn i_th_klein_coordinate_of_the_join_is_the_incidence_form() {
        for i in 1..=6 {
            let k = join_klein_polynomials(i).unwrap();
            let check = epsilon_vanishing(i).unwrap();
            assert!(check.holds(), "{check:?}");
            assert!(k.iter().enumerate().all(|(j, x)| j == i - 1 || !affinize(x).unwrap().is_zero()));
        }
    }

    #[test]
    fn brackets_of_canonical_pairs() {
        let aff = VariableContext::affine();
        let x = Poly::var(&aff, "x").unwrap();
        let u = Poly::var(&aff, "u").unwrap();
        assert_eq!(poisson_bracket(&x, &u).unwrap(), Poly::one(&aff));
        let xu = &x * &u;
        assert_eq!(poisson_bracket(&xu, &x).unwrap(), -&x);
        assert!(poisson_bracket(&xu, &xu).unwrap().is_zero());
        let proj = Poly::var(&VariableContext::projective(), "x").unwrap();
        assert!(poisson_bracket(&proj, &x).is_err());
    }

    #[test]
    fn sextic_of_identity_pencil() {
        let id = diag([1, 1, 1]);
        // (a + b)^6
        let expected = [1, 6, 15, 20, 15, 6, 1].map(g);
        assert_eq!(tangent_sextic(&id, &id, &id), expected);
    }

    #[test]
    fn fiber_conic_is_symmetric_and_singular() {
        let cfg = CurveConfig::reference();
        let set = HamiltonianSet::build(&cfg).unwrap();
        let q = HomPoint4::from_ints([3, -1, 2, 5]).unwrap();
        for h in &set.projective {
            let conic = restrict_to_fiber_conic(h, &q).unwrap();
            assert!(conic.is_symmetric());
            assert!(conic.determinant().is_zero());
        }
    }

    #[test]
    fn hitchin_map_requires_incidence() {
        let set = HamiltonianSet::build(&CurveConfig::reference()).unwrap();
        let q = HomPoint4::from_ints([1, 0, 0, 0]).unwrap();
        let p = HomPoint4::from_ints([1, 1, 0, 0]).unwrap();
        assert!(matches!(
            hitchin_map_eval(&set, &q, &p),
            Err(Error::Geometry(GeometryError::NotIncident))
        ));
    }
}
