//! Sparse multivariate polynomials over ℚ(i).
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, so iteration order (and therefore every emitted
//! document) is deterministic. Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::{GaussianRational, Ring};
use crate::error::AlgebraError;

/// Ordered, duplicate-free list of variable names shared by a family of polynomials.
#[derive(Clone, Debug)]
pub struct VariableContext {
    names: Arc<[String]>,
}

impl VariableContext {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, AlgebraError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(AlgebraError::DuplicateVariable(n.clone()));
            }
        }
        Ok(VariableContext { names: names.into() })
    }

    /// `x,y,z,t,u,v,w,s`: a point `(x:y:z:t)` of P³ and a dual point `(u:v:w:s)`.
    pub fn projective() -> Self {
        Self::new(&["x", "y", "z", "t", "u", "v", "w", "s"]).unwrap()
    }

    /// `x,y,z,u,v,w`: positions and momenta on T*C³.
    pub fn affine() -> Self {
        Self::new(&["x", "y", "z", "u", "v", "w"]).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_owned()))
    }

    fn ensure_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self == other {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch {
                left: self.names.to_vec(),
                right: other.names.to_vec(),
            })
        }
    }
}

impl PartialEq for VariableContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl Eq for VariableContext {}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn new(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    /// Sum of the exponents at `indices`.
    pub fn degree_in(&self, indices: &[usize]) -> u32 {
        indices.iter().map(|&i| u32::from(self.0[i])).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the variables of a [`VariableContext`] with Gaussian rational coefficients.
#[derive(Clone, Debug)]
pub struct SparsePolynomial {
    ctx: VariableContext,
    terms: BTreeMap<Monomial, GaussianRational>,
}

pub type Poly = SparsePolynomial;

impl PartialEq for SparsePolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl Eq for SparsePolynomial {}

impl SparsePolynomial {
    pub fn zero(ctx: &VariableContext) -> Self {
        SparsePolynomial {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &VariableContext, c: GaussianRational) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ctx.arity()), c);
        }
        p
    }

    pub fn one(ctx: &VariableContext) -> Self {
        Self::constant(ctx, GaussianRational::one())
    }

    pub fn var(ctx: &VariableContext, name: &str) -> Result<Self, AlgebraError> {
        let idx = ctx.index_of(name)?;
        Ok(Self::var_at(ctx, idx))
    }

    pub(crate) fn var_at(ctx: &VariableContext, idx: usize) -> Self {
        let mut m = Monomial::one(ctx.arity());
        m.0[idx] = 1;
        let mut p = Self::zero(ctx);
        p.terms.insert(m, GaussianRational::one());
        p
    }

    /// All variables of the context, in order.
    pub fn vars(ctx: &VariableContext) -> Vec<Self> {
        (0..ctx.arity()).map(|i| Self::var_at(ctx, i)).collect()
    }

    /// Builds a polynomial from raw terms; repeated exponent vectors are summed.
    pub fn from_terms<I>(ctx: &VariableContext, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u16>, GaussianRational)>,
    {
        let mut p = Self::zero(ctx);
        for (exps, c) in terms {
            if exps.len() != ctx.arity() {
                return Err(AlgebraError::Arity {
                    expected: ctx.arity(),
                    got: exps.len(),
                });
            }
            p.add_term(Monomial::new(&exps), &c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn context(&self) -> &VariableContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u16]) -> GaussianRational {
        self.terms
            .get(&Monomial::new(exps))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Maximum of the partial degree in the named block of variables.
    pub fn degree_in(&self, names: &[&str]) -> Result<Option<u32>, AlgebraError> {
        let idx = self.indices(names)?;
        Ok(self.terms.keys().map(|m| m.degree_in(&idx)).max())
    }

    /// Set of partial degrees in the named block that occur among the terms.
    pub fn degrees_in(&self, names: &[&str]) -> Result<BTreeSet<u32>, AlgebraError> {
        let idx = self.indices(names)?;
        Ok(self.terms.keys().map(|m| m.degree_in(&idx)).collect())
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>, AlgebraError> {
        names.iter().map(|n| self.ctx.index_of(n)).collect()
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    /// Rebuilds the term map from scratch, dropping zeros and merging duplicates.
    pub fn canonicalized(&self) -> Self {
        let mut p = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c);
        }
        p
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.ctx.ensure_same(&rhs.ctx)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.ctx.ensure_same(&rhs.ctx)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        self.ctx.ensure_same(&rhs.ctx)?;
        let mut out = Self::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        SparsePolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial_derivative(&self, name: &str) -> Result<Self, AlgebraError> {
        let idx = self.ctx.index_of(name)?;
        Ok(self.derivative_at(idx))
    }

    pub(crate) fn derivative_at(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[idx] = e - 1;
            out.add_term(dm, &(c * &GaussianRational::from_int(i64::from(e))));
        }
        out
    }

    /// Exact value at a point given in context order.
    pub fn evaluate(&self, point: &[GaussianRational]) -> Result<GaussianRational, AlgebraError> {
        if point.len() != self.ctx.arity() {
            return Err(AlgebraError::Arity {
                expected: self.ctx.arity(),
                got: point.len(),
            });
        }
        Ok(self.evaluate_with(point, |c| c.clone(), GaussianRational::one()))
    }

    /// Exact value at a point given as a name → value map covering every variable.
    pub fn evaluate_named(
        &self,
        point: &HashMap<String, GaussianRational>,
    ) -> Result<GaussianRational, AlgebraError> {
        let values = self
            .ctx
            .names()
            .iter()
            .map(|n| {
                point
                    .get(n)
                    .cloned()
                    .ok_or_else(|| AlgebraError::MissingAssignment(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.evaluate(&values)
    }

    /// Evaluates in any ring `T`, mapping coefficients through `coeff`.
    ///
    /// `values` must have one entry per context variable.
    pub fn evaluate_with<T, F>(&self, values: &[T], coeff: F, one: T) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        F: Fn(&GaussianRational) -> T,
    {
        assert_eq!(values.len(), self.ctx.arity(), "point arity");
        let max_exp = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let powers: Vec<Vec<T>> = values
            .iter()
            .map(|v| {
                let mut row = Vec::with_capacity(max_exp + 1);
                row.push(one.clone());
                for k in 1..=max_exp {
                    let next = row[k - 1].clone() * v.clone();
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc: Option<T> = None;
        for (m, c) in &self.terms {
            let mut term = coeff(c);
            for (var, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term * powers[var][e as usize].clone();
                }
            }
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.unwrap_or_else(|| coeff(&GaussianRational::zero()))
    }

    /// Ring homomorphism sending variable `k` of `self` to `images[k]`, all in `target`.
    pub fn compose(&self, target: &VariableContext, images: &[Poly]) -> Result<Poly, AlgebraError> {
        if images.len() != self.ctx.arity() {
            return Err(AlgebraError::Arity {
                expected: self.ctx.arity(),
                got: images.len(),
            });
        }
        for img in images {
            target.ensure_same(&img.ctx)?;
        }
        let one = Poly::one(target);
        let out = self.evaluate_with(
            images,
            |c| Poly::constant(target, c.clone()),
            one,
        );
        Ok(out)
    }

    /// Replaces `name` by `g`. The result lives in `g`'s context; every other
    /// variable occurring in `self` is mapped to the same-named variable there.
    pub fn substitute(&self, name: &str, g: &Poly) -> Result<Poly, AlgebraError> {
        let target = g.context().clone();
        let idx = self.ctx.index_of(name)?;
        let used: BTreeSet<usize> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i))
            .collect();
        let mut images = Vec::with_capacity(self.ctx.arity());
        for (k, var) in self.ctx.names().iter().enumerate() {
            if k == idx {
                images.push(g.clone());
            } else if let Ok(j) = target.index_of(var) {
                images.push(Poly::var_at(&target, j));
            } else if used.contains(&k) {
                return Err(AlgebraError::IncompatibleContext(var.clone()));
            } else {
                images.push(Poly::zero(&target));
            }
        }
        self.compose(&target, &images)
    }
}

impl Ring for SparsePolynomial {
    fn mul_i(&self) -> Self {
        self.scale(&GaussianRational::i())
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }

    fn half(&self) -> Self {
        self.scale(&GaussianRational::ratio(1, 2))
    }

    fn one_like(&self) -> Self {
        SparsePolynomial::one(self.context())
    }
}

// Operator forms panic on a context mismatch; the `checked_*` methods report it.
impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        SparsePolynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (var, &e) in self.ctx.names().iter().zip(m.0.iter()) {
                match e {
                    0 => {}
                    1 => write!(f, "*{var}")?,
                    _ => write!(f, "*{var}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> VariableContext {
        VariableContext::affine()
    }

    fn v(name: &str) -> Poly {
        Poly::var(&ctx(), name).unwrap()
    }

    fn c(n: i64) -> Poly {
        Poly::constant(&ctx(), GaussianRational::from_int(n))
    }

    #[test]
    fn addition_cancels() {
        let (x, y) = (v("x"), v("y"));
        assert_eq!(&(&x + &y) + &(&x - &y), c(2).checked_mul(&x).unwrap());
        assert_eq!(&x + &Poly::zero(&ctx()), x);
        let x2u = &(&x * &x) * &v("u");
        let sum = &x2u + &(-&x2u);
        assert!(sum.is_zero());
        assert_eq!(sum.term_count(), 0);
    }

    #[test]
    fn multiplication_uses_i_squared() {
        let (x, y) = (v("x"), v("y"));
        let iy = y.mul_i();
        let prod = &(&x + &iy) * &(&x - &iy);
        assert_eq!(prod, &(&x * &x) + &(&y * &y));
        assert_eq!(&x * &Poly::one(&ctx()), x);
        let sq = (&x + &y).pow(2);
        assert_eq!(sq, &(&(&x * &x) + &(&c(2) * &(&x * &y))) + &(&y * &y));
    }

    #[test]
    fn derivatives() {
        let (x, u) = (v("x"), v("u"));
        let x2u = &(&x * &x) * &u;
        assert_eq!(x2u.partial_derivative("x").unwrap(), &c(2) * &(&x * &u));
        assert!(x2u.partial_derivative("y").unwrap().is_zero());
        let form = &(&(&x * &u) + &(&v("y") * &v("v"))) + &(&v("z") * &v("w"));
        assert_eq!(form.partial_derivative("u").unwrap(), x);
        assert_eq!(
            x2u.partial_derivative("q"),
            Err(AlgebraError::UnknownVariable("q".into()))
        );
    }

    #[test]
    fn evaluation() {
        let (x, u) = (v("x"), v("u"));
        let x2u = &(&x * &x) * &u;
        let mut point = HashMap::new();
        for n in ctx().names() {
            point.insert(n.clone(), GaussianRational::zero());
        }
        point.insert("x".into(), GaussianRational::from_int(2));
        point.insert("u".into(), GaussianRational::from_int(3));
        assert_eq!(x2u.evaluate_named(&point).unwrap(), GaussianRational::from_int(12));
        let f = &x2u + &c(7);
        let zeros = vec![GaussianRational::zero(); 6];
        assert_eq!(f.evaluate(&zeros).unwrap(), GaussianRational::from_int(7));
        point.remove("w");
        assert_eq!(
            x2u.evaluate_named(&point),
            Err(AlgebraError::MissingAssignment("w".into()))
        );
    }

    #[test]
    fn substitution_into_another_context() {
        let proj = VariableContext::projective();
        let s = Poly::var(&proj, "s").unwrap();
        let aff = ctx();
        let lin = &(&(&v("x") * &v("u")) + &(&v("y") * &v("v"))) + &(&v("z") * &v("w"));
        let neg = -&lin;
        let out = (&s * &s).substitute("s", &neg).unwrap();
        assert_eq!(out, &lin * &lin);
        // `t` has no counterpart in the affine context
        let t = Poly::var(&proj, "t").unwrap();
        assert_eq!(
            (&t * &s).substitute("s", &neg),
            Err(AlgebraError::IncompatibleContext("t".into()))
        );
        // identity substitution
        let f = &(&v("x") * &v("v")) + &v("v");
        assert_eq!(f.substitute("v", &v("v")).unwrap(), f);
        assert_eq!(aff, *out.context());
    }

    #[test]
    fn mismatched_contexts_are_rejected() {
        let proj = VariableContext::projective();
        let a = Poly::var(&proj, "x").unwrap();
        assert!(matches!(
            a.checked_add(&v("x")),
            Err(AlgebraError::ContextMismatch { .. })
        ));
        assert!(a.checked_mul(&v("x")).is_err());
        assert!(VariableContext::new(&["a", "a"]).is_err());
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::new(&[2, 0, 0]);
        let b = Monomial::new(&[0, 0, 3]);
        let c = Monomial::new(&[1, 1, 0]);
        assert!(a < b);
        assert!(c < a);
    }
}
