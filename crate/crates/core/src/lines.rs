//! Plücker and Klein coordinates of lines in P³, and the six sections ε₁…ε₆
//! of the incidence bundle.
//!
//! Plücker coordinates are stored in the order `p01, p02, p03, p12, p13, p23`
//! with `p_jk = Z_j W_k − W_j Z_k`. Klein coordinates use the table
//!
//! ```text
//! X1 = p01 + p23      X3 = i(p02 + p13)   X5 = p03 + p12
//! X2 = i(p01 − p23)   X4 = p02 − p13      X6 = i(p03 − p12)
//! ```
//!
//! so that `ΣX_k² = 4·(p01·p23 − p02·p13 + p03·p12)`.
//!
//! Everything here is generic over [`Ring`], so the same formulas serve exact
//! evaluation, floating-point work and symbolic polynomial identities.

use num_traits::Zero;

use crate::error::GeometryError;
use crate::exact::{GaussianRational, Poly, Ring, VariableContext};

/// Index pairs `(j, k)` of the six Plücker coordinates, in storage order.
pub const PLUCKER_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// A nonzero vector of homogeneous coordinates in P³ (or its dual).
#[derive(Clone, Debug)]
pub struct HomPoint4<T>(pub [T; 4]);

impl<T: Ring> HomPoint4<T> {
    pub fn new(coords: [T; 4]) -> Result<Self, GeometryError> {
        if coords.iter().all(Ring::is_zero_elem) {
            return Err(GeometryError::ZeroPoint);
        }
        Ok(HomPoint4(coords))
    }

    pub fn coords(&self) -> &[T; 4] {
        &self.0
    }

    /// Incidence pairing `Σ a_k b_k` between a point and a dual point.
    pub fn pair(&self, other: &HomPoint4<T>) -> T {
        pairing(&self.0, &other.0)
    }
}

impl HomPoint4<GaussianRational> {
    pub fn from_ints(c: [i64; 4]) -> Result<Self, GeometryError> {
        Self::new(c.map(GaussianRational::from_int))
    }

    /// Equality as projective points: `a_k b_j = a_j b_k` against the first nonzero slot of `a`.
    pub fn proportional(&self, other: &Self) -> bool {
        proportional(&self.0, &other.0)
    }
}

pub(crate) fn pairing<T: Ring>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0].clone() * b[0].clone()
        + a[1].clone() * b[1].clone()
        + a[2].clone() * b[2].clone()
        + a[3].clone() * b[3].clone()
}

/// Homogeneous equality for exact vectors of any length.
pub fn proportional(a: &[GaussianRational], b: &[GaussianRational]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = a.iter().position(|c| !c.is_zero()) else {
        return false;
    };
    if b[k].is_zero() {
        return false;
    }
    a.iter()
        .zip(b)
        .all(|(ai, bi)| ai * &b[k] == bi * &a[k])
}

/// The six Plücker coordinates of the span of `z` and `w`, without a degeneracy check.
pub fn plucker_coords<T: Ring>(z: &[T; 4], w: &[T; 4]) -> [T; 6] {
    PLUCKER_PAIRS.map(|(j, k)| z[j].clone() * w[k].clone() - w[j].clone() * z[k].clone())
}

/// The Grassmann form `p01·p23 − p02·p13 + p03·p12`.
pub fn grassmann_form<T: Ring>(p: &[T; 6]) -> T {
    p[0].clone() * p[5].clone() - p[1].clone() * p[4].clone() + p[2].clone() * p[3].clone()
}

pub fn klein_coords<T: Ring>(p: &[T; 6]) -> [T; 6] {
    let [p01, p02, p03, p12, p13, p23] = p.clone();
    [
        p01.clone() + p23.clone(),
        (p01 - p23).mul_i(),
        (p02.clone() + p13.clone()).mul_i(),
        p02 - p13,
        p03.clone() + p12.clone(),
        (p03 - p12).mul_i(),
    ]
}

/// Exact inverse of [`klein_coords`].
pub fn plucker_from_klein<T: Ring>(x: &[T; 6]) -> [T; 6] {
    let [x1, x2, x3, x4, x5, x6] = x.clone();
    let ix2 = x2.mul_i();
    let ix3 = x3.mul_i();
    let ix6 = x6.mul_i();
    [
        (x1.clone() - ix2.clone()).half(),
        (x4.clone() - ix3.clone()).half(),
        (x5.clone() - ix6.clone()).half(),
        (x5 + ix6).half(),
        (-ix3 - x4).half(),
        (x1 + ix2).half(),
    ]
}

pub fn sum_of_squares<T: Ring>(x: &[T]) -> T {
    let mut it = x.iter();
    let first = it.next().expect("non-empty vector");
    it.fold(first.clone() * first.clone(), |acc, v| acc + v.clone() * v.clone())
}

/// `ΣX_k² − 4·(p01p23 − p02p13 + p03p12)` over six independent Plücker variables.
///
/// The Klein table diagonalizes the Grassmannian quadric, so this is the zero polynomial.
pub fn klein_identity_residual() -> Poly {
    let ctx = VariableContext::new(&["p01", "p02", "p03", "p12", "p13", "p23"]).expect("distinct names");
    let p: [Poly; 6] = Poly::vars(&ctx).try_into().expect("six variables");
    let four = Poly::constant(&ctx, GaussianRational::from_int(4));
    &sum_of_squares(&klein_coords(&p)) - &(&four * &grassmann_form(&p))
}

/// A line of P³ in Plücker coordinates.
#[derive(Clone, Debug)]
pub struct PluckerLine<T> {
    pub coords: [T; 6],
}

impl<T: Ring> PluckerLine<T> {
    pub fn from_points(z: &HomPoint4<T>, w: &HomPoint4<T>) -> Result<Self, GeometryError> {
        let coords = plucker_coords(&z.0, &w.0);
        if coords.iter().all(Ring::is_zero_elem) {
            return Err(GeometryError::DegenerateLine);
        }
        Ok(PluckerLine { coords })
    }

    pub fn grassmann(&self) -> T {
        grassmann_form(&self.coords)
    }

    pub fn to_klein(&self) -> KleinVector<T> {
        KleinVector(klein_coords(&self.coords))
    }

    /// `P = Z Wᵀ − W Zᵀ`; `P·h = Z⟨W,h⟩ − W⟨Z,h⟩` vanishes iff the line lies in the plane `h`,
    /// and `P·e_k` is a point of the line.
    pub fn primal_matrix(&self) -> [[T; 4]; 4] {
        self.skew_matrix(&self.coords)
    }

    /// Hodge dual of [`Self::primal_matrix`]; `P*·q` vanishes iff the point `q` lies on the line.
    pub fn dual_matrix(&self) -> [[T; 4]; 4] {
        let [p01, p02, p03, p12, p13, p23] = self.coords.clone();
        self.skew_matrix(&[p23, -p13, p12, p03, -p02, p01])
    }

    fn skew_matrix(&self, c: &[T; 6]) -> [[T; 4]; 4] {
        let zero = c[0].clone() - c[0].clone();
        let mut m: [[T; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
        for (idx, &(j, k)) in PLUCKER_PAIRS.iter().enumerate() {
            m[j][k] = c[idx].clone();
            m[k][j] = -c[idx].clone();
        }
        m
    }
}

/// Klein coordinates of a line.
#[derive(Clone, Debug)]
pub struct KleinVector<T>(pub [T; 6]);

impl<T: Ring> KleinVector<T> {
    pub fn sum_of_squares(&self) -> T {
        sum_of_squares(&self.0)
    }

    pub fn to_plucker(&self) -> PluckerLine<T> {
        PluckerLine {
            coords: plucker_from_klein(&self.0),
        }
    }
}

/// `ε_i(q)` for `i ∈ 1..=6`, the dual point `X_i(q, −)` (up to sign).
///
/// With `q = (x:y:z:t)`:
/// `ε1=(y:−x:t:−z)`, `ε2=(y:−x:−t:z)`, `ε3=(z:t:−x:−y)`,
/// `ε4=(z:−t:−x:y)`, `ε5=(t:z:−y:−x)`, `ε6=(t:−z:y:−x)`.
pub fn epsilon_section<T: Ring>(i: usize, q: &[T; 4]) -> Result<[T; 4], GeometryError> {
    let [x, y, z, t] = q.clone();
    Ok(match i {
        1 => [y, -x, t, -z],
        2 => [y, -x, -t, z],
        3 => [z, t, -x, -y],
        4 => [z, -t, -x, y],
        5 => [t, z, -y, -x],
        6 => [t, -z, y, -x],
        _ => return Err(GeometryError::IndexOutOfRange(i)),
    })
}

/// The line spanned by two dual points (same construction as for points).
pub fn join_in_dual<T: Ring>(
    a: &HomPoint4<T>,
    b: &HomPoint4<T>,
) -> Result<PluckerLine<T>, GeometryError> {
    PluckerLine::from_points(a, b)
}

/// Three independent dual points incident with `q`.
///
/// Drops the coordinate `k` of largest modulus (lowest index on ties) and
/// returns `q_k e_j − q_j e_k` for the remaining `j` in increasing order.
pub fn incidence_plane_basis(q: &HomPoint4<GaussianRational>) -> [HomPoint4<GaussianRational>; 3] {
    let k = pivot_index(&q.0);
    let others: Vec<usize> = (0..4).filter(|&j| j != k).collect();
    std::array::from_fn(|n| {
        let j = others[n];
        let mut h: [GaussianRational; 4] = std::array::from_fn(|_| GaussianRational::zero());
        h[j] = q.0[k].clone();
        h[k] = -&q.0[j];
        HomPoint4(h)
    })
}

/// Index of the coordinate with the largest exact modulus; ties go to the lowest index.
pub fn pivot_index(q: &[GaussianRational]) -> usize {
    let mut best = 0;
    let mut best_norm = q[0].norm_sqr();
    for (j, c) in q.iter().enumerate().skip(1) {
        let n = c.norm_sqr();
        if n > best_norm {
            best = j;
            best_norm = n;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Matrix, Poly, VariableContext};

    fn pt(c: [i64; 4]) -> HomPoint4<GaussianRational> {
        HomPoint4::from_ints(c).unwrap()
    }

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn plucker_of_coordinate_axes() {
        let l = PluckerLine::from_points(&pt([1, 0, 0, 0]), &pt([0, 1, 0, 0])).unwrap();
        assert_eq!(l.coords, [g(1), g(0), g(0), g(0), g(0), g(0)]);
        let l = PluckerLine::from_points(&pt([1, 2, 3, 4]), &pt([0, 0, 0, 1])).unwrap();
        assert_eq!(l.coords, [g(0), g(0), g(1), g(0), g(2), g(3)]);
    }

    #[test]
    fn proportional_points_do_not_span() {
        let err = PluckerLine::from_points(&pt([1, 2, 3, 4]), &pt([2, 4, 6, 8])).unwrap_err();
        assert_eq!(err, GeometryError::DegenerateLine);
        assert!(join_in_dual(&pt([0, 1, 0, 0]), &pt([0, -3, 0, 0])).is_err());
        assert!(HomPoint4::from_ints([0, 0, 0, 0]).is_err());
    }

    #[test]
    fn swapping_points_negates() {
        let (a, b) = (pt([1, -2, 5, 3]), pt([4, 0, -1, 7]));
        let ab = PluckerLine::from_points(&a, &b).unwrap();
        let ba = PluckerLine::from_points(&b, &a).unwrap();
        for (x, y) in ab.coords.iter().zip(&ba.coords) {
            assert_eq!(x, &-y);
        }
    }

    #[test]
    fn klein_table() {
        let e01 = [g(1), g(0), g(0), g(0), g(0), g(0)];
        let k = klein_coords(&e01);
        assert_eq!(k[0], g(1));
        assert_eq!(k[1], GaussianRational::i());
        assert!(k[2..].iter().all(Zero::is_zero));
        // p03 = p12 = 1
        let k = klein_coords(&[g(0), g(0), g(1), g(1), g(0), g(0)]);
        assert_eq!(k, [g(0), g(0), g(0), g(0), g(2), g(0)]);
    }

    #[test]
    fn klein_inverse_round_trips() {
        let p = [g(3), g(-1), g(4), g(1), g(-5), g(9)];
        assert_eq!(plucker_from_klein(&klein_coords(&p)), p);
    }

    #[test]
    fn klein_identity_is_symbolic() {
        assert!(klein_identity_residual().is_zero());
    }

    #[test]
    fn epsilon_table_values() {
        let q = [g(1), g(2), g(3), g(4)];
        assert_eq!(epsilon_section(1, &q).unwrap(), [g(2), g(-1), g(4), g(-3)]);
        let e1 = [g(1), g(0), g(0), g(0)];
        assert_eq!(epsilon_section(3, &e1).unwrap(), [g(0), g(0), g(-1), g(0)]);
        assert_eq!(
            epsilon_section(7, &q).unwrap_err(),
            GeometryError::IndexOutOfRange(7)
        );
        assert!(epsilon_section(0, &q).is_err());
    }

    #[test]
    fn epsilon_is_incident_and_linear() {
        let ctx = VariableContext::new(&["x", "y", "z", "t"]).unwrap();
        let q: [Poly; 4] = Poly::vars(&ctx).try_into().unwrap();
        for i in 1..=6 {
            let e = epsilon_section(i, &q).unwrap();
            assert!(pairing(&q, &e).is_zero(), "q·ε_{i}(q) must vanish");
        }
        let a = [g(1), g(-2), g(3), g(5)];
        let b = [g(7), g(0), g(-1), g(2)];
        let sum: [GaussianRational; 4] = std::array::from_fn(|k| &a[k] + &b[k]);
        for i in 1..=6 {
            let ea = epsilon_section(i, &a).unwrap();
            let eb = epsilon_section(i, &b).unwrap();
            let es = epsilon_section(i, &sum).unwrap();
            for k in 0..4 {
                assert_eq!(es[k], &ea[k] + &eb[k]);
            }
        }
    }

    #[test]
    fn incidence_basis_of_first_axis() {
        let basis = incidence_plane_basis(&pt([1, 0, 0, 0]));
        assert!(basis[0].proportional(&pt([0, 1, 0, 0])));
        assert!(basis[1].proportional(&pt([0, 0, 1, 0])));
        assert!(basis[2].proportional(&pt([0, 0, 0, 1])));
    }

    #[test]
    fn incidence_basis_spans_the_plane() {
        for q in [[1, 2, 3, 4], [-5, 2, 5, 1], [0, 0, 3, 0], [2, -7, 1, 1]] {
            let q = pt(q);
            let basis = incidence_plane_basis(&q);
            for h in &basis {
                assert!(q.pair(h).is_zero());
            }
            let m = Matrix::from_rows(basis.iter().map(|h| h.0.to_vec()).collect()).unwrap();
            assert_eq!(m.rank(), 3);
        }
    }

    #[test]
    fn line_membership_matrices() {
        let (z, w) = (pt([1, 2, 0, -1]), pt([3, 0, 1, 1]));
        let l = PluckerLine::from_points(&z, &w).unwrap();
        let dual = l.dual_matrix();
        for p in [&z, &w] {
            for row in &dual {
                assert!(pairing(row, &p.0).is_zero());
            }
        }
        let primal = l.primal_matrix();
        let plane = [g(2), g(-1), g(-6), g(0)];
        assert!(pairing(&z.0, &plane).is_zero());
        assert!(pairing(&w.0, &plane).is_zero());
        for row in &primal {
            assert!(pairing(row, &plane).is_zero());
        }
    }

    #[test]
    fn proportional_detects_scaling() {
        let a = pt([0, 2, -4, 6]);
        let b = HomPoint4::new([g(0), GaussianRational::i(), g(-2).mul_i(), g(3).mul_i()]).unwrap();
        assert!(a.proportional(&b));
        assert!(!a.proportional(&pt([0, 2, -4, 7])));
        assert!(!a.proportional(&pt([1, 2, -4, 6])));
    }
}
